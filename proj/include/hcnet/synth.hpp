#ifndef HCNET_SYNTH_HPP
#define HCNET_SYNTH_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hcnet/hypergraph.hpp"

namespace hcnet {

class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Relation ids of every HyperCycle graph.
inline constexpr RelationId kQueryRelation = 0;  // r0, arity 2, no edges
inline constexpr RelationId kEvenRelation = 1;   // r1
inline constexpr RelationId kOddRelation = 2;    // r2

struct HyperCycleSpec {
  int n = 8;
  int k = 3;
};

/// Nodes x_0..x_{n-1}; edge i is r1 for even i, r2 for odd i, over
/// x_i, x_{i+1}, ..., x_{i+k-1} (indices mod n).
RelationalHypergraph hypercycle(int n, int k);

struct OppositeQueries {
  std::vector<HyperEdge> positives;  // r0(x_i, x_{i+n/2})
  std::vector<HyperEdge> negatives;  // r0(x_i, x_{i+2})
};
OppositeQueries opposite_queries(int n);

struct HyperCycleSuite {
  std::vector<HyperCycleSpec> train;
  std::vector<HyperCycleSpec> test;
};

/// Every (n, k) with k < n, shuffled with `seed`; the first round(ratio * total)
/// go to train.
HyperCycleSuite hypercycle_suite(const std::vector<int>& ns, const std::vector<int>& ks,
                                 double ratio, std::uint64_t seed);

/// n = {8, 12, 16, 20}, k = {3..7}.
HyperCycleSuite default_hypercycle_suite(double ratio, std::uint64_t seed);

}  // namespace hcnet

#endif  // HCNET_SYNTH_HPP
