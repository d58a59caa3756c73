#include "hcnet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hcnet {

namespace {

void check_spec(int n, int k) {
  if (n < 8 || n % 4 != 0)
    throw InvalidSpec("n must be a multiple of 4 and at least 8, got " + std::to_string(n));
  if (k < 3 || k >= n)
    throw InvalidSpec("k must satisfy 3 <= k < n, got k=" + std::to_string(k));
}

}  // namespace

RelationalHypergraph hypercycle(int n, int k) {
  check_spec(n, k);
  std::vector<Relation> relations{{kQueryRelation, "r0", 2}, {kEvenRelation, "r1", k}, {kOddRelation, "r2", k}};
  std::vector<HyperEdge> edges;
  edges.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    HyperEdge e{i % 2 == 0 ? kEvenRelation : kOddRelation, {}};
    for (int j = 0; j < k; ++j) e.nodes.push_back(static_cast<NodeId>((i + j) % n));
    edges.push_back(std::move(e));
  }
  return RelationalHypergraph::build(std::move(relations), std::move(edges), static_cast<std::size_t>(n));
}

OppositeQueries opposite_queries(int n) {
  check_spec(n, 3);
  OppositeQueries q;
  for (int i = 0; i < n; ++i) {
    const auto x = static_cast<NodeId>(i);
    q.positives.push_back({kQueryRelation, {x, static_cast<NodeId>((i + n / 2) % n)}});
    q.negatives.push_back({kQueryRelation, {x, static_cast<NodeId>((i + 2) % n)}});
  }
  return q;
}

HyperCycleSuite hypercycle_suite(const std::vector<int>& ns, const std::vector<int>& ks,
                                 double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio <= 1.0)) throw InvalidSpec("split ratio must lie in (0, 1]");
  std::vector<HyperCycleSpec> all;
  for (int n : ns)
    for (int k : ks)
      if (k < n) {
        check_spec(n, k);
        all.push_back({n, k});
      }
  std::mt19937_64 rng(seed);
  std::shuffle(all.begin(), all.end(), rng);
  const auto cut = static_cast<std::size_t>(std::lround(ratio * static_cast<double>(all.size())));
  HyperCycleSuite suite;
  suite.train.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(cut));
  suite.test.assign(all.begin() + static_cast<std::ptrdiff_t>(cut), all.end());
  return suite;
}

HyperCycleSuite default_hypercycle_suite(double ratio, std::uint64_t seed) {
  return hypercycle_suite({8, 12, 16, 20}, {3, 4, 5, 6, 7}, ratio, seed);
}

}  // namespace hcnet
