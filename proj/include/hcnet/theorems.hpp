#ifndef HCNET_THEOREMS_HPP
#define HCNET_THEOREMS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace hcnet {

/// Outcome of one randomized property suite.
struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t violations = 0;
  double metric = 0.0;  // suite-specific: match count, max error, ...
  std::string detail;
  bool pass = false;
};

/// WL round-l partitions refine layer-l feature partitions, l <= 5, for
/// HCNet (conditional test) and HRNet (hrwl1, uniform init), with and without
/// layer norm and skip connections.
SuiteResult refinement_suite(std::uint64_t seed, int graphs = 100);
/// Width-64 feature partitions equal the WL partition at round 3 on at least
/// `required` graphs, for both model kinds. metric = worst match count.
SuiteResult wl_match_suite(std::uint64_t seed, int graphs = 100, int required = 95);
/// hcwl2 and rawl2+ induce the same pair partition at every round <= 5 on
/// loop-free knowledge graphs.
SuiteResult pair_refinement_suite(std::uint64_t seed, int graphs = 50);
/// Every subformula output of the compiled network equals the evaluator.
SuiteResult compiler_suite(std::uint64_t seed, int pairs = 200);
/// Backward vs central differences on jittered parameters. metric = max
/// relative error.
SuiteResult gradcheck_suite(std::uint64_t seed, int instances = 10, double tolerance = 1e-4);
/// Layer features and scores follow node permutations. metric = max
/// deviation.
SuiteResult equivariance_suite(std::uint64_t seed, int permutations = 20, double tolerance = 1e-9);

std::vector<SuiteResult> run_all_suites(std::uint64_t seed);

nlohmann::json to_json(const SuiteResult& r);

}  // namespace hcnet

#endif  // HCNET_THEOREMS_HPP
