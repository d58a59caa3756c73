#ifndef HCNET_EVALRANK_HPP
#define HCNET_EVALRANK_HPP

#include <atomic>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hcnet/hypergraph.hpp"
#include "hcnet/model.hpp"

namespace hcnet {

enum class EvalErrc { NaNScore, EmptyOutcomes, IndexOutOfRange };

class EvalError : public std::runtime_error {
 public:
  EvalError(EvalErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  EvalErrc code() const noexcept { return code_; }

 private:
  EvalErrc code_;
};

struct RankingOutcome {
  Query query;
  NodeId truth = 0;
  double rank = 1.0;  // tie-averaged
  std::size_t candidates = 0;
  int arity = 0;
};

struct Metrics {
  double mrr = 0.0;
  double hits1 = 0.0;
  double hits3 = 0.0;
  double hits10 = 0.0;
  std::size_t queries = 0;
};

struct MetricsReport {
  Metrics overall;
  std::map<int, Metrics> per_arity;
};

/// Nodes v such that the fact with v at position t is not in `known`, plus
/// the true entity. Sorted by node id.
std::vector<NodeId> filtered_candidates(const HyperEdge& fact, int t, std::size_t node_count, const FactSet& known);

/// 1 + #{strictly higher} + #{other ties} / 2.
double rank_of(std::span<const double> scores, std::size_t true_index);

MetricsReport aggregate(std::span<const RankingOutcome> outcomes);

struct EvalOptions {
  /// 0 ranks against every filtered candidate; otherwise against this many
  /// negatives drawn from them.
  int negatives = 0;
  std::uint64_t seed = 0;
  int threads = 1;
  /// Incremented once per encoder pass when non-null.
  std::atomic<std::uint64_t>* forward_count = nullptr;
};

/// Ranks every position of every fact with one encoder pass per query.
MetricsReport evaluate_model(const RelationalHypergraph& graph, std::span<const HyperEdge> facts, const FactSet& known,
                             const ModelParams& model, const EvalOptions& opts = {},
                             std::vector<RankingOutcome>* outcomes = nullptr);

nlohmann::json to_json(const Metrics& m);
nlohmann::json to_json(const MetricsReport& r);

}  // namespace hcnet

#endif  // HCNET_EVALRANK_HPP
