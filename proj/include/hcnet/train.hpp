#ifndef HCNET_TRAIN_HPP
#define HCNET_TRAIN_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "hcnet/dataset.hpp"
#include "hcnet/evalrank.hpp"
#include "hcnet/hypergraph.hpp"
#include "hcnet/model.hpp"

namespace hcnet {

enum class TrainErrc { NoCandidate, ProbabilityOutOfRange, InvalidConfig };

class TrainError : public std::runtime_error {
 public:
  TrainError(TrainErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  TrainErrc code() const noexcept { return code_; }

 private:
  TrainErrc code_;
};

/// Defaults are the inductive WP-IND hyperparameters.
struct TrainConfig {
  ModelKind model = ModelKind::HCNet;
  int hidden = 128;
  int layers = 5;
  double lr = 5e-3;
  int batch_size = 32;
  int negatives = 10;
  double adv_temperature = 0.5;
  int epochs = 20;
  double dropout = 0.2;
  MessageMode mode = MessageMode::QueryDependent;
  InitVariant init = InitVariant::PZ;
  PeKind pe = PeKind::Sinusoidal;
  bool layer_norm = true;
  bool skip = true;
  int accumulation = 1;
  int steps_per_epoch = 0;  // 0: one pass over the training facts
  int threads = 1;
  std::uint64_t seed = 0;
};

/// Throws TrainError{InvalidConfig} on unknown keys or out-of-range values.
TrainConfig train_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TrainConfig& c);
void validate(const TrainConfig& c);
ModelConfig model_config(const TrainConfig& c, int relations, int max_arity);

struct AdamState {
  std::vector<std::vector<double>> m, v;
  std::uint64_t step = 0;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
};

AdamState adam_init(const ParamSet& params);
/// Bias-corrected Adam. Throws NnError{ShapeMismatch} when shapes differ.
void adam_step(ParamSet& params, const ParamSet& grads, AdamState& state, double lr);

/// n nodes for position t, each different from the true entity and not
/// forming a fact in `known`. Throws TrainError{NoCandidate} when none exist.
std::vector<NodeId> corrupt(const HyperEdge& fact, int t, std::size_t node_count, const FactSet& known, int n,
                            std::mt19937_64& rng);

/// w_i = softmax_i(log(1 - p'_i) / alpha).
std::vector<double> adversarial_weights(std::span<const double> p_negs, double alpha);
/// -log p - sum_i w_i log(1 - p'_i).
double self_adversarial_loss(double p_pos, std::span<const double> p_negs, double alpha);

struct LossGrad {
  double loss = 0.0;
  std::vector<double> dlogits;  // positive first, then negatives
  std::vector<double> weights;
};
/// The same loss on logits, computed stably, with detached weights.
LossGrad self_adversarial_logits(double s_pos, std::span<const double> s_negs, double alpha);

/// Maps facts to the edge ids carrying them.
class EdgeLookup {
 public:
  explicit EdgeLookup(const RelationalHypergraph& graph);
  const std::vector<EdgeId>* find(const HyperEdge& fact) const;

 private:
  struct Hash {
    std::size_t operator()(const HyperEdge& e) const noexcept;
  };
  std::unordered_map<HyperEdge, std::vector<EdgeId>, Hash> map_;
};

/// Hides every edge equal to one of the facts. Throws
/// GraphError{FactNotFound} for a fact that is not in the graph.
GraphView mask_positives(const RelationalHypergraph& graph, std::span<const HyperEdge> facts,
                         const EdgeLookup* lookup = nullptr);

struct EpochLog {
  int epoch = 0;
  double loss = 0.0;
  double val_mrr = -1.0;  // -1 when there is no validation split
  double seconds = 0.0;
};

struct FitOptions {
  std::ostream* log = nullptr;  // one JSON object per epoch
  std::function<void(const EpochLog&)> on_epoch;
  EvalOptions eval;
};

struct FitResult {
  ModelParams model;
  std::vector<EpochLog> log;
  int best_epoch = 0;
  double best_val_mrr = -1.0;
};

/// Epochs of shuffled mini-batches over the training facts. Returns the
/// parameters with the best validation MRR, or the last ones without a
/// validation split.
FitResult fit(const Dataset& data, const TrainConfig& cfg, const FitOptions& opts = {});

/// Sum of per-sample gradients in sample order. Samples run on `threads`
/// workers; the result does not depend on the worker count.
ParamSet sum_gradients(const ModelParams& model, std::size_t samples, int threads,
                       const std::function<double(std::size_t, ParamSet&)>& sample_grad, double* loss_sum);

}  // namespace hcnet

#endif  // HCNET_TRAIN_HPP
