#ifndef HCNET_SYNTH_EXPERIMENT_HPP
#define HCNET_SYNTH_EXPERIMENT_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "hcnet/model.hpp"
#include "hcnet/synth.hpp"

namespace hcnet {

struct HyperCycleRunConfig {
  ModelKind model = ModelKind::HCNet;
  int hidden = 32;
  int layers = 7;
  double lr = 1e-3;
  int epochs = 100;
  int batch_size = 16;
  MessageMode mode = MessageMode::QueryDependent;
  PeKind pe = PeKind::Sinusoidal;
  bool layer_norm = true;
  bool skip = true;
  std::vector<int> ns{8, 12, 16, 20};
  std::vector<int> ks{3, 4, 5, 6, 7};
  double ratio = 0.7;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct HyperCycleResult {
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  std::size_t test_pairs = 0;
  std::vector<double> epoch_loss;
  HyperCycleSuite suite;
};

/// Model shape shared by every graph of a suite.
ModelConfig hypercycle_model_config(const HyperCycleRunConfig& cfg);

/// Pairwise accuracy: for every source x_i, 1 if the opposite node outscores
/// x_{i+2}, 1/2 on a tie, 0 otherwise; averaged over all pairs.
double hypercycle_accuracy(const std::vector<HyperCycleSpec>& graphs, const ModelParams& model,
                           std::size_t* pairs = nullptr);

/// The same accuracy over explicit graphs; n is taken from the node count.
double cycle_accuracy(const std::vector<RelationalHypergraph>& graphs, const ModelParams& model,
                      std::size_t* pairs = nullptr);

/// Trains on every source node of the given graphs against its designated
/// negative. Model shape comes from hypercycle_model_config(cfg).
ModelParams train_on_cycles(const std::vector<RelationalHypergraph>& graphs, const HyperCycleRunConfig& cfg,
                            std::vector<double>* epoch_loss = nullptr, std::ostream* log = nullptr);

/// Trains on the training graphs of the seeded suite and reports accuracy on
/// both halves. Writes one JSON line per epoch to `log` when non-null.
HyperCycleResult run_hypercycle(const HyperCycleRunConfig& cfg, std::ostream* log = nullptr);

nlohmann::json to_json(const HyperCycleRunConfig& cfg);

}  // namespace hcnet

#endif  // HCNET_SYNTH_EXPERIMENT_HPP
