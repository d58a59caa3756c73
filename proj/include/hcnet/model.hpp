#ifndef HCNET_MODEL_HPP
#define HCNET_MODEL_HPP

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hcnet/hypergraph.hpp"
#include "hcnet/tensor.hpp"

namespace hcnet {

enum class ModelKind { HCNet, HRNet };
/// g = Diag(W_r z_q) or g = Diag(w_r).
enum class MessageMode { QueryDependent, QueryIndependent };
/// Source-node initialization: p_i + z_q, p_i only, z_q only, or all-ones.
enum class InitVariant { PZ, POnly, ZOnly, Ones };
enum class PeKind { Sinusoidal, OneHot, Constant, Learnable };

std::string to_string(ModelKind k);
std::string to_string(MessageMode m);
std::string to_string(InitVariant v);
std::string to_string(PeKind p);
ModelKind parse_model_kind(const std::string& s);
MessageMode parse_message_mode(const std::string& s);
InitVariant parse_init_variant(const std::string& s);
PeKind parse_pe_kind(const std::string& s);

struct ModelConfig {
  ModelKind kind = ModelKind::HCNet;
  int hidden = 32;
  int layers = 6;
  int relations = 0;  // number of relation ids the model can embed
  int max_arity = 0;  // positions covered by the positional table
  MessageMode mode = MessageMode::QueryDependent;
  InitVariant init = InitVariant::PZ;
  PeKind pe = PeKind::Sinusoidal;
  bool layer_norm = true;
  bool skip = true;
  double dropout = 0.0;
  double ln_eps = 1e-5;
};

/// Parameters plus cached tensor indices.
struct ModelParams {
  ModelConfig cfg;
  ParamSet params;

  struct Layer {
    std::size_t W, b, alpha, rel, ln_gamma = 0, ln_beta = 0;
  };
  std::vector<Layer> layer;
  std::size_t query = 0;
  std::size_t pos = 0;  // learnable table; unused otherwise
  std::size_t dec_W1 = 0, dec_b1 = 0, dec_W2 = 0, dec_b2 = 0;
  /// Fixed positional table (max_arity x d) for non-learnable kinds.
  std::vector<double> fixed_pe;

  std::size_t d() const { return static_cast<std::size_t>(cfg.hidden); }
  /// p_j for 1 <= j <= max_arity.
  const double* pe_row(int j) const;
  const double* z(RelationId q) const { return params[query].ptr() + static_cast<std::size_t>(q) * d(); }
  std::size_t decoder_input() const;
};

/// Builds the parameter layout and initializes it: matrices and w_r uniform
/// in [-1/sqrt(d), 1/sqrt(d)], biases zero, alpha 0.5, layer-norm gain one,
/// z_q and the learnable table standard normal / sqrt(d).
ModelParams init_model(const ModelConfig& cfg, std::uint64_t seed);

/// Recomputes index caches and the fixed table after params were replaced.
void rebind(ModelParams& model);

/// p_i for the fixed kinds. Learnable has no closed form and throws.
std::vector<double> positional_encoding(PeKind kind, int i, int d);

struct LayerRecord {
  FeatureMap input;
  FeatureMap msg;
  FeatureMap pre;   // W [h || m] + b
  FeatureMap xhat;  // normalized pre when layer norm is on
  std::vector<double> rstd;
  FeatureMap act;   // input to ReLU
  std::vector<double> drop;  // per-entry dropout scale, empty when off
};

struct DecoderRecord {
  std::vector<std::vector<NodeId>> tuples;  // one node for unary decoding
  std::vector<double> x;  // inputs, one row per tuple
  std::vector<double> u;  // hidden pre-activations
  std::vector<double> logits;
};

/// Everything backward needs. Replaying forward from the recorded inputs
/// reproduces the stored outputs bitwise.
struct ForwardTrace {
  ModelKind kind = ModelKind::HCNet;
  GraphView view;
  Query query;
  std::uint64_t generation = 0;
  bool recorded = false;
  std::vector<LayerRecord> layers;
  FeatureMap init;
  FeatureMap final;
  DecoderRecord dec;

  explicit ForwardTrace(GraphView v) : view(std::move(v)) {}
  /// Signs of every ReLU input, for kink detection in gradient checks.
  std::vector<char> activation_pattern() const;
};

struct ForwardOptions {
  bool record = false;
  bool training = false;  // enables dropout
  std::mt19937_64* rng = nullptr;
  int layers = -1;        // -1: cfg.layers
  /// Counts message computations per edge id when non-null.
  std::vector<std::uint64_t>* edge_message_count = nullptr;
};

/// h0_v = sum over given positions i with u_i = v of (p_i + z_q), per variant.
FeatureMap hcnet_init(const RelationalHypergraph& graph, const Query& query, const ModelParams& model,
                      InitVariant variant);

/// One message-passing layer over the visible edges.
FeatureMap hcnet_layer(const GraphView& view, const Query& query, const FeatureMap& h,
                       const ModelParams& model, int layer);

ForwardTrace hcnet_forward(const GraphView& view, const Query& query, const ModelParams& model,
                           const ForwardOptions& opts = {});
/// All-ones init; the query only selects z_q for decoding.
ForwardTrace hrnet_forward(const GraphView& view, const Query& query, const ModelParams& model,
                           const ForwardOptions& opts = {});
/// Dispatches on model.cfg.kind.
ForwardTrace encode(const GraphView& view, const Query& query, const ModelParams& model,
                    const ForwardOptions& opts = {});

/// Logit of the 2-layer decoder on an explicit input vector.
double decoder_logit(std::span<const double> x, const ModelParams& model);
double sigmoid(double x);
/// Probability over [h_v || z_q].
double decode_unary(std::span<const double> h_v, std::span<const double> z_q, const ModelParams& model);
/// Probability over [h_u1 || ... || h_uk || 0 || z_q], zero padded to max_arity slots.
double decode_kary(const std::vector<std::span<const double>>& hs, std::span<const double> z_q,
                   const ModelParams& model);

/// Logits for the candidates of the trace's query: unary for HCNet (each
/// candidate scored from its own feature), k-ary for HRNet (candidate placed
/// at the target slot). Recorded for backward when the trace is.
std::vector<double> score_candidates(ForwardTrace& trace, const ModelParams& model,
                                     std::span<const NodeId> candidates);
/// Logits for every node as candidate.
std::vector<double> score_all(ForwardTrace& trace, const ModelParams& model);

/// Partition of nodes by exact equality of feature rows; ids follow the
/// lexicographic order of the rows.
std::vector<ColorId> feature_partition(const FeatureMap& h);
/// h^0 .. h^L of a recorded trace.
std::vector<FeatureMap> layer_features(const ForwardTrace& trace);

/// Gradients of sum_c dlogits[c] * logit_c with respect to every parameter.
/// Throws NnError{StaleTrace} when params changed since the forward pass.
ParamSet backward(const ForwardTrace& trace, const ModelParams& model, std::span<const double> dlogits);
/// Same, but seeded with a gradient on the final features instead.
ParamSet backward_features(const ForwardTrace& trace, const ModelParams& model, const FeatureMap& dfinal);

}  // namespace hcnet

#endif  // HCNET_MODEL_HPP
