#ifndef HCNET_GRADCHECK_HPP
#define HCNET_GRADCHECK_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hcnet/model.hpp"

namespace hcnet {

struct GradCheckOptions {
  double eps = 1e-5;
  /// Scalars checked per tensor; 0 checks every entry.
  std::size_t per_tensor = 0;
  std::uint64_t seed = 0;
  /// Denominator floor for the relative error, so that entries whose
  /// gradient is numerically zero compare on an absolute scale.
  double floor = 1e-5;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_tensor;
  std::size_t checked = 0;
  std::size_t skipped_kinks = 0;
  std::vector<std::pair<std::string, double>> per_tensor;
};

/// Adds uniform noise in [-scale, scale] to every parameter. Moves a fresh
/// model off the zero-bias point where constant layer-norm inputs make the
/// loss too curved for finite differences.
void jitter_parameters(ModelParams& model, std::uint64_t seed, double scale);

/// Scalar loss used by the check: sum over all nodes c of softplus(y_c s_c)
/// with fixed pseudo-random signs y_c drawn from the seed.
double probe_loss(const GraphView& view, const Query& query, const ModelParams& model, std::uint64_t seed,
                  std::vector<double>* dlogits = nullptr, std::vector<char>* pattern = nullptr,
                  ParamSet* grads = nullptr);

/// Backward against central differences. Entries where a ReLU input changes
/// sign between the two probes are skipped and counted.
GradCheckReport grad_check(const GraphView& view, const Query& query, const ModelParams& model,
                           const GradCheckOptions& opts = {});

}  // namespace hcnet

#endif  // HCNET_GRADCHECK_HPP
