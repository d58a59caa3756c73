#ifndef HCNET_MODEL_INTERNAL_HPP
#define HCNET_MODEL_INTERNAL_HPP

#include <vector>

#include "hcnet/model.hpp"

namespace hcnet::detail {

/// Per-relation gate vectors g_r (R x d) for one layer.
std::vector<double> layer_gates(const ModelParams& model, int layer, RelationId query_relation);

void check_graph(const RelationalHypergraph& graph, const ModelParams& model);
void check_query(const RelationalHypergraph& graph, const Query& query, const ModelParams& model);

/// Row-major y = W x + b for W of shape rows x cols; accumulation in column order.
inline void affine(const double* W, const double* b, const double* x, double* y, std::size_t rows,
                   std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* w = W + r * cols;
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += w[c] * x[c];
    y[r] = s + (b ? b[r] : 0.0);
  }
}

}  // namespace hcnet::detail

#endif  // HCNET_MODEL_INTERNAL_HPP
