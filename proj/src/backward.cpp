#include <algorithm>

#include "hcnet/model.hpp"
#include "model_internal.hpp"

namespace hcnet {

namespace {

ParamSet run_backward(const ForwardTrace& tr, const ModelParams& model, std::span<const double> dlogits,
                      const FeatureMap* dfinal) {
  if (tr.generation != model.params.generation())
    throw NnError(NnErrc::StaleTrace, "parameters changed since the forward pass");
  if (!tr.recorded) throw NnError(NnErrc::StaleTrace, "forward pass was not recorded");
  const auto& cfg = model.cfg;
  const auto& P = model.params;
  const std::size_t n = tr.final.n, d = model.d();
  const std::size_t R = static_cast<std::size_t>(cfg.relations);
  const RelationId q = tr.query.relation;
  ParamSet grads = P.zeros_like();
  auto G = [&](std::size_t idx) { return grads.mut(idx).ptr(); };
  double* dz = G(model.query) + static_cast<std::size_t>(q) * d;
  double* dpos = cfg.pe == PeKind::Learnable ? G(model.pos) : nullptr;

  FeatureMap dH(n, d);
  if (dfinal) {
    if (dfinal->n != n || dfinal->d != d) throw NnError(NnErrc::ShapeMismatch, "feature gradient has the wrong shape");
    dH = *dfinal;
  }

  // Decoder.
  if (dlogits.size() != tr.dec.logits.size())
    throw NnError(NnErrc::ShapeMismatch, "one logit gradient per scored candidate is required");
  const std::size_t in = model.decoder_input();
  const double* W1 = P[model.dec_W1].ptr();
  const double* w2 = P[model.dec_W2].ptr();
  double* dW1 = G(model.dec_W1);
  double* db1 = G(model.dec_b1);
  double* dW2 = G(model.dec_W2);
  double* db2 = G(model.dec_b2);
  std::vector<double> du(d), dx(in);
  for (std::size_t c = 0; c < dlogits.size(); ++c) {
    const double ds = dlogits[c];
    if (ds == 0.0) continue;
    const double* x = tr.dec.x.data() + c * in;
    const double* u = tr.dec.u.data() + c * d;
    db2[0] += ds;
    for (std::size_t k = 0; k < d; ++k) {
      dW2[k] += ds * (u[k] > 0.0 ? u[k] : 0.0);
      du[k] = u[k] > 0.0 ? ds * w2[k] : 0.0;
    }
    std::fill(dx.begin(), dx.end(), 0.0);
    for (std::size_t k = 0; k < d; ++k) {
      if (du[k] == 0.0) continue;
      db1[k] += du[k];
      const double* wrow = W1 + k * in;
      double* gw = dW1 + k * in;
      for (std::size_t i = 0; i < in; ++i) {
        gw[i] += du[k] * x[i];
        dx[i] += wrow[i] * du[k];
      }
    }
    const auto& tuple = tr.dec.tuples[c];
    for (std::size_t s = 0; s < tuple.size(); ++s) {
      double* dh = dH.row(tuple[s]);
      for (std::size_t k = 0; k < d; ++k) dh[k] += dx[s * d + k];
    }
    for (std::size_t k = 0; k < d; ++k) dz[k] += dx[in - d + k];
  }

  // Layers, last to first.
  const auto& graph = tr.view.graph();
  std::vector<double> dZ(d), dX(2 * d), x(2 * d), dxhat(d);
  std::vector<double> factors, prefix, suffix;
  for (std::size_t li = tr.layers.size(); li-- > 0;) {
    const LayerRecord& rec = tr.layers[li];
    const auto& L = model.layer[li];
    const FeatureMap& h = rec.input;
    const double alpha = P[L.alpha].data[0];
    const double* W = P[L.W].ptr();
    double* dW = G(L.W);
    double* db = G(L.b);
    double* dalpha = G(L.alpha);
    const std::vector<double> gates = detail::layer_gates(model, static_cast<int>(li), q);
    std::vector<double> dgates(R * d, 0.0);
    FeatureMap dIn(n, d);

    for (NodeId v = 0; v < n; ++v) {
      const double* dout = dH.row(v);
      if (cfg.skip)
        for (std::size_t k = 0; k < d; ++k) dIn.row(v)[k] += dout[k];
      const double* y = rec.act.row(v);
      for (std::size_t k = 0; k < d; ++k) {
        double g = dout[k];
        if (!rec.drop.empty()) g *= rec.drop[v * d + k];
        dZ[k] = y[k] > 0.0 ? g : 0.0;
      }
      if (cfg.layer_norm) {
        const double* xh = rec.xhat.row(v);
        const double* gam = P[L.ln_gamma].ptr();
        double* dgam = G(L.ln_gamma);
        double* dbet = G(L.ln_beta);
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          dgam[k] += dZ[k] * xh[k];
          dbet[k] += dZ[k];
          dxhat[k] = dZ[k] * gam[k];
          m1 += dxhat[k];
          m2 += dxhat[k] * xh[k];
        }
        m1 /= static_cast<double>(d);
        m2 /= static_cast<double>(d);
        for (std::size_t k = 0; k < d; ++k) dZ[k] = rec.rstd[v] * (dxhat[k] - m1 - xh[k] * m2);
      }
      std::copy(h.row(v), h.row(v) + d, x.begin());
      std::copy(rec.msg.row(v), rec.msg.row(v) + d, x.begin() + static_cast<std::ptrdiff_t>(d));
      std::fill(dX.begin(), dX.end(), 0.0);
      for (std::size_t r = 0; r < d; ++r) {
        if (dZ[r] == 0.0) continue;
        db[r] += dZ[r];
        const double* wrow = W + r * 2 * d;
        double* gw = dW + r * 2 * d;
        for (std::size_t c = 0; c < 2 * d; ++c) {
          gw[c] += dZ[r] * x[c];
          dX[c] += wrow[c] * dZ[r];
        }
      }
      for (std::size_t k = 0; k < d; ++k) dIn.row(v)[k] += dX[k];
      const double* dM = dX.data() + d;

      for (const auto& inc : graph.incidence(v)) {
        if (tr.view.is_masked(inc.edge)) continue;
        const HyperEdge& e = graph.edge(inc.edge);
        const std::size_t k_ar = e.nodes.size();
        // Factors f_j for j != i, then prefix/suffix products for the
        // leave-one-out derivative.
        std::vector<std::size_t> slots;
        for (std::size_t j = 0; j < k_ar; ++j)
          if (static_cast<int>(j) + 1 != inc.position) slots.push_back(j);
        const std::size_t m = slots.size();
        factors.assign(m * d, 0.0);
        for (std::size_t s = 0; s < m; ++s) {
          const double* hw = h.row(e.nodes[slots[s]]);
          const double* p = model.pe_row(static_cast<int>(slots[s]) + 1);
          for (std::size_t k = 0; k < d; ++k) factors[s * d + k] = alpha * hw[k] + (1.0 - alpha) * p[k];
        }
        prefix.assign((m + 1) * d, 1.0);
        suffix.assign((m + 1) * d, 1.0);
        for (std::size_t s = 0; s < m; ++s)
          for (std::size_t k = 0; k < d; ++k) prefix[(s + 1) * d + k] = prefix[s * d + k] * factors[s * d + k];
        for (std::size_t s = m; s-- > 0;)
          for (std::size_t k = 0; k < d; ++k) suffix[s * d + k] = suffix[(s + 1) * d + k] * factors[s * d + k];
        const double* prod = prefix.data() + m * d;
        const double* g = gates.data() + static_cast<std::size_t>(e.relation) * d;
        double* dg = dgates.data() + static_cast<std::size_t>(e.relation) * d;
        for (std::size_t k = 0; k < d; ++k) dg[k] += dM[k] * prod[k];
        for (std::size_t s = 0; s < m; ++s) {
          const NodeId w = e.nodes[slots[s]];
          const double* hw = h.row(w);
          const int pos = static_cast<int>(slots[s]) + 1;
          const double* p = model.pe_row(pos);
          double* dhw = dIn.row(w);
          double* dp = dpos ? dpos + static_cast<std::size_t>(pos - 1) * d : nullptr;
          double da = 0.0;
          for (std::size_t k = 0; k < d; ++k) {
            const double df = dM[k] * g[k] * prefix[s * d + k] * suffix[(s + 1) * d + k];
            dhw[k] += alpha * df;
            da += df * (hw[k] - p[k]);
            if (dp) dp[k] += (1.0 - alpha) * df;
          }
          dalpha[0] += da;
        }
      }
    }

    double* drel = G(L.rel);
    if (cfg.mode == MessageMode::QueryIndependent) {
      for (std::size_t i = 0; i < R * d; ++i) drel[i] += dgates[i];
    } else {
      const double* rel = P[L.rel].ptr();
      const double* z = model.z(q);
      for (std::size_t r = 0; r < R; ++r)
        for (std::size_t a = 0; a < d; ++a) {
          const double gda = dgates[r * d + a];
          if (gda == 0.0) continue;
          for (std::size_t b = 0; b < d; ++b) {
            drel[(r * d + a) * d + b] += gda * z[b];
            dz[b] += rel[(r * d + a) * d + b] * gda;
          }
        }
    }
    dH = std::move(dIn);
  }

  // Initialization.
  if (tr.kind == ModelKind::HCNet) {
    const auto variant = cfg.init;
    for (std::size_t idx = 0; idx < tr.query.given.size(); ++idx) {
      const double* dh = dH.row(tr.query.given[idx]);
      const int pos = tr.query.position_of(idx);
      const bool uses_p = variant == InitVariant::PZ || variant == InitVariant::POnly;
      const bool uses_z = variant == InitVariant::PZ || variant == InitVariant::ZOnly;
      for (std::size_t k = 0; k < d; ++k) {
        if (uses_z) dz[k] += dh[k];
        if (uses_p && dpos) dpos[static_cast<std::size_t>(pos - 1) * d + k] += dh[k];
      }
    }
  }
  return grads;
}

}  // namespace

ParamSet backward(const ForwardTrace& trace, const ModelParams& model, std::span<const double> dlogits) {
  return run_backward(trace, model, dlogits, nullptr);
}

ParamSet backward_features(const ForwardTrace& trace, const ModelParams& model, const FeatureMap& dfinal) {
  std::vector<double> none(trace.dec.logits.size(), 0.0);
  return run_backward(trace, model, none, &dfinal);
}

}  // namespace hcnet
