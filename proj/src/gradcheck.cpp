#include "hcnet/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace hcnet {

namespace {

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

}  // namespace

void jitter_parameters(ModelParams& model, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(-scale, scale);
  for (std::size_t i = 0; i < model.params.size(); ++i)
    for (auto& x : model.params.mut(i).data) x += noise(rng);
}

double probe_loss(const GraphView& view, const Query& query, const ModelParams& model, std::uint64_t seed,
                  std::vector<double>* dlogits, std::vector<char>* pattern, ParamSet* grads) {
  ForwardOptions fo;
  fo.record = pattern != nullptr || grads != nullptr;
  ForwardTrace tr = encode(view, query, model, fo);
  const std::vector<double> s = score_all(tr, model);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  double loss = 0.0;
  std::vector<double> ds(s.size());
  for (std::size_t c = 0; c < s.size(); ++c) {
    const double y = coin(rng) ? 1.0 : -1.0;
    loss += softplus(y * s[c]);
    ds[c] = y * sigmoid(y * s[c]);
  }
  if (pattern) *pattern = tr.activation_pattern();
  if (grads) *grads = backward(tr, model, ds);
  if (dlogits) *dlogits = std::move(ds);
  return loss;
}

GradCheckReport grad_check(const GraphView& view, const Query& query, const ModelParams& model,
                           const GradCheckOptions& opts) {
  GradCheckReport rep;
  ParamSet grads;
  probe_loss(view, query, model, opts.seed, nullptr, nullptr, &grads);
  ModelParams probe = model;
  std::mt19937_64 pick(opts.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<char> plus_pat, minus_pat;
  for (std::size_t t = 0; t < model.params.size(); ++t) {
    const std::size_t size = model.params[t].size();
    std::vector<std::size_t> idx(size);
    std::iota(idx.begin(), idx.end(), 0);
    if (opts.per_tensor > 0 && opts.per_tensor < size) {
      std::shuffle(idx.begin(), idx.end(), pick);
      idx.resize(opts.per_tensor);
      std::sort(idx.begin(), idx.end());
    }
    double worst = 0.0;
    for (std::size_t k : idx) {
      const double orig = model.params[t].data[k];
      probe.params.mut(t).data[k] = orig + opts.eps;
      const double lp = probe_loss(view, query, probe, opts.seed, nullptr, &plus_pat);
      probe.params.mut(t).data[k] = orig - opts.eps;
      const double lm = probe_loss(view, query, probe, opts.seed, nullptr, &minus_pat);
      probe.params.mut(t).data[k] = orig;
      if (plus_pat != minus_pat) {
        ++rep.skipped_kinks;
        continue;
      }
      const double numeric = (lp - lm) / (2.0 * opts.eps);
      const double analytic = grads[t].data[k];
      const double denom = std::max({std::abs(numeric), std::abs(analytic), opts.floor});
      worst = std::max(worst, std::abs(numeric - analytic) / denom);
      ++rep.checked;
    }
    rep.per_tensor.emplace_back(model.params.name(t), worst);
    if (worst >= rep.max_rel_error) {
      if (worst > rep.max_rel_error || rep.worst_tensor.empty()) rep.worst_tensor = model.params.name(t);
      rep.max_rel_error = worst;
    }
  }
  return rep;
}

}  // namespace hcnet
