#include <algorithm>
#include <cmath>
#include <numeric>

#include "hcnet/model.hpp"
#include "model_internal.hpp"

namespace hcnet {

std::string to_string(ModelKind k) { return k == ModelKind::HCNet ? "hcnet" : "hrnet"; }
std::string to_string(MessageMode m) {
  return m == MessageMode::QueryDependent ? "query-dependent" : "query-independent";
}
std::string to_string(InitVariant v) {
  switch (v) {
    case InitVariant::PZ: return "p+z";
    case InitVariant::POnly: return "p";
    case InitVariant::ZOnly: return "z";
    case InitVariant::Ones: return "ones";
  }
  return "?";
}
std::string to_string(PeKind p) {
  switch (p) {
    case PeKind::Sinusoidal: return "sinusoidal";
    case PeKind::OneHot: return "one-hot";
    case PeKind::Constant: return "constant";
    case PeKind::Learnable: return "learnable";
  }
  return "?";
}

namespace {
[[noreturn]] void bad_enum(const std::string& what, const std::string& s) {
  throw std::invalid_argument("unknown " + what + " '" + s + "'");
}
}  // namespace

ModelKind parse_model_kind(const std::string& s) {
  if (s == "hcnet") return ModelKind::HCNet;
  if (s == "hrnet") return ModelKind::HRNet;
  bad_enum("model kind", s);
}
MessageMode parse_message_mode(const std::string& s) {
  if (s == "query-dependent") return MessageMode::QueryDependent;
  if (s == "query-independent") return MessageMode::QueryIndependent;
  bad_enum("message mode", s);
}
InitVariant parse_init_variant(const std::string& s) {
  for (auto v : {InitVariant::PZ, InitVariant::POnly, InitVariant::ZOnly, InitVariant::Ones})
    if (to_string(v) == s) return v;
  bad_enum("init variant", s);
}
PeKind parse_pe_kind(const std::string& s) {
  for (auto p : {PeKind::Sinusoidal, PeKind::OneHot, PeKind::Constant, PeKind::Learnable})
    if (to_string(p) == s) return p;
  bad_enum("positional encoding", s);
}

std::vector<double> positional_encoding(PeKind kind, int i, int d) {
  if (d < 1) throw NnError(NnErrc::DimensionTooSmall, "width must be positive");
  std::vector<double> p(static_cast<std::size_t>(d), 0.0);
  switch (kind) {
    case PeKind::Sinusoidal:
      if (d % 2 != 0) throw NnError(NnErrc::DimensionTooSmall, "sinusoidal encoding needs an even width");
      for (int j = 0; 2 * j < d; ++j) {
        const double angle = i / std::pow(10000.0, 2.0 * j / d);
        p[static_cast<std::size_t>(2 * j)] = std::sin(angle);
        p[static_cast<std::size_t>(2 * j + 1)] = std::cos(angle);
      }
      break;
    case PeKind::OneHot:
      if (i < 1 || i > d)
        throw NnError(NnErrc::DimensionTooSmall,
                      "one-hot position " + std::to_string(i) + " needs width >= " + std::to_string(i));
      p[static_cast<std::size_t>(i - 1)] = 1.0;
      break;
    case PeKind::Constant:
      std::fill(p.begin(), p.end(), 1.0);
      break;
    case PeKind::Learnable:
      throw NnError(NnErrc::UnknownTensor, "learnable encodings live in the parameter table");
  }
  return p;
}

const double* ModelParams::pe_row(int j) const {
  if (j < 1 || j > cfg.max_arity)
    throw NnError(NnErrc::ShapeMismatch, "position " + std::to_string(j) + " beyond the positional table");
  const std::size_t off = static_cast<std::size_t>(j - 1) * d();
  return cfg.pe == PeKind::Learnable ? params[pos].ptr() + off : fixed_pe.data() + off;
}

std::size_t ModelParams::decoder_input() const {
  return cfg.kind == ModelKind::HCNet ? 2 * d() : static_cast<std::size_t>(cfg.max_arity + 1) * d();
}

void rebind(ModelParams& m) {
  const auto& cfg = m.cfg;
  const auto& P = m.params;
  m.layer.clear();
  for (int l = 0; l < cfg.layers; ++l) {
    const std::string pre = "layer" + std::to_string(l) + ".";
    ModelParams::Layer L{P.index(pre + "W"), P.index(pre + "b"), P.index(pre + "alpha"), P.index(pre + "rel")};
    if (cfg.layer_norm) {
      L.ln_gamma = P.index(pre + "ln_gamma");
      L.ln_beta = P.index(pre + "ln_beta");
    }
    m.layer.push_back(L);
  }
  m.query = P.index("query");
  if (cfg.pe == PeKind::Learnable) m.pos = P.index("pos");
  m.dec_W1 = P.index("dec.W1");
  m.dec_b1 = P.index("dec.b1");
  m.dec_W2 = P.index("dec.W2");
  m.dec_b2 = P.index("dec.b2");
  m.fixed_pe.clear();
  if (cfg.pe != PeKind::Learnable) {
    if (cfg.pe == PeKind::OneHot && cfg.hidden < cfg.max_arity)
      throw NnError(NnErrc::DimensionTooSmall, "one-hot encoding needs width >= max arity " +
                                                   std::to_string(cfg.max_arity));
    for (int j = 1; j <= cfg.max_arity; ++j) {
      auto p = positional_encoding(cfg.pe, j, cfg.hidden);
      m.fixed_pe.insert(m.fixed_pe.end(), p.begin(), p.end());
    }
  }
}

ModelParams init_model(const ModelConfig& config, std::uint64_t seed) {
  ModelParams m;
  m.cfg = config;
  auto& cfg = m.cfg;
  if (cfg.kind == ModelKind::HRNet) cfg.mode = MessageMode::QueryIndependent;
  if (cfg.hidden < 1 || cfg.layers < 0 || cfg.relations < 1 || cfg.max_arity < 1)
    throw NnError(NnErrc::ShapeMismatch, "model config needs hidden, relations and max_arity >= 1");
  const std::size_t d = m.d();
  const std::size_t R = static_cast<std::size_t>(cfg.relations);
  auto& P = m.params;
  for (int l = 0; l < cfg.layers; ++l) {
    const std::string pre = "layer" + std::to_string(l) + ".";
    P.add(pre + "W", {d, 2 * d});
    P.add(pre + "b", {d});
    P.add(pre + "alpha", {1});
    if (cfg.mode == MessageMode::QueryDependent) P.add(pre + "rel", {R, d, d});
    else P.add(pre + "rel", {R, d});
    if (cfg.layer_norm) {
      P.add(pre + "ln_gamma", {d});
      P.add(pre + "ln_beta", {d});
    }
  }
  P.add("query", {R, d});
  if (cfg.pe == PeKind::Learnable) P.add("pos", {static_cast<std::size_t>(cfg.max_arity), d});
  const std::size_t in = cfg.kind == ModelKind::HCNet ? 2 * d : static_cast<std::size_t>(cfg.max_arity + 1) * d;
  P.add("dec.W1", {d, in});
  P.add("dec.b1", {d});
  P.add("dec.W2", {1, d});
  P.add("dec.b2", {1});

  std::mt19937_64 rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(d));
  std::uniform_real_distribution<double> uni(-bound, bound);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < P.size(); ++i) {
    const std::string& name = P.name(i);
    auto& t = P.mut(i);
    if (name.ends_with(".alpha")) {
      t.data[0] = 0.5;
    } else if (name.ends_with("ln_gamma")) {
      std::fill(t.data.begin(), t.data.end(), 1.0);
    } else if (name == "query" || name == "pos") {
      for (auto& x : t.data) x = normal(rng) * bound;
    } else if (t.shape.size() >= 2 || name.ends_with(".rel")) {
      for (auto& x : t.data) x = uni(rng);
    }
  }
  rebind(m);
  return m;
}

std::vector<char> ForwardTrace::activation_pattern() const {
  std::vector<char> out;
  for (const auto& L : layers)
    for (double y : L.act.data) out.push_back(y > 0.0);
  for (double u : dec.u) out.push_back(u > 0.0);
  return out;
}

namespace detail {

void check_graph(const RelationalHypergraph& graph, const ModelParams& model) {
  if (static_cast<int>(graph.relation_count()) > model.cfg.relations)
    throw NnError(NnErrc::ShapeMismatch, "graph has more relations than the model embeds");
  if (graph.max_arity() > model.cfg.max_arity)
    throw NnError(NnErrc::ShapeMismatch, "graph arity " + std::to_string(graph.max_arity()) +
                                             " exceeds the positional table");
}

void check_query(const RelationalHypergraph& graph, const Query& query, const ModelParams& model) {
  if (query.relation >= static_cast<RelationId>(model.cfg.relations))
    throw NnError(NnErrc::QueryArityMismatch, "query relation outside the model");
  try {
    validate_query(graph, query);
  } catch (const GraphError& e) {
    throw NnError(NnErrc::QueryArityMismatch, e.what());
  }
}

std::vector<double> layer_gates(const ModelParams& model, int layer, RelationId q) {
  const std::size_t d = model.d();
  const std::size_t R = static_cast<std::size_t>(model.cfg.relations);
  const Tensor& rel = model.params[model.layer[static_cast<std::size_t>(layer)].rel];
  std::vector<double> g(R * d);
  if (model.cfg.mode == MessageMode::QueryIndependent) {
    std::copy(rel.data.begin(), rel.data.end(), g.begin());
  } else {
    const double* z = model.z(q);
    for (std::size_t r = 0; r < R; ++r) affine(rel.ptr() + r * d * d, nullptr, z, g.data() + r * d, d, d);
  }
  return g;
}

}  // namespace detail

namespace {

// Messages into v, summed in lexicographic order of the message vectors so
// that nodes with equal message multisets get bitwise-equal sums.
void aggregate(const GraphView& view, NodeId v, const FeatureMap& h, const ModelParams& model,
               const std::vector<double>& gates, double alpha, double* out,
               std::vector<double>& buf, std::vector<std::uint32_t>& order,
               std::vector<std::uint64_t>* counter) {
  const std::size_t d = model.d();
  const auto& graph = view.graph();
  buf.clear();
  std::size_t count = 0;
  for (const auto& inc : graph.incidence(v)) {
    if (view.is_masked(inc.edge)) continue;
    if (counter) ++(*counter)[inc.edge];
    const HyperEdge& e = graph.edge(inc.edge);
    buf.resize((count + 1) * d);
    double* m = buf.data() + count * d;
    std::fill(m, m + d, 1.0);
    for (std::size_t j = 0; j < e.nodes.size(); ++j) {
      if (static_cast<int>(j) + 1 == inc.position) continue;
      const double* hw = h.row(e.nodes[j]);
      const double* p = model.pe_row(static_cast<int>(j) + 1);
      for (std::size_t k = 0; k < d; ++k) m[k] *= alpha * hw[k] + (1.0 - alpha) * p[k];
    }
    const double* g = gates.data() + static_cast<std::size_t>(e.relation) * d;
    for (std::size_t k = 0; k < d; ++k) m[k] *= g[k];
    ++count;
  }
  order.resize(count);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return std::lexicographical_compare(buf.begin() + a * d, buf.begin() + (a + 1) * d, buf.begin() + b * d,
                                        buf.begin() + (b + 1) * d);
  });
  std::fill(out, out + d, 0.0);
  for (std::uint32_t idx : order)
    for (std::size_t k = 0; k < d; ++k) out[k] += buf[idx * d + k];
}

FeatureMap run_layer(const GraphView& view, const Query& query, const FeatureMap& h, const ModelParams& model,
                     int l, LayerRecord* rec, const ForwardOptions& opts) {
  const std::size_t n = h.n, d = model.d();
  if (h.d != d || n != view.graph().node_count())
    throw NnError(NnErrc::ShapeMismatch, "feature map shape does not match graph and width");
  const auto& L = model.layer[static_cast<std::size_t>(l)];
  const auto& cfg = model.cfg;
  const std::vector<double> gates = detail::layer_gates(model, l, query.relation);
  const double alpha = model.params[L.alpha].data[0];
  const double* W = model.params[L.W].ptr();
  const double* b = model.params[L.b].ptr();

  FeatureMap msg(n, d), pre(n, d), act(n, d), out(n, d);
  FeatureMap xhat;
  std::vector<double> rstd;
  if (cfg.layer_norm) {
    xhat = FeatureMap(n, d);
    rstd.assign(n, 0.0);
  }
  std::vector<double> drop;
  const bool dropout = opts.training && cfg.dropout > 0.0;
  if (dropout) {
    if (!opts.rng) throw NnError(NnErrc::ShapeMismatch, "dropout needs an rng");
    drop.resize(n * d);
    std::bernoulli_distribution keep(1.0 - cfg.dropout);
    for (auto& x : drop) x = keep(*opts.rng) ? 1.0 / (1.0 - cfg.dropout) : 0.0;
  }

  std::vector<double> buf, x(2 * d);
  std::vector<std::uint32_t> order;
  for (NodeId v = 0; v < n; ++v) {
    aggregate(view, v, h, model, gates, alpha, msg.row(v), buf, order, opts.edge_message_count);
    std::copy(h.row(v), h.row(v) + d, x.begin());
    std::copy(msg.row(v), msg.row(v) + d, x.begin() + static_cast<std::ptrdiff_t>(d));
    double* z = pre.row(v);
    detail::affine(W, b, x.data(), z, d, 2 * d);
    double* y = act.row(v);
    if (cfg.layer_norm) {
      double mean = 0.0;
      for (std::size_t k = 0; k < d; ++k) mean += z[k];
      mean /= static_cast<double>(d);
      double var = 0.0;
      for (std::size_t k = 0; k < d; ++k) var += (z[k] - mean) * (z[k] - mean);
      var /= static_cast<double>(d);
      const double rs = 1.0 / std::sqrt(var + cfg.ln_eps);
      rstd[v] = rs;
      const double* gam = model.params[L.ln_gamma].ptr();
      const double* bet = model.params[L.ln_beta].ptr();
      double* xh = xhat.row(v);
      for (std::size_t k = 0; k < d; ++k) {
        xh[k] = (z[k] - mean) * rs;
        y[k] = gam[k] * xh[k] + bet[k];
      }
    } else {
      std::copy(z, z + d, y);
    }
    double* o = out.row(v);
    for (std::size_t k = 0; k < d; ++k) {
      double a = y[k] > 0.0 ? y[k] : 0.0;
      if (dropout) a *= drop[v * d + k];
      o[k] = cfg.skip ? a + h.row(v)[k] : a;
    }
  }
  if (rec) {
    rec->input = h;
    rec->msg = std::move(msg);
    rec->pre = std::move(pre);
    rec->xhat = std::move(xhat);
    rec->rstd = std::move(rstd);
    rec->act = std::move(act);
    rec->drop = std::move(drop);
  }
  return out;
}

ForwardTrace run_stack(const GraphView& view, const Query& query, const ModelParams& model,
                       const ForwardOptions& opts, FeatureMap h0, ModelKind kind) {
  ForwardTrace tr(view);
  tr.kind = kind;
  tr.query = query;
  tr.generation = model.params.generation();
  tr.recorded = opts.record;
  const int L = opts.layers < 0 ? model.cfg.layers : opts.layers;
  if (L > model.cfg.layers) throw NnError(NnErrc::ShapeMismatch, "more layers requested than the model has");
  FeatureMap h = std::move(h0);
  if (opts.record) tr.init = h;
  for (int l = 0; l < L; ++l) {
    LayerRecord rec;
    FeatureMap next = run_layer(view, query, h, model, l, opts.record ? &rec : nullptr, opts);
    if (!next.all_finite()) throw NnError(NnErrc::NonFinite, "non-finite features after layer " + std::to_string(l));
    if (opts.record) tr.layers.push_back(std::move(rec));
    h = std::move(next);
  }
  tr.final = std::move(h);
  return tr;
}

}  // namespace

FeatureMap hcnet_init(const RelationalHypergraph& graph, const Query& query, const ModelParams& model,
                      InitVariant variant) {
  detail::check_query(graph, query, model);
  const std::size_t d = model.d();
  FeatureMap h(graph.node_count(), d);
  const double* z = model.z(query.relation);
  for (std::size_t idx = 0; idx < query.given.size(); ++idx) {
    double* row = h.row(query.given[idx]);
    const double* p = model.pe_row(query.position_of(idx));
    for (std::size_t k = 0; k < d; ++k) {
      switch (variant) {
        case InitVariant::PZ: row[k] += p[k] + z[k]; break;
        case InitVariant::POnly: row[k] += p[k]; break;
        case InitVariant::ZOnly: row[k] += z[k]; break;
        case InitVariant::Ones: row[k] = 1.0; break;
      }
    }
  }
  return h;
}

FeatureMap hcnet_layer(const GraphView& view, const Query& query, const FeatureMap& h,
                       const ModelParams& model, int layer) {
  detail::check_graph(view.graph(), model);
  if (layer < 0 || layer >= model.cfg.layers) throw NnError(NnErrc::ShapeMismatch, "layer index out of range");
  return run_layer(view, query, h, model, layer, nullptr, {});
}

ForwardTrace hcnet_forward(const GraphView& view, const Query& query, const ModelParams& model,
                           const ForwardOptions& opts) {
  detail::check_graph(view.graph(), model);
  return run_stack(view, query, model, opts, hcnet_init(view.graph(), query, model, model.cfg.init),
                   ModelKind::HCNet);
}

ForwardTrace hrnet_forward(const GraphView& view, const Query& query, const ModelParams& model,
                           const ForwardOptions& opts) {
  detail::check_graph(view.graph(), model);
  detail::check_query(view.graph(), query, model);
  return run_stack(view, query, model, opts, FeatureMap(view.graph().node_count(), model.d(), 1.0),
                   ModelKind::HRNet);
}

ForwardTrace encode(const GraphView& view, const Query& query, const ModelParams& model,
                    const ForwardOptions& opts) {
  return model.cfg.kind == ModelKind::HCNet ? hcnet_forward(view, query, model, opts)
                                            : hrnet_forward(view, query, model, opts);
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

double decoder_forward(const double* x, const ModelParams& model, double* u_out) {
  const std::size_t d = model.d(), in = model.decoder_input();
  std::vector<double> u(d);
  detail::affine(model.params[model.dec_W1].ptr(), model.params[model.dec_b1].ptr(), x, u.data(), d, in);
  const double* w2 = model.params[model.dec_W2].ptr();
  double s = model.params[model.dec_b2].data[0];
  // Accumulate the dot product before adding the bias, matching affine().
  double dot = 0.0;
  for (std::size_t k = 0; k < d; ++k) dot += w2[k] * (u[k] > 0.0 ? u[k] : 0.0);
  s += dot;
  if (u_out) std::copy(u.begin(), u.end(), u_out);
  return s;
}

void build_input(const ForwardTrace& tr, const ModelParams& model, const std::vector<NodeId>& tuple, double* x) {
  const std::size_t d = model.d(), in = model.decoder_input();
  std::fill(x, x + in, 0.0);
  for (std::size_t s = 0; s < tuple.size(); ++s) std::copy(tr.final.row(tuple[s]), tr.final.row(tuple[s]) + d, x + s * d);
  const double* z = model.z(tr.query.relation);
  std::copy(z, z + d, x + in - d);
}

}  // namespace

double decoder_logit(std::span<const double> x, const ModelParams& model) {
  if (x.size() != model.decoder_input()) throw NnError(NnErrc::ShapeMismatch, "decoder input has the wrong width");
  return decoder_forward(x.data(), model, nullptr);
}

double decode_unary(std::span<const double> h_v, std::span<const double> z_q, const ModelParams& model) {
  const std::size_t d = model.d();
  if (model.cfg.kind != ModelKind::HCNet || h_v.size() != d || z_q.size() != d)
    throw NnError(NnErrc::ShapeMismatch, "unary decoder expects [h_v || z_q] of width 2d");
  std::vector<double> x(h_v.begin(), h_v.end());
  x.insert(x.end(), z_q.begin(), z_q.end());
  return sigmoid(decoder_forward(x.data(), model, nullptr));
}

double decode_kary(const std::vector<std::span<const double>>& hs, std::span<const double> z_q,
                   const ModelParams& model) {
  const std::size_t d = model.d();
  if (model.cfg.kind != ModelKind::HRNet || z_q.size() != d || hs.size() > static_cast<std::size_t>(model.cfg.max_arity))
    throw NnError(NnErrc::ShapeMismatch, "k-ary decoder expects at most max_arity features and z_q");
  std::vector<double> x(model.decoder_input(), 0.0);
  for (std::size_t s = 0; s < hs.size(); ++s) {
    if (hs[s].size() != d) throw NnError(NnErrc::ShapeMismatch, "feature width differs from d");
    std::copy(hs[s].begin(), hs[s].end(), x.begin() + static_cast<std::ptrdiff_t>(s * d));
  }
  std::copy(z_q.begin(), z_q.end(), x.end() - static_cast<std::ptrdiff_t>(d));
  return sigmoid(decoder_forward(x.data(), model, nullptr));
}

std::vector<double> score_candidates(ForwardTrace& tr, const ModelParams& model, std::span<const NodeId> candidates) {
  if (tr.generation != model.params.generation())
    throw NnError(NnErrc::StaleTrace, "parameters changed since the forward pass");
  const std::size_t d = model.d(), in = model.decoder_input();
  std::vector<double> logits;
  logits.reserve(candidates.size());
  std::vector<double> x(in), u(d);
  for (NodeId c : candidates) {
    if (c >= tr.final.n) throw NnError(NnErrc::ShapeMismatch, "candidate node out of range");
    std::vector<NodeId> tuple = tr.kind == ModelKind::HCNet ? std::vector<NodeId>{c} : tr.query.complete(c);
    build_input(tr, model, tuple, x.data());
    const double s = decoder_forward(x.data(), model, u.data());
    logits.push_back(s);
    if (tr.recorded) {
      tr.dec.tuples.push_back(std::move(tuple));
      tr.dec.x.insert(tr.dec.x.end(), x.begin(), x.end());
      tr.dec.u.insert(tr.dec.u.end(), u.begin(), u.end());
      tr.dec.logits.push_back(s);
    }
  }
  return logits;
}

std::vector<double> score_all(ForwardTrace& tr, const ModelParams& model) {
  std::vector<NodeId> all(tr.final.n);
  std::iota(all.begin(), all.end(), 0u);
  return score_candidates(tr, model, all);
}

std::vector<ColorId> feature_partition(const FeatureMap& h) {
  std::vector<std::uint32_t> order(h.n);
  std::iota(order.begin(), order.end(), 0u);
  auto less = [&](std::uint32_t a, std::uint32_t b) {
    return std::lexicographical_compare(h.row(a), h.row(a) + h.d, h.row(b), h.row(b) + h.d);
  };
  std::sort(order.begin(), order.end(), less);
  std::vector<ColorId> out(h.n);
  ColorId next = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i > 0 && less(order[i - 1], order[i])) ++next;
    out[order[i]] = next;
  }
  return out;
}

std::vector<FeatureMap> layer_features(const ForwardTrace& tr) {
  if (!tr.recorded) throw NnError(NnErrc::StaleTrace, "forward pass was not recorded");
  std::vector<FeatureMap> out;
  for (const auto& L : tr.layers) out.push_back(L.input);
  out.push_back(tr.final);
  return out;
}

}  // namespace hcnet
