#include "hcnet/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>
#include <thread>

namespace hcnet {

namespace {

[[noreturn]] void bad_config(const std::string& msg) { throw TrainError(TrainErrc::InvalidConfig, msg); }

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void validate(const TrainConfig& c) {
  if (c.hidden < 1) bad_config("hidden must be >= 1");
  if (c.layers < 0) bad_config("layers must be >= 0");
  if (!(c.lr > 0)) bad_config("lr must be positive");
  if (c.batch_size < 1) bad_config("batch_size must be >= 1");
  if (c.negatives < 1) bad_config("negatives must be >= 1");
  if (!(c.adv_temperature > 0)) bad_config("adv_temperature must be positive");
  if (c.epochs < 0) bad_config("epochs must be >= 0");
  if (c.dropout < 0 || c.dropout >= 1) bad_config("dropout must lie in [0, 1)");
  if (c.accumulation < 1) bad_config("accumulation must be >= 1");
  if (c.steps_per_epoch < 0) bad_config("steps_per_epoch must be >= 0");
  if (c.threads < 1) bad_config("threads must be >= 1");
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) bad_config("train config must be an object");
  TrainConfig c;
  try {
    for (const auto& [key, val] : j.items()) {
      if (key == "model") c.model = parse_model_kind(val.get<std::string>());
      else if (key == "hidden") c.hidden = val.get<int>();
      else if (key == "layers") c.layers = val.get<int>();
      else if (key == "lr") c.lr = val.get<double>();
      else if (key == "batch_size") c.batch_size = val.get<int>();
      else if (key == "negatives") c.negatives = val.get<int>();
      else if (key == "adv_temperature") c.adv_temperature = val.get<double>();
      else if (key == "epochs") c.epochs = val.get<int>();
      else if (key == "dropout") c.dropout = val.get<double>();
      else if (key == "mode") c.mode = parse_message_mode(val.get<std::string>());
      else if (key == "init") c.init = parse_init_variant(val.get<std::string>());
      else if (key == "pe") c.pe = parse_pe_kind(val.get<std::string>());
      else if (key == "layer_norm") c.layer_norm = val.get<bool>();
      else if (key == "skip") c.skip = val.get<bool>();
      else if (key == "accumulation") c.accumulation = val.get<int>();
      else if (key == "steps_per_epoch") c.steps_per_epoch = val.get<int>();
      else if (key == "threads") c.threads = val.get<int>();
      else if (key == "seed") c.seed = val.get<std::uint64_t>();
      else bad_config("unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    bad_config(e.what());
  } catch (const std::invalid_argument& e) {
    bad_config(e.what());
  }
  validate(c);
  return c;
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"model", to_string(c.model)},
          {"hidden", c.hidden},
          {"layers", c.layers},
          {"lr", c.lr},
          {"batch_size", c.batch_size},
          {"negatives", c.negatives},
          {"adv_temperature", c.adv_temperature},
          {"epochs", c.epochs},
          {"dropout", c.dropout},
          {"mode", to_string(c.mode)},
          {"init", to_string(c.init)},
          {"pe", to_string(c.pe)},
          {"layer_norm", c.layer_norm},
          {"skip", c.skip},
          {"accumulation", c.accumulation},
          {"steps_per_epoch", c.steps_per_epoch},
          {"threads", c.threads},
          {"seed", c.seed}};
}

ModelConfig model_config(const TrainConfig& c, int relations, int max_arity) {
  ModelConfig m;
  m.kind = c.model;
  m.hidden = c.hidden;
  m.layers = c.layers;
  m.relations = relations;
  m.max_arity = max_arity;
  m.mode = c.mode;
  m.init = c.init;
  m.pe = c.pe;
  m.layer_norm = c.layer_norm;
  m.skip = c.skip;
  m.dropout = c.dropout;
  return m;
}

AdamState adam_init(const ParamSet& params) {
  AdamState s;
  for (std::size_t i = 0; i < params.size(); ++i) {
    s.m.emplace_back(params[i].size(), 0.0);
    s.v.emplace_back(params[i].size(), 0.0);
  }
  return s;
}

void adam_step(ParamSet& params, const ParamSet& grads, AdamState& s, double lr) {
  if (grads.size() != params.size() || s.m.size() != params.size())
    throw NnError(NnErrc::ShapeMismatch, "optimizer state does not match the parameters");
  for (std::size_t i = 0; i < params.size(); ++i)
    if (grads[i].size() != params[i].size() || s.m[i].size() != params[i].size())
      throw NnError(NnErrc::ShapeMismatch, "gradient for '" + params.name(i) + "' has the wrong size");
  ++s.step;
  const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step));
  const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params.mut(i).data;
    const auto& g = grads[i].data;
    auto& m = s.m[i];
    auto& v = s.v[i];
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = s.beta1 * m[k] + (1.0 - s.beta1) * g[k];
      v[k] = s.beta2 * v[k] + (1.0 - s.beta2) * g[k] * g[k];
      p[k] -= lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + s.eps);
    }
  }
}

std::vector<NodeId> corrupt(const HyperEdge& fact, int t, std::size_t node_count, const FactSet& known, int n,
                            std::mt19937_64& rng) {
  if (t < 1 || t > static_cast<int>(fact.nodes.size()))
    throw GraphError(GraphErrc::PositionOutOfRange, "corruption position outside the fact");
  const std::size_t slot = static_cast<std::size_t>(t - 1);
  const NodeId truth = fact.nodes[slot];
  HyperEdge probe = fact;
  auto legal = [&](NodeId v) {
    if (v == truth) return false;
    probe.nodes[slot] = v;
    return !known.contains(probe);
  };
  std::vector<NodeId> out;
  if (node_count < 2) throw TrainError(TrainErrc::NoCandidate, "no node can replace the true entity");
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(node_count - 1));
  // Rejection sampling first; fall back to the explicit legal set when most
  // draws are rejected.
  int rejected = 0;
  while (static_cast<int>(out.size()) < n && rejected < 32 * n) {
    const NodeId v = pick(rng);
    if (legal(v)) out.push_back(v);
    else ++rejected;
  }
  if (static_cast<int>(out.size()) < n) {
    std::vector<NodeId> pool;
    for (NodeId v = 0; v < node_count; ++v)
      if (legal(v)) pool.push_back(v);
    if (pool.empty()) throw TrainError(TrainErrc::NoCandidate, "every replacement forms a known fact");
    std::uniform_int_distribution<std::size_t> idx(0, pool.size() - 1);
    while (static_cast<int>(out.size()) < n) out.push_back(pool[idx(rng)]);
  }
  return out;
}

std::vector<double> adversarial_weights(std::span<const double> p_negs, double alpha) {
  if (!(alpha > 0)) throw TrainError(TrainErrc::InvalidConfig, "adversarial temperature must be positive");
  std::vector<double> w(p_negs.size());
  double mx = -INFINITY;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(p_negs[i] > 0.0 && p_negs[i] < 1.0))
      throw TrainError(TrainErrc::ProbabilityOutOfRange, "negative probability outside (0, 1)");
    w[i] = std::log1p(-p_negs[i]) / alpha;
    mx = std::max(mx, w[i]);
  }
  double z = 0.0;
  for (auto& x : w) z += (x = std::exp(x - mx));
  for (auto& x : w) x /= z;
  return w;
}

double self_adversarial_loss(double p_pos, std::span<const double> p_negs, double alpha) {
  if (!(p_pos > 0.0 && p_pos < 1.0))
    throw TrainError(TrainErrc::ProbabilityOutOfRange, "positive probability outside (0, 1)");
  const auto w = adversarial_weights(p_negs, alpha);
  double loss = -std::log(p_pos);
  for (std::size_t i = 0; i < w.size(); ++i) loss -= w[i] * std::log1p(-p_negs[i]);
  return loss;
}

LossGrad self_adversarial_logits(double s_pos, std::span<const double> s_negs, double alpha) {
  if (!(alpha > 0)) throw TrainError(TrainErrc::InvalidConfig, "adversarial temperature must be positive");
  LossGrad out;
  // log(1 - sigmoid(s)) = -softplus(s).
  std::vector<double> lneg(s_negs.size());
  double mx = -INFINITY;
  for (std::size_t i = 0; i < s_negs.size(); ++i) {
    lneg[i] = -softplus(s_negs[i]);
    mx = std::max(mx, lneg[i] / alpha);
  }
  out.weights.resize(s_negs.size());
  double z = 0.0;
  for (std::size_t i = 0; i < s_negs.size(); ++i) z += (out.weights[i] = std::exp(lneg[i] / alpha - mx));
  for (auto& w : out.weights) w /= z;
  out.loss = softplus(-s_pos);
  out.dlogits.push_back(sigmoid(s_pos) - 1.0);
  for (std::size_t i = 0; i < s_negs.size(); ++i) {
    out.loss -= out.weights[i] * lneg[i];
    out.dlogits.push_back(out.weights[i] * sigmoid(s_negs[i]));
  }
  return out;
}

std::size_t EdgeLookup::Hash::operator()(const HyperEdge& e) const noexcept {
  std::uint64_t h = mix(e.relation);
  for (NodeId v : e.nodes) h = mix(h ^ v);
  return static_cast<std::size_t>(h);
}

EdgeLookup::EdgeLookup(const RelationalHypergraph& graph) {
  for (EdgeId e = 0; e < graph.edge_count(); ++e) map_[graph.edge(e)].push_back(e);
}

const std::vector<EdgeId>* EdgeLookup::find(const HyperEdge& fact) const {
  auto it = map_.find(fact);
  return it == map_.end() ? nullptr : &it->second;
}

GraphView mask_positives(const RelationalHypergraph& graph, std::span<const HyperEdge> facts,
                         const EdgeLookup* lookup) {
  std::optional<EdgeLookup> own;
  if (!lookup) lookup = &own.emplace(graph);
  std::vector<char> masked(graph.edge_count(), 0);
  for (const auto& f : facts) {
    const auto* ids = lookup->find(f);
    if (!ids) throw GraphError(GraphErrc::FactNotFound, "masked fact is not an edge of the graph");
    for (EdgeId e : *ids) masked[e] = 1;
  }
  return GraphView(graph, std::move(masked));
}

ParamSet sum_gradients(const ModelParams& model, std::size_t samples, int threads,
                       const std::function<double(std::size_t, ParamSet&)>& sample_grad, double* loss_sum) {
  ParamSet total = model.params.zeros_like();
  double loss = 0.0;
  const std::size_t wave = static_cast<std::size_t>(std::max(1, threads));
  std::vector<ParamSet> slot(wave);
  std::vector<double> slot_loss(wave);
  std::vector<std::exception_ptr> errors(wave);
  for (std::size_t begin = 0; begin < samples; begin += wave) {
    const std::size_t count = std::min(wave, samples - begin);
    if (count == 1) {
      slot_loss[0] = sample_grad(begin, slot[0]);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < count; ++w)
        pool.emplace_back([&, w] {
          try {
            slot_loss[w] = sample_grad(begin + w, slot[w]);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      for (auto& th : pool) th.join();
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    }
    // Fold in sample order so the sum does not depend on the worker count.
    for (std::size_t w = 0; w < count; ++w) {
      total.accumulate(slot[w]);
      loss += slot_loss[w];
    }
  }
  if (loss_sum) *loss_sum = loss;
  return total;
}

FitResult fit(const Dataset& data, const TrainConfig& cfg, const FitOptions& opts) {
  validate(cfg);
  const RelationalHypergraph& g = data.graph;
  int max_arity = 1;
  for (const auto& r : g.relations()) max_arity = std::max(max_arity, r.arity);
  FitResult result;
  result.model = init_model(model_config(cfg, static_cast<int>(g.relation_count()), max_arity), cfg.seed);
  ModelParams& model = result.model;
  const FactSet train_known(data.train);
  const auto all = data.all_facts();
  const FactSet all_known(all);
  const EdgeLookup lookup(g);
  const auto& positives = g.edges();
  std::mt19937_64 rng(cfg.seed);
  AdamState adam = adam_init(model.params);
  ModelParams best = model;
  double best_mrr = -1.0;
  int best_epoch = 0;

  std::vector<std::size_t> order(positives.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t batches = (positives.size() + static_cast<std::size_t>(cfg.batch_size) - 1) /
                        static_cast<std::size_t>(cfg.batch_size);
  if (cfg.steps_per_epoch > 0) batches = std::min(batches, static_cast<std::size_t>(cfg.steps_per_epoch));

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    std::size_t epoch_samples = 0;
    ParamSet acc = model.params.zeros_like();
    int acc_count = 0;
    for (std::size_t b = 0; b < batches; ++b) {
      const std::size_t lo = b * static_cast<std::size_t>(cfg.batch_size);
      const std::size_t hi = std::min(positives.size(), lo + static_cast<std::size_t>(cfg.batch_size));
      std::vector<HyperEdge> batch;
      for (std::size_t i = lo; i < hi; ++i) batch.push_back(positives[order[i]]);
      const GraphView view = mask_positives(g, batch, &lookup);
      // Draw corruption positions and negatives up front so the sample
      // stream does not depend on the worker count.
      struct Sample {
        Query query;
        std::vector<NodeId> candidates;
        std::uint64_t seed;
      };
      std::vector<Sample> samples;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        const int k = static_cast<int>(batch[i].nodes.size());
        const int t = std::uniform_int_distribution<int>(1, k)(rng);
        std::vector<NodeId> cands{batch[i].nodes[static_cast<std::size_t>(t - 1)]};
        const auto negs = corrupt(batch[i], t, g.node_count(), train_known, cfg.negatives, rng);
        cands.insert(cands.end(), negs.begin(), negs.end());
        samples.push_back({query_from_fact(batch[i], t), std::move(cands), rng()});
      }
      double batch_loss = 0.0;
      ParamSet grads = sum_gradients(
          model, samples.size(), cfg.threads,
          [&](std::size_t i, ParamSet& out) {
            std::mt19937_64 drop_rng(samples[i].seed);
            ForwardOptions fo;
            fo.record = true;
            fo.training = true;
            fo.rng = &drop_rng;
            ForwardTrace tr = encode(view, samples[i].query, model, fo);
            const auto s = score_candidates(tr, model, samples[i].candidates);
            const auto lg = self_adversarial_logits(s[0], std::span<const double>(s).subspan(1), cfg.adv_temperature);
            out = backward(tr, model, lg.dlogits);
            return lg.loss;
          },
          &batch_loss);
      epoch_loss += batch_loss;
      epoch_samples += samples.size();
      acc.accumulate(grads, 1.0 / static_cast<double>(samples.size()));
      ++acc_count;
      if (acc_count == cfg.accumulation || b + 1 == batches) {
        acc.scale(1.0 / acc_count);
        adam_step(model.params, acc, adam, cfg.lr);
        acc = model.params.zeros_like();
        acc_count = 0;
      }
    }
    EpochLog log;
    log.epoch = epoch;
    log.loss = epoch_samples ? epoch_loss / static_cast<double>(epoch_samples) : 0.0;
    if (!data.valid.empty()) {
      log.val_mrr = evaluate_model(g, data.valid, all_known, model, opts.eval).overall.mrr;
      if (log.val_mrr > best_mrr) {
        best_mrr = log.val_mrr;
        best = model;
        best_epoch = epoch;
      }
    }
    log.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (opts.log) {
      const auto now = std::chrono::system_clock::now().time_since_epoch();
      nlohmann::json j{{"epoch", log.epoch},
                       {"loss", log.loss},
                       {"seconds", log.seconds},
                       {"timestamp", std::chrono::duration<double>(now).count()}};
      j["val_mrr"] = log.val_mrr >= 0 ? nlohmann::json(log.val_mrr) : nlohmann::json(nullptr);
      *opts.log << j.dump() << '\n' << std::flush;
    }
    if (opts.on_epoch) opts.on_epoch(log);
    result.log.push_back(log);
  }
  if (!data.valid.empty() && best_epoch > 0) {
    result.model = std::move(best);
    result.best_epoch = best_epoch;
    result.best_val_mrr = best_mrr;
  } else {
    result.best_epoch = cfg.epochs;
  }
  return result;
}

}  // namespace hcnet
