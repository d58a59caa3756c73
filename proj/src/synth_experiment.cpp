#include "hcnet/synth_experiment.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <numeric>
#include <ostream>
#include <random>

#include "hcnet/train.hpp"

namespace hcnet {

namespace {

struct PairScores {
  double pos, neg;
};

PairScores score_pair(const RelationalHypergraph& g, int n, NodeId i, const ModelParams& model, ForwardTrace* keep,
                      bool record) {
  const Query q{kQueryRelation, {i}, 2};
  const NodeId cands[2] = {static_cast<NodeId>((i + n / 2) % n), static_cast<NodeId>((i + 2) % n)};
  ForwardOptions fo;
  fo.record = record;
  ForwardTrace tr = encode(GraphView(g), q, model, fo);
  const auto s = score_candidates(tr, model, cands);
  if (keep) *keep = std::move(tr);
  return {s[0], s[1]};
}

}  // namespace

ModelConfig hypercycle_model_config(const HyperCycleRunConfig& cfg) {
  ModelConfig m;
  m.kind = cfg.model;
  m.hidden = cfg.hidden;
  m.layers = cfg.layers;
  m.relations = 3;
  m.max_arity = std::max(2, *std::max_element(cfg.ks.begin(), cfg.ks.end()));
  m.mode = cfg.mode;
  m.pe = cfg.pe;
  m.layer_norm = cfg.layer_norm;
  m.skip = cfg.skip;
  return m;
}

double cycle_accuracy(const std::vector<RelationalHypergraph>& graphs, const ModelParams& model, std::size_t* pairs) {
  double hits = 0.0;
  std::size_t count = 0;
  for (const auto& g : graphs) {
    const int n = static_cast<int>(g.node_count());
    for (NodeId i = 0; i < static_cast<NodeId>(n); ++i) {
      const auto s = score_pair(g, n, i, model, nullptr, false);
      hits += s.pos > s.neg ? 1.0 : (s.pos == s.neg ? 0.5 : 0.0);
      ++count;
    }
  }
  if (pairs) *pairs = count;
  return count ? hits / static_cast<double>(count) : 0.0;
}

double hypercycle_accuracy(const std::vector<HyperCycleSpec>& graphs, const ModelParams& model, std::size_t* pairs) {
  std::vector<RelationalHypergraph> built;
  for (const auto& spec : graphs) built.push_back(hypercycle(spec.n, spec.k));
  return cycle_accuracy(built, model, pairs);
}

ModelParams train_on_cycles(const std::vector<RelationalHypergraph>& graphs, const HyperCycleRunConfig& cfg,
                            std::vector<double>* epoch_losses, std::ostream* log) {
  ModelParams model = init_model(hypercycle_model_config(cfg), cfg.seed);
  struct Sample {
    std::size_t graph;
    NodeId source;
  };
  std::vector<Sample> samples;
  for (std::size_t gi = 0; gi < graphs.size(); ++gi)
    for (NodeId i = 0; i < static_cast<NodeId>(graphs[gi].node_count()); ++i) samples.push_back({gi, i});
  std::mt19937_64 rng(cfg.seed);
  AdamState adam = adam_init(model.params);
  const std::size_t bs = static_cast<std::size_t>(std::max(1, cfg.batch_size));
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(samples.begin(), samples.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t lo = 0; lo < samples.size(); lo += bs) {
      const std::size_t count = std::min(bs, samples.size() - lo);
      double batch_loss = 0.0;
      ParamSet grads = sum_gradients(
          model, count, cfg.threads,
          [&](std::size_t j, ParamSet& out) {
            const Sample& smp = samples[lo + j];
            const int n = static_cast<int>(graphs[smp.graph].node_count());
            ForwardTrace tr{GraphView(graphs[smp.graph])};
            const auto s = score_pair(graphs[smp.graph], n, smp.source, model, &tr, true);
            const double neg[1] = {s.neg};
            const auto lg = self_adversarial_logits(s.pos, neg, 1.0);
            out = backward(tr, model, lg.dlogits);
            return lg.loss;
          },
          &batch_loss);
      grads.scale(1.0 / static_cast<double>(count));
      adam_step(model.params, grads, adam, cfg.lr);
      epoch_loss += batch_loss;
    }
    epoch_loss /= static_cast<double>(samples.size());
    if (epoch_losses) epoch_losses->push_back(epoch_loss);
    if (log) {
      const auto now = std::chrono::system_clock::now().time_since_epoch();
      nlohmann::json j{{"epoch", epoch},
                       {"loss", epoch_loss},
                       {"val_mrr", nullptr},
                       {"timestamp", std::chrono::duration<double>(now).count()}};
      *log << j.dump() << '\n' << std::flush;
    }
  }
  return model;
}

HyperCycleResult run_hypercycle(const HyperCycleRunConfig& cfg, std::ostream* log) {
  HyperCycleResult res;
  res.suite = hypercycle_suite(cfg.ns, cfg.ks, cfg.ratio, cfg.seed);
  std::vector<RelationalHypergraph> graphs;
  for (const auto& spec : res.suite.train) graphs.push_back(hypercycle(spec.n, spec.k));
  const ModelParams model = train_on_cycles(graphs, cfg, &res.epoch_loss, log);
  res.train_accuracy = hypercycle_accuracy(res.suite.train, model);
  res.test_accuracy = hypercycle_accuracy(res.suite.test, model, &res.test_pairs);
  return res;
}

nlohmann::json to_json(const HyperCycleRunConfig& c) {
  return {{"model", to_string(c.model)}, {"hidden", c.hidden},         {"layers", c.layers},
          {"lr", c.lr},                  {"epochs", c.epochs},         {"batch_size", c.batch_size},
          {"mode", to_string(c.mode)},   {"pe", to_string(c.pe)},      {"layer_norm", c.layer_norm},
          {"skip", c.skip},              {"ns", c.ns},                 {"ks", c.ks},
          {"ratio", c.ratio},            {"seed", c.seed},             {"threads", c.threads}};
}

}  // namespace hcnet
