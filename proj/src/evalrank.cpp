#include "hcnet/evalrank.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

namespace hcnet {

std::vector<NodeId> filtered_candidates(const HyperEdge& fact, int t, std::size_t node_count, const FactSet& known) {
  if (t < 1 || t > static_cast<int>(fact.nodes.size()))
    throw EvalError(EvalErrc::IndexOutOfRange, "position " + std::to_string(t) + " outside the fact");
  const std::size_t slot = static_cast<std::size_t>(t - 1);
  const NodeId truth = fact.nodes[slot];
  std::vector<NodeId> out;
  HyperEdge probe = fact;
  for (NodeId v = 0; v < node_count; ++v) {
    probe.nodes[slot] = v;
    if (v == truth || !known.contains(probe)) out.push_back(v);
  }
  return out;
}

double rank_of(std::span<const double> scores, std::size_t true_index) {
  if (true_index >= scores.size()) throw EvalError(EvalErrc::IndexOutOfRange, "true index outside the score list");
  for (double s : scores)
    if (std::isnan(s)) throw EvalError(EvalErrc::NaNScore, "NaN score");
  const double st = scores[true_index];
  std::size_t higher = 0, ties = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (i == true_index) continue;
    if (scores[i] > st) ++higher;
    else if (scores[i] == st) ++ties;
  }
  return 1.0 + static_cast<double>(higher) + static_cast<double>(ties) / 2.0;
}

namespace {

void add(Metrics& m, double rank) {
  m.mrr += 1.0 / rank;
  m.hits1 += rank <= 1.0;
  m.hits3 += rank <= 3.0;
  m.hits10 += rank <= 10.0;
  ++m.queries;
}

void finish(Metrics& m) {
  const double n = static_cast<double>(m.queries);
  m.mrr /= n;
  m.hits1 /= n;
  m.hits3 /= n;
  m.hits10 /= n;
}

}  // namespace

MetricsReport aggregate(std::span<const RankingOutcome> outcomes) {
  if (outcomes.empty()) throw EvalError(EvalErrc::EmptyOutcomes, "no ranking outcomes to aggregate");
  MetricsReport r;
  for (const auto& o : outcomes) {
    add(r.overall, o.rank);
    add(r.per_arity[o.arity], o.rank);
  }
  finish(r.overall);
  for (auto& [k, m] : r.per_arity) finish(m);
  return r;
}

MetricsReport evaluate_model(const RelationalHypergraph& graph, std::span<const HyperEdge> facts, const FactSet& known,
                             const ModelParams& model, const EvalOptions& opts,
                             std::vector<RankingOutcome>* outcomes_out) {
  struct Job {
    std::size_t fact;
    int t;
  };
  std::vector<Job> jobs;
  for (std::size_t f = 0; f < facts.size(); ++f)
    for (int t = 1; t <= static_cast<int>(facts[f].nodes.size()); ++t) jobs.push_back({f, t});
  std::vector<RankingOutcome> outcomes(jobs.size());

  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const HyperEdge& fact = facts[jobs[j].fact];
      const int t = jobs[j].t;
      const NodeId truth = fact.nodes[static_cast<std::size_t>(t - 1)];
      std::vector<NodeId> cands = filtered_candidates(fact, t, graph.node_count(), known);
      if (opts.negatives > 0) {
        std::vector<NodeId> neg;
        for (NodeId v : cands)
          if (v != truth) neg.push_back(v);
        std::mt19937_64 rng(opts.seed + 0x9e3779b97f4a7c15ULL * (j + 1));
        std::shuffle(neg.begin(), neg.end(), rng);
        if (neg.size() > static_cast<std::size_t>(opts.negatives)) neg.resize(static_cast<std::size_t>(opts.negatives));
        cands.assign(1, truth);
        cands.insert(cands.end(), neg.begin(), neg.end());
      }
      const std::size_t ti = static_cast<std::size_t>(std::find(cands.begin(), cands.end(), truth) - cands.begin());
      const Query q = query_from_fact(fact, t);
      ForwardTrace tr = encode(GraphView(graph), q, model);
      if (opts.forward_count) ++*opts.forward_count;
      const std::vector<double> s = score_candidates(tr, model, cands);
      outcomes[j] = RankingOutcome{q, truth, rank_of(s, ti), cands.size(), static_cast<int>(fact.nodes.size())};
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(opts.threads, jobs.size()));
  if (workers == 1) {
    run(0, jobs.size());
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (jobs.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          run(w * chunk, std::min(jobs.size(), (w + 1) * chunk));
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  MetricsReport report = aggregate(outcomes);
  if (outcomes_out) *outcomes_out = std::move(outcomes);
  return report;
}

nlohmann::json to_json(const Metrics& m) {
  return {{"mrr", m.mrr}, {"hits@1", m.hits1}, {"hits@3", m.hits3}, {"hits@10", m.hits10}, {"queries", m.queries}};
}

nlohmann::json to_json(const MetricsReport& r) {
  nlohmann::json j = to_json(r.overall);
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [k, m] : r.per_arity) per[std::to_string(k)] = to_json(m);
  j["per_arity"] = per;
  return j;
}

}  // namespace hcnet
