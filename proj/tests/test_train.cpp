#include <cmath>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "hcnet/random_instances.hpp"
#include "hcnet/synth.hpp"
#include "hcnet/train.hpp"

using namespace hcnet;

namespace {

Dataset toy_dataset(std::uint64_t seed, bool with_valid) {
  Rng rng(seed);
  std::vector<Relation> rels{{0, "a", 2}, {1, "b", 3}};
  const NodeId n = 10;
  std::vector<HyperEdge> facts;
  FactSet seen;
  while (facts.size() < 30) {
    HyperEdge e;
    e.relation = static_cast<RelationId>(rng() % 2);
    for (int j = 0; j < (e.relation == 0 ? 2 : 3); ++j) e.nodes.push_back(static_cast<NodeId>(rng() % n));
    if (seen.contains(e)) continue;
    seen.insert(e);
    facts.push_back(e);
  }
  Dataset d;
  d.train.assign(facts.begin(), facts.begin() + 24);
  if (with_valid) d.valid.assign(facts.begin() + 24, facts.begin() + 27);
  d.test.assign(facts.begin() + 27, facts.end());
  d.graph = RelationalHypergraph::build(rels, d.train, n);
  for (NodeId v = 0; v < n; ++v) d.entity_names.push_back("e" + std::to_string(v));
  return d;
}

TrainConfig toy_config() {
  TrainConfig c;
  c.hidden = 8;
  c.layers = 2;
  c.batch_size = 6;
  c.negatives = 4;
  c.epochs = 3;
  c.dropout = 0.1;
  c.lr = 1e-2;
  c.seed = 5;
  return c;
}

}  // namespace

TEST_CASE("corrupt: forced choice, filtering and determinism") {
  const HyperEdge ab{0, {0, 1}};
  std::mt19937_64 rng(1);
  FactSet known(std::vector<HyperEdge>{ab});
  CHECK(corrupt(ab, 2, 2, known, 1, rng) == std::vector<NodeId>{0});
  CHECK(corrupt(ab, 1, 2, known, 3, rng) == std::vector<NodeId>{1, 1, 1});
  known.insert(HyperEdge{0, {0, 0}});
  try {
    corrupt(ab, 2, 2, known, 1, rng);
    FAIL("expected NoCandidate");
  } catch (const TrainError& e) {
    CHECK(e.code() == TrainErrc::NoCandidate);
  }

  auto data = toy_dataset(3, false);
  const FactSet train(data.train);
  std::mt19937_64 r1(9), r2(9);
  for (const auto& f : data.train) {
    for (int t = 1; t <= static_cast<int>(f.nodes.size()); ++t) {
      auto a = corrupt(f, t, data.graph.node_count(), train, 5, r1);
      auto b = corrupt(f, t, data.graph.node_count(), train, 5, r2);
      CHECK(a == b);
      CHECK(a.size() == 5);
      for (NodeId v : a) {
        HyperEdge probe = f;
        probe.nodes[static_cast<std::size_t>(t - 1)] = v;
        CHECK(v != f.nodes[static_cast<std::size_t>(t - 1)]);
        CHECK_FALSE(train.contains(probe));
      }
    }
  }
}

TEST_CASE("HyperCycle designated negative") {
  auto oq = opposite_queries(8);
  CHECK(oq.positives[0] == HyperEdge{kQueryRelation, {0, 4}});
  CHECK(oq.negatives[0] == HyperEdge{kQueryRelation, {0, 2}});
}

TEST_CASE("self-adversarial loss") {
  const std::vector<double> one{0.3};
  CHECK(adversarial_weights(one, 0.01) == std::vector<double>{1.0});
  CHECK(adversarial_weights(one, 5.0) == std::vector<double>{1.0});
  // 2 ln 2.
  CHECK(self_adversarial_loss(0.5, std::vector<double>{0.5}, 0.5) == doctest::Approx(1.3862943611198906));
  auto w = adversarial_weights(std::vector<double>{0.2, 0.2}, 0.5);
  CHECK(w[0] == doctest::Approx(0.5));
  CHECK(w[1] == doctest::Approx(0.5));
  for (double bad : {0.0, 1.0, -0.1, std::nan("")}) {
    try {
      self_adversarial_loss(bad, one, 0.5);
      FAIL("expected ProbabilityOutOfRange");
    } catch (const TrainError& e) {
      CHECK(e.code() == TrainErrc::ProbabilityOutOfRange);
    }
    CHECK_THROWS_AS(self_adversarial_loss(0.5, std::vector<double>{bad}, 0.5), TrainError);
  }
}

TEST_CASE("property: adversarial weights sum to one and follow their negatives") {
  Rng rng(2);
  std::uniform_real_distribution<double> u(0.01, 0.99), logit(-6, 6);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> p(1 + rng() % 8);
    for (auto& x : p) x = u(rng);
    const double alpha = 0.1 + u(rng);
    auto w = adversarial_weights(p, alpha);
    CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(1.0));
    std::vector<std::size_t> perm(p.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> pp(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) pp[i] = p[perm[i]];
    auto wp = adversarial_weights(pp, alpha);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(wp[i] == doctest::Approx(w[perm[i]]));

    // The logit form matches the probability form, and its gradient matches
    // central differences with the weights held fixed.
    std::vector<double> s(p.size());
    for (auto& x : s) x = logit(rng);
    const double sp = logit(rng);
    auto sig = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
    std::vector<double> ps(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) ps[i] = sig(s[i]);
    auto lg = self_adversarial_logits(sp, s, alpha);
    CHECK(lg.loss == doctest::Approx(self_adversarial_loss(sig(sp), ps, alpha)).epsilon(1e-10));
    auto fixed_loss = [&](double a, const std::vector<double>& negs) {
      double l = -std::log(sig(a));
      for (std::size_t i = 0; i < negs.size(); ++i) l -= lg.weights[i] * std::log(1 - sig(negs[i]));
      return l;
    };
    const double h = 1e-6;
    CHECK(lg.dlogits[0] == doctest::Approx((fixed_loss(sp + h, s) - fixed_loss(sp - h, s)) / (2 * h)).epsilon(1e-6));
    for (std::size_t i = 0; i < s.size(); ++i) {
      auto up = s, dn = s;
      up[i] += h;
      dn[i] -= h;
      CHECK(lg.dlogits[i + 1] == doctest::Approx((fixed_loss(sp, up) - fixed_loss(sp, dn)) / (2 * h)).epsilon(1e-6));
    }
  }
}

TEST_CASE("mask_positives") {
  auto g = fixtures::degree_award_graph();
  auto all = mask_positives(g, g.edges());
  for (NodeId v = 0; v < g.node_count(); ++v) CHECK(all.visible_incidence(v).empty());
  CHECK(all.masked_count() == 2);

  const HyperEdge awarded = g.edge(1);
  auto one = mask_positives(g, std::vector<HyperEdge>{awarded});
  std::size_t before = 0, after = 0;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    before += GraphView(g).visible_incidence(v).size();
    after += one.visible_incidence(v).size();
  }
  CHECK(before - after == awarded.nodes.size());
  CHECK(one.visible_incidence(fixtures::Nobel).empty());
  CHECK(one.visible_incidence(fixtures::Physics).size() == 1);

  auto none = mask_positives(g, std::vector<HyperEdge>{});
  ModelConfig c;
  c.hidden = 6;
  c.layers = 2;
  c.relations = 2;
  c.max_arity = 4;
  auto m = init_model(c, 1);
  Query q{fixtures::Awarded, {fixtures::Physics, fixtures::Nobel}, 3};
  CHECK(encode(none, q, m).final.data == encode(GraphView(g), q, m).final.data);

  try {
    mask_positives(g, std::vector<HyperEdge>{HyperEdge{0, {4, 4, 4, 4}}});
    FAIL("expected FactNotFound");
  } catch (const GraphError& e) {
    CHECK(e.code() == GraphErrc::FactNotFound);
  }
}

TEST_CASE("property: masked edges never send messages") {
  Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    RandomGraphSpec spec;
    spec.max_nodes = 15;
    auto g = random_hypergraph(rng, spec);
    if (g.edge_count() == 0) continue;
    const HyperEdge fact = g.edge(static_cast<EdgeId>(rng() % g.edge_count()));
    auto view = mask_positives(g, std::vector<HyperEdge>{fact});
    ModelConfig c;
    c.hidden = 4;
    c.layers = 2;
    c.relations = static_cast<int>(g.relation_count());
    c.max_arity = g.max_arity();
    auto m = init_model(c, 2);
    std::vector<std::uint64_t> counts(g.edge_count(), 0);
    ForwardOptions fo;
    fo.edge_message_count = &counts;
    encode(view, query_from_fact(fact, 1), m, fo);
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      if (g.edge(e) == fact) CHECK(counts[e] == 0);
      else CHECK(counts[e] == 2 * g.edge(e).nodes.size());
    }
  }
}

TEST_CASE("adam") {
  ParamSet p;
  p.add("w", {3});
  p.mut(0).data = {1.0, -2.0, 0.5};
  auto state = adam_init(p);
  ParamSet zero = p.zeros_like();
  const auto before = p[0].data;
  adam_step(p, zero, state, 1e-3);
  CHECK(p[0].data == before);

  auto s2 = adam_init(p);
  s2.m[0] = {0.5, 0.5, 0.5};
  s2.v[0] = {0.25, 0.25, 0.25};
  ParamSet g = p.zeros_like();
  adam_step(p, g, s2, 0.0);
  CHECK(s2.m[0][0] == doctest::Approx(0.45));
  CHECK(s2.v[0][0] == doctest::Approx(0.25 * 0.999));
  CHECK(s2.step == 1);

  // Constant gradient: every step moves by lr in the direction of -g.
  ParamSet q;
  q.add("w", {2});
  auto s3 = adam_init(q);
  ParamSet cg = q.zeros_like();
  cg.mut(0).data = {3.0, -0.01};
  for (int i = 0; i < 200; ++i) {
    const auto prev = q[0].data;
    adam_step(q, cg, s3, 1e-3);
    CHECK(prev[0] - q[0].data[0] == doctest::Approx(1e-3).epsilon(1e-4));
    CHECK(q[0].data[1] - prev[1] == doctest::Approx(1e-3).epsilon(1e-4));
  }

  ParamSet wrong;
  wrong.add("w", {5});
  try {
    adam_step(q, wrong, s3, 1e-3);
    FAIL("expected ShapeMismatch");
  } catch (const NnError& e) {
    CHECK(e.code() == NnErrc::ShapeMismatch);
  }
}

TEST_CASE("train config parsing") {
  auto c = train_config_from_json(nlohmann::json{{"hidden", 16}, {"model", "hrnet"}, {"mode", "query-independent"}});
  CHECK(c.hidden == 16);
  CHECK(c.model == ModelKind::HRNet);
  CHECK(c.negatives == 10);
  CHECK(train_config_from_json(to_json(c)).hidden == 16);
  for (auto bad : {nlohmann::json{{"hiden", 3}}, nlohmann::json{{"negatives", 0}},
                   nlohmann::json{{"adv_temperature", 0.0}}, nlohmann::json{{"model", "gcn"}},
                   nlohmann::json{{"lr", "fast"}}}) {
    try {
      train_config_from_json(bad);
      FAIL("expected InvalidConfig");
    } catch (const TrainError& e) {
      CHECK(e.code() == TrainErrc::InvalidConfig);
    }
  }
}

TEST_CASE("fit: zero epochs, determinism, worker-count independence") {
  auto data = toy_dataset(1, true);
  auto cfg = toy_config();
  cfg.epochs = 0;
  auto r0 = fit(data, cfg);
  auto init = init_model(model_config(cfg, 2, 3), cfg.seed);
  for (std::size_t i = 0; i < init.params.size(); ++i) CHECK(r0.model.params[i].data == init.params[i].data);
  CHECK(r0.log.empty());

  cfg.epochs = 3;
  std::ostringstream log_a;
  FitOptions opts;
  opts.log = &log_a;
  auto a = fit(data, cfg, opts);
  auto b = fit(data, cfg);
  cfg.threads = 3;
  auto c = fit(data, cfg);
  REQUIRE(a.log.size() == 3);
  for (std::size_t e = 0; e < 3; ++e) {
    CHECK(a.log[e].loss == b.log[e].loss);
    CHECK(a.log[e].val_mrr == b.log[e].val_mrr);
    CHECK(a.log[e].loss == c.log[e].loss);
    CHECK(a.log[e].val_mrr > 0.0);
  }
  for (std::size_t i = 0; i < a.model.params.size(); ++i) {
    CHECK(a.model.params[i].data == b.model.params[i].data);
    CHECK(a.model.params[i].data == c.model.params[i].data);
  }
  CHECK(a.best_epoch >= 1);
  std::istringstream lines(log_a.str());
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    auto j = nlohmann::json::parse(line);
    CHECK(j.contains("loss"));
    CHECK(j.contains("val_mrr"));
    CHECK(j.contains("timestamp"));
    ++count;
  }
  CHECK(count == 3);
}

TEST_CASE("fit: loss decreases on a small graph") {
  auto data = toy_dataset(2, false);
  auto cfg = toy_config();
  cfg.dropout = 0.0;
  cfg.epochs = 30;
  cfg.negatives = 2;
  auto r = fit(data, cfg);
  double first = 0, last = 0;
  for (int e = 0; e < 5; ++e) {
    first += r.log[static_cast<std::size_t>(e)].loss;
    last += r.log[r.log.size() - 1 - static_cast<std::size_t>(e)].loss;
  }
  CHECK(last < first);
  CHECK(r.best_val_mrr < 0);
  CHECK(r.best_epoch == 30);
}
