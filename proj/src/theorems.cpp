#include "hcnet/theorems.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hcnet/gradcheck.hpp"
#include "hcnet/logic.hpp"
#include "hcnet/model.hpp"
#include "hcnet/random_instances.hpp"
#include "hcnet/refine.hpp"

namespace hcnet {

namespace {

ModelConfig config_for(const RelationalHypergraph& g, ModelKind kind, int hidden, int layers) {
  ModelConfig c;
  c.kind = kind;
  c.hidden = hidden;
  c.layers = layers;
  c.relations = static_cast<int>(g.relation_count());
  c.max_arity = std::max(1, g.max_arity());
  return c;
}

std::vector<NodeColoring> wl_rounds(const RelationalHypergraph& g, const Query& q, ModelKind kind, int rounds) {
  if (kind == ModelKind::HCNet) return conditional_run(g, q, rounds);
  return hrwl1_run(g, NodeColoring{std::vector<ColorId>(g.node_count(), 0), 0}, rounds);
}

SuiteResult finish(SuiteResult r) {
  if (r.detail.empty()) r.detail = std::to_string(r.violations) + " violations in " + std::to_string(r.cases) + " cases";
  return r;
}

}  // namespace

SuiteResult refinement_suite(std::uint64_t seed, int graphs) {
  constexpr int kLayers = 5;
  SuiteResult r;
  r.name = "refinement";
  Rng rng(seed);
  for (int t = 0; t < graphs; ++t) {
    RandomGraphSpec spec;
    auto g = random_hypergraph(rng, spec);
    auto q = random_query(rng, g);
    for (auto kind : {ModelKind::HCNet, ModelKind::HRNet}) {
      auto wl = wl_rounds(g, q, kind, kLayers);
      for (bool bare : {true, false}) {
        ModelConfig c = config_for(g, kind, 16, kLayers);
        c.layer_norm = c.skip = !bare;
        auto m = init_model(c, rng());
        ForwardOptions fo;
        fo.record = true;
        auto feats = layer_features(encode(g, q, m, fo));
        for (std::size_t l = 0; l < feats.size(); ++l) {
          ++r.cases;
          if (!refines(wl[l].colors, feature_partition(feats[l]))) ++r.violations;
        }
      }
    }
  }
  r.metric = static_cast<double>(r.violations);
  r.pass = r.violations == 0 && r.cases > 0;
  return finish(r);
}

SuiteResult wl_match_suite(std::uint64_t seed, int graphs, int required) {
  constexpr int kRound = 3;
  SuiteResult r;
  r.name = "wl-match";
  Rng rng(seed);
  int matched[2] = {0, 0};
  for (int t = 0; t < graphs; ++t) {
    RandomGraphSpec spec;
    auto g = random_hypergraph(rng, spec);
    auto q = random_query(rng, g);
    for (int i = 0; i < 2; ++i) {
      const auto kind = i == 0 ? ModelKind::HCNet : ModelKind::HRNet;
      auto m = init_model(config_for(g, kind, 64, kRound), rng());
      auto tr = encode(g, q, m);
      auto wl = wl_rounds(g, q, kind, kRound);
      ++r.cases;
      if (equivalent(wl[kRound].colors, feature_partition(tr.final)))
        ++matched[i];
      else
        ++r.violations;
    }
  }
  r.metric = std::min(matched[0], matched[1]);
  std::ostringstream os;
  os << "HCNet " << matched[0] << "/" << graphs << ", HRNet " << matched[1] << "/" << graphs;
  r.detail = os.str();
  r.pass = matched[0] >= required && matched[1] >= required;
  return r;
}

SuiteResult pair_refinement_suite(std::uint64_t seed, int graphs) {
  constexpr int kRounds = 5;
  SuiteResult r;
  r.name = "pair-refinement";
  Rng rng(seed);
  for (int t = 0; t < graphs; ++t) {
    auto kg = random_kg(rng, 15, 1 + static_cast<int>(rng() % 3), 1.5, false);
    auto init = standard_pair_init(kg.node_count());
    auto a = hcwl2_run(kg, init, kRounds);
    auto b = rawl2plus_run(kg, init, kRounds);
    for (int l = 0; l <= kRounds; ++l) {
      ++r.cases;
      if (!equivalent(a[l], b[l])) ++r.violations;
    }
  }
  r.metric = static_cast<double>(r.violations);
  r.pass = r.violations == 0 && r.cases > 0;
  return finish(r);
}

SuiteResult compiler_suite(std::uint64_t seed, int pairs) {
  SuiteResult r;
  r.name = "compiler";
  Rng rng(seed);
  std::size_t components = 0;
  for (int t = 0; t < pairs; ++t) {
    RandomGraphSpec spec;
    spec.max_nodes = 12;
    spec.max_relations = 3;
    spec.colors = 3;
    auto g = random_hypergraph(rng, spec);
    auto sig = signature_of(g, {"a", "b", "c"});
    auto f = random_formula(rng, sig, 1 + t % 4, true);
    auto net = compile_hgml_r(f, sig);
    auto out = run_compiled(net, g);
    bool ok = true;
    for (std::size_t p = 0; p < net.L; ++p) {
      auto truth = eval_all(g, sig, net.subformulas[p]);
      for (NodeId v = 0; v < g.node_count(); ++v) {
        ++components;
        if (out[v][p] != static_cast<std::int64_t>(truth[v])) ok = false;
      }
    }
    ++r.cases;
    if (!ok) ++r.violations;
  }
  r.metric = static_cast<double>(r.violations);
  r.detail = std::to_string(r.violations) + " failing pairs of " + std::to_string(r.cases) + " (" +
             std::to_string(components) + " components)";
  r.pass = r.violations == 0 && r.cases > 0;
  return r;
}

SuiteResult gradcheck_suite(std::uint64_t seed, int instances, double tolerance) {
  SuiteResult r;
  r.name = "gradcheck";
  Rng rng(seed);
  std::string worst;
  for (int t = 0; t < instances; ++t) {
    RandomGraphSpec spec;
    spec.max_nodes = 8;
    auto g = random_hypergraph(rng, spec);
    ModelConfig c = config_for(g, t % 3 == 2 ? ModelKind::HRNet : ModelKind::HCNet, 4, 2);
    if (t % 3 == 1) c.mode = MessageMode::QueryIndependent;
    if (t % 2) c.pe = PeKind::Learnable;
    auto m = init_model(c, rng());
    jitter_parameters(m, rng(), 0.5);
    auto q = random_query(rng, g);
    GradCheckOptions opts;
    opts.seed = rng();
    auto rep = grad_check(g, q, m, opts);
    ++r.cases;
    if (!(rep.max_rel_error < tolerance)) ++r.violations;
    if (rep.max_rel_error >= r.metric) {
      r.metric = rep.max_rel_error;
      worst = rep.worst_tensor;
    }
  }
  std::ostringstream os;
  os << "max relative error " << r.metric << " (" << worst << ")";
  r.detail = os.str();
  r.pass = r.violations == 0 && r.cases > 0;
  return r;
}

SuiteResult equivariance_suite(std::uint64_t seed, int permutations, double tolerance) {
  SuiteResult r;
  r.name = "equivariance";
  Rng rng(seed);
  for (int t = 0; t < permutations; ++t) {
    RandomGraphSpec spec;
    auto g = random_hypergraph(rng, spec);
    ModelConfig c = config_for(g, t % 2 ? ModelKind::HRNet : ModelKind::HCNet, 16, 3);
    auto m = init_model(c, rng());
    auto q = random_query(rng, g);
    auto perm = random_permutation(rng, g.node_count());
    ForwardOptions fo;
    fo.record = true;
    auto a = encode(g, q, m, fo);
    auto b = encode(apply_permutation(g, perm), permute_query(q, perm), m, fo);
    auto sa = score_all(a, m);
    auto sb = score_all(b, m);
    auto fa = layer_features(a);
    auto fb = layer_features(b);
    double dev = 0.0;
    for (std::size_t l = 0; l < fa.size(); ++l)
      for (NodeId v = 0; v < g.node_count(); ++v)
        for (std::size_t k = 0; k < m.d(); ++k)
          dev = std::max(dev, std::abs(fa[l].row(v)[k] - fb[l].row(perm[v])[k]));
    for (NodeId v = 0; v < g.node_count(); ++v) dev = std::max(dev, std::abs(sa[v] - sb[perm[v]]));
    ++r.cases;
    if (!(dev <= tolerance)) ++r.violations;
    r.metric = std::max(r.metric, dev);
  }
  std::ostringstream os;
  os << "max deviation " << r.metric << " over " << r.cases << " permutations";
  r.detail = os.str();
  r.pass = r.violations == 0 && r.cases > 0;
  return r;
}

std::vector<SuiteResult> run_all_suites(std::uint64_t seed) {
  return {refinement_suite(seed),         wl_match_suite(seed + 1), pair_refinement_suite(seed + 2),
          compiler_suite(seed + 3),       gradcheck_suite(seed + 4), equivariance_suite(seed + 5)};
}

nlohmann::json to_json(const SuiteResult& r) {
  return {{"name", r.name},     {"cases", r.cases},   {"violations", r.violations},
          {"metric", r.metric}, {"detail", r.detail}, {"pass", r.pass}};
}

}  // namespace hcnet
