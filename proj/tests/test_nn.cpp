#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "fixtures.hpp"
#include "hcnet/checkpoint.hpp"
#include "hcnet/gradcheck.hpp"
#include "hcnet/model.hpp"
#include "hcnet/random_instances.hpp"
#include "hcnet/refine.hpp"
#include "hcnet/synth.hpp"

using namespace hcnet;

namespace {

ModelConfig small_config(int relations, int max_arity, int hidden = 8, int layers = 2) {
  ModelConfig c;
  c.hidden = hidden;
  c.layers = layers;
  c.relations = relations;
  c.max_arity = max_arity;
  return c;
}

void set(ModelParams& m, const std::string& name, std::vector<double> values) {
  auto& t = m.params.mut(name);
  REQUIRE(t.size() == values.size());
  t.data = std::move(values);
}

bool rows_equal(const FeatureMap& h, NodeId a, NodeId b) {
  for (std::size_t k = 0; k < h.d; ++k)
    if (h.row(a)[k] != h.row(b)[k]) return false;
  return true;
}

}  // namespace

TEST_CASE("positional encodings") {
  CHECK(positional_encoding(PeKind::Sinusoidal, 0, 4) == std::vector<double>{0, 1, 0, 1});
  auto p = positional_encoding(PeKind::Sinusoidal, 1, 2);
  // sin(1) and cos(1) to 16 digits.
  CHECK(p[0] == doctest::Approx(0.8414709848078965).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(0.5403023058681398).epsilon(1e-15));
  CHECK(positional_encoding(PeKind::Constant, 7, 3) == std::vector<double>{1, 1, 1});
  CHECK(positional_encoding(PeKind::OneHot, 2, 3) == std::vector<double>{0, 1, 0});
  CHECK_THROWS_AS(positional_encoding(PeKind::Sinusoidal, 1, 3), NnError);

  auto c = small_config(2, 3, 2);
  c.pe = PeKind::OneHot;
  try {
    init_model(c, 1);
    FAIL("expected DimensionTooSmall");
  } catch (const NnError& e) {
    CHECK(e.code() == NnErrc::DimensionTooSmall);
  }
}

TEST_CASE("hcnet init") {
  auto g = fixtures::degree_award_graph();
  auto m = init_model(small_config(2, 4), 3);
  const std::size_t d = m.d();
  Query q{fixtures::Awarded, {fixtures::Physics, fixtures::Nobel}, 3};
  auto h = hcnet_init(g, q, m, InitVariant::PZ);
  const double* z = m.z(fixtures::Awarded);
  for (std::size_t k = 0; k < d; ++k) {
    CHECK(h.row(fixtures::Hawking)[k] == 0.0);
    CHECK(h.row(fixtures::Physics)[k] == m.pe_row(1)[k] + z[k]);
    CHECK(h.row(fixtures::Nobel)[k] == m.pe_row(2)[k] + z[k]);
  }

  Query rep{fixtures::Awarded, {fixtures::Oxford, fixtures::Oxford}, 2};
  auto hr = hcnet_init(g, rep, m, InitVariant::PZ);
  for (std::size_t k = 0; k < d; ++k)
    CHECK(hr.row(fixtures::Oxford)[k] == doctest::Approx(m.pe_row(1)[k] + m.pe_row(3)[k] + 2 * z[k]));

  auto ones = hcnet_init(g, q, m, InitVariant::Ones);
  CHECK(ones.row(fixtures::Physics)[0] == 1.0);
  CHECK(ones.row(fixtures::Hawking)[0] == 0.0);

  Query bad{fixtures::Awarded, {fixtures::Physics}, 3};
  try {
    hcnet_init(g, bad, m, InitVariant::PZ);
    FAIL("expected QueryArityMismatch");
  } catch (const NnError& e) {
    CHECK(e.code() == NnErrc::QueryArityMismatch);
  }
}

TEST_CASE("property: default init separates source nodes from the rest") {
  Rng rng(4);
  for (int t = 0; t < 30; ++t) {
    RandomGraphSpec spec;
    auto g = random_hypergraph(rng, spec);
    auto m = init_model(small_config(static_cast<int>(g.relation_count()), g.max_arity()), 5);
    auto q = random_query(rng, g);
    auto h = hcnet_init(g, q, m, InitVariant::PZ);
    std::vector<char> given(g.node_count(), 0);
    for (NodeId u : q.given) given[u] = 1;
    for (NodeId v = 0; v < g.node_count(); ++v) {
      bool nonzero = false;
      for (std::size_t k = 0; k < m.d(); ++k) nonzero |= h.row(v)[k] != 0.0;
      CHECK(nonzero == static_cast<bool>(given[v]));
    }
    // Distinct given nodes with distinct position sets get distinct features.
    auto parts = feature_partition(h);
    auto cond = conditional_init(g, q);
    CHECK(equivalent(parts, cond.colors));
  }
}

TEST_CASE("layer: edgeless graph and single-edge hand computation") {
  auto empty = RelationalHypergraph::build({{0, "r", 2}}, {}, 3);
  auto m = init_model(small_config(1, 2, 4, 1), 9);
  m.cfg.layer_norm = false;
  m = init_model(m.cfg, 9);
  FeatureMap h(3, 4);
  for (std::size_t i = 0; i < h.data.size(); ++i) h.data[i] = 0.1 * static_cast<double>(i) - 0.3;
  auto out = hcnet_layer(empty, Query{0, {0}, 2}, h, m, 0);
  std::vector<double> x(8, 0.0), z(4);
  for (NodeId v = 0; v < 3; ++v) {
    std::copy(h.row(v), h.row(v) + 4, x.begin());
    for (std::size_t r = 0; r < 4; ++r) {
      double s = m.params.get("layer0.b").data[r];
      for (std::size_t c = 0; c < 8; ++c) s += m.params.get("layer0.W").data[r * 8 + c] * x[c];
      CHECK(out.row(v)[r] == doctest::Approx(std::max(s, 0.0) + h.row(v)[r]).epsilon(1e-14));
    }
  }

  // r(a, b), d = 1, W = [1 1], alpha = 1, w_r = 3, bias 0.5, no norm or skip.
  auto g = RelationalHypergraph::build({{0, "r", 2}}, {{0, {0, 1}}}, 2);
  ModelConfig c = small_config(1, 2, 1, 1);
  c.mode = MessageMode::QueryIndependent;
  c.pe = PeKind::Constant;
  c.layer_norm = false;
  c.skip = false;
  auto tiny = init_model(c, 1);
  set(tiny, "layer0.W", {1, 1});
  set(tiny, "layer0.b", {0.5});
  set(tiny, "layer0.alpha", {1});
  set(tiny, "layer0.rel", {3});
  FeatureMap hab(2, 1);
  hab.data = {2.0, -0.25};
  auto o = hcnet_layer(g, Query{0, {0}, 2}, hab, tiny, 0);
  CHECK(o.row(1)[0] == doctest::Approx(std::max(-0.25 + 2.0 * 3 + 0.5, 0.0)));
  CHECK(o.row(0)[0] == doctest::Approx(std::max(2.0 + -0.25 * 3 + 0.5, 0.0)));
  hab.data = {-2.0, -0.25};
  o = hcnet_layer(g, Query{0, {0}, 2}, hab, tiny, 0);
  CHECK(o.row(1)[0] == 0.0);

  FeatureMap wrong(2, 3);
  try {
    hcnet_layer(g, Query{0, {0}, 2}, wrong, tiny, 0);
    FAIL("expected ShapeMismatch");
  } catch (const NnError& e) {
    CHECK(e.code() == NnErrc::ShapeMismatch);
  }
}

TEST_CASE("layer: unary relations use the empty product") {
  auto g = RelationalHypergraph::build({{0, "u", 1}, {1, "r", 2}}, {{0, {1}}}, 2);
  ModelConfig c = small_config(2, 2, 1, 1);
  c.mode = MessageMode::QueryIndependent;
  c.pe = PeKind::Constant;
  c.layer_norm = false;
  c.skip = false;
  auto m = init_model(c, 1);
  set(m, "layer0.W", {0, 1});
  set(m, "layer0.b", {0});
  set(m, "layer0.rel", {2.5, 1});
  FeatureMap h(2, 1);
  auto o = hcnet_layer(g, Query{1, {0}, 2}, h, m, 0);
  CHECK(o.row(1)[0] == 2.5);
  CHECK(o.row(0)[0] == 0.0);
}

TEST_CASE("alpha = 0 makes messages query independent") {
  auto g = fixtures::degree_award_graph();
  ModelConfig c = small_config(2, 4, 6, 1);
  c.mode = MessageMode::QueryIndependent;
  auto m = init_model(c, 2);
  set(m, "layer0.alpha", {0});
  Query q1{fixtures::Awarded, {fixtures::Physics, fixtures::Nobel}, 3};
  Query q2{fixtures::StudyDegree, {fixtures::BA, fixtures::BA, fixtures::Hawking}, 2};
  ForwardOptions fo;
  fo.record = true;
  auto t1 = hcnet_forward(g, q1, m, fo);
  auto t2 = hcnet_forward(g, q2, m, fo);
  CHECK(t1.layers[0].msg.data == t2.layers[0].msg.data);
}

TEST_CASE("forward: zero layers, ternary ring, HRNet symmetry") {
  auto g = fixtures::two_hop_ring();
  auto m = init_model(small_config(2, 3, 16, 3), 11);
  Query q{0, {0, 6}, 2};
  ForwardOptions zero;
  zero.layers = 0;
  auto t0 = hcnet_forward(g, q, m, zero);
  CHECK(t0.final.data == hcnet_init(g, q, m, InitVariant::PZ).data);
  auto t = hcnet_forward(g, q, m);
  CHECK_FALSE(rows_equal(t.final, 2, 4));

  ModelConfig hc = small_config(3, 3, 16, 4);
  hc.kind = ModelKind::HRNet;
  auto hr = init_model(hc, 12);
  CHECK(hr.cfg.mode == MessageMode::QueryIndependent);
  auto t_zero = hrnet_forward(g, q, hr, zero);
  for (double x : t_zero.final.data) CHECK(x == 1.0);

  auto cyc = hypercycle(8, 3);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto p = init_model(hc, seed);
    ForwardOptions fo;
    fo.record = true;
    auto tr = hrnet_forward(cyc, Query{kQueryRelation, {0}, 2}, p, fo);
    for (const auto& h : layer_features(tr)) {
      for (NodeId v = 2; v < 8; v += 2) CHECK(rows_equal(h, 0, v));
      for (NodeId v = 3; v < 8; v += 2) CHECK(rows_equal(h, 1, v));
    }
  }
}

TEST_CASE("property: permutation equivariance") {
  Rng rng(31);
  for (int t = 0; t < 15; ++t) {
    RandomGraphSpec spec;
    auto g = random_hypergraph(rng, spec);
    ModelConfig c = small_config(static_cast<int>(g.relation_count()), g.max_arity(), 8, 3);
    if (t % 2) c.kind = ModelKind::HRNet;
    auto m = init_model(c, static_cast<std::uint64_t>(t));
    auto q = random_query(rng, g);
    auto perm = random_permutation(rng, g.node_count());
    auto pg = apply_permutation(g, perm);
    auto pq = permute_query(q, perm);
    auto a = encode(g, q, m);
    auto b = encode(pg, pq, m);
    auto sa = score_all(a, m);
    auto sb = score_all(b, m);
    for (NodeId v = 0; v < g.node_count(); ++v) {
      for (std::size_t k = 0; k < m.d(); ++k) CHECK(std::abs(a.final.row(v)[k] - b.final.row(perm[v])[k]) <= 1e-9);
      CHECK(std::abs(sa[v] - sb[perm[v]]) <= 1e-9);
    }
  }
}

TEST_CASE("property: WL rounds refine feature partitions") {
  Rng rng(77);
  for (int t = 0; t < 30; ++t) {
    RandomGraphSpec spec;
    auto g = random_hypergraph(rng, spec);
    auto q = random_query(rng, g);
    for (auto kind : {ModelKind::HCNet, ModelKind::HRNet}) {
      ModelConfig c = small_config(static_cast<int>(g.relation_count()), g.max_arity(), 8, 4);
      c.kind = kind;
      auto m = init_model(c, static_cast<std::uint64_t>(t));
      ForwardOptions fo;
      fo.record = true;
      auto feats = layer_features(encode(g, q, m, fo));
      auto wl = kind == ModelKind::HCNet
                    ? conditional_run(g, q, 4)
                    : hrwl1_run(g, NodeColoring{std::vector<ColorId>(g.node_count(), 0), 0}, 4);
      for (std::size_t l = 0; l < feats.size(); ++l) CHECK(refines(wl[l].colors, feature_partition(feats[l])));
    }
  }
}

TEST_CASE("decoders") {
  ModelConfig c = small_config(2, 3, 4, 1);
  auto m = init_model(c, 3);
  std::vector<double> h{0.3, -1, 2, 0.5}, z{1, 1, -1, 0};
  const double p = decode_unary(h, z, m);
  CHECK(p > 0.0);
  CHECK(p < 1.0);
  auto bumped = m;
  bumped.params.mut("dec.b2").data[0] += 0.5;
  CHECK(decode_unary(h, z, bumped) > p);

  auto zero = m;
  for (std::size_t i = 0; i < zero.params.size(); ++i)
    if (zero.params.name(i).starts_with("dec.")) std::fill(zero.params.mut(i).data.begin(), zero.params.mut(i).data.end(), 0.0);
  CHECK(decode_unary(h, z, zero) == 0.5);
  CHECK_THROWS_AS(decode_unary(std::vector<double>{1, 2}, z, m), NnError);

  c.kind = ModelKind::HRNet;
  auto k = init_model(c, 3);
  std::vector<std::span<const double>> hs{h, h};
  const double pk = decode_kary(hs, z, k);
  CHECK(pk > 0.0);
  CHECK(pk < 1.0);
  auto kb = k;
  kb.params.mut("dec.b2").data[0] += 0.5;
  CHECK(decode_kary(hs, z, kb) > pk);
  std::vector<std::span<const double>> too_many{h, h, h, h};
  CHECK_THROWS_AS(decode_kary(too_many, z, k), NnError);
}

TEST_CASE("backward: zero gradient, stale trace, hand-derived d=1 case") {
  auto g = fixtures::degree_award_graph();
  auto m = init_model(small_config(2, 4), 5);
  Query q{fixtures::Awarded, {fixtures::Physics, fixtures::Nobel}, 3};
  ForwardOptions fo;
  fo.record = true;
  auto tr = hcnet_forward(g, q, m, fo);
  auto s = score_all(tr, m);
  std::vector<double> zeros(s.size(), 0.0);
  auto grads = backward(tr, m, zeros);
  for (std::size_t i = 0; i < grads.size(); ++i)
    for (double x : grads[i].data) CHECK(x == 0.0);
  CHECK_THROWS_AS(backward(tr, m, std::vector<double>(1, 1.0)), NnError);

  auto m2 = m;
  m2.params.mut("layer0.b").data[0] += 1e-3;
  try {
    backward(tr, m2, zeros);
    FAIL("expected StaleTrace");
  } catch (const NnError& e) {
    CHECK(e.code() == NnErrc::StaleTrace);
  }
  auto unrecorded = hcnet_forward(g, q, m);
  CHECK_THROWS_AS(backward(unrecorded, m, std::vector<double>{}), NnError);

  // r(a, b), d = 1, z-only init, constant p = 1, one layer, no norm or skip.
  // h_a = z = 2, h_b = 0; out_b = W0 h_b + W1 w (alpha h_a + (1-alpha) p) + b.
  auto e = RelationalHypergraph::build({{0, "r", 2}}, {{0, {0, 1}}}, 2);
  ModelConfig c = small_config(1, 2, 1, 1);
  c.mode = MessageMode::QueryIndependent;
  c.pe = PeKind::Constant;
  c.init = InitVariant::ZOnly;
  c.layer_norm = false;
  c.skip = false;
  auto t = init_model(c, 1);
  set(t, "layer0.W", {1, 1});
  set(t, "layer0.b", {0.5});
  set(t, "layer0.alpha", {1});
  set(t, "layer0.rel", {3});
  set(t, "query", {2});
  auto tt = hcnet_forward(e, Query{0, {0}, 2}, t, fo);
  CHECK(tt.final.row(1)[0] == doctest::Approx(6.5));
  FeatureMap df(2, 1);
  df.row(1)[0] = 1.0;
  auto gr = backward_features(tt, t, df);
  CHECK(gr.get("layer0.W").data == std::vector<double>{0.0, 6.0});
  CHECK(gr.get("layer0.b").data[0] == 1.0);
  CHECK(gr.get("layer0.rel").data[0] == doctest::Approx(2.0));
  CHECK(gr.get("layer0.alpha").data[0] == doctest::Approx(3.0 * (2.0 - 1.0)));
  CHECK(gr.get("query").data[0] == doctest::Approx(3.0));
}

TEST_CASE("gradient check against central differences") {
  Rng rng(101);
  for (int t = 0; t < 6; ++t) {
    RandomGraphSpec spec;
    spec.max_nodes = 8;
    auto g = random_hypergraph(rng, spec);
    ModelConfig c = small_config(static_cast<int>(g.relation_count()), g.max_arity(), 4, 2);
    if (t % 3 == 1) c.mode = MessageMode::QueryIndependent;
    if (t % 3 == 2) c.kind = ModelKind::HRNet;
    if (t % 2) c.pe = PeKind::Learnable;
    auto m = init_model(c, static_cast<std::uint64_t>(t));
    jitter_parameters(m, static_cast<std::uint64_t>(t), 0.5);
    auto q = random_query(rng, g);
    auto rep = grad_check(g, q, m, {});
    INFO("worst tensor " << rep.worst_tensor);
    CHECK(rep.max_rel_error < 1e-4);
    CHECK(rep.checked > 0);
  }
}

TEST_CASE("checkpoint round trip stores float32") {
  auto c = small_config(3, 4, 6, 2);
  c.pe = PeKind::Learnable;
  auto m = init_model(c, 17);
  auto dir = fixtures::temp_dir("ckpt");
  auto path = (dir / "m.ckpt").string();
  save_checkpoint(path, m, 17, {{"epoch", 3}});
  auto ck = load_checkpoint(path);
  CHECK(ck.seed == 17);
  CHECK(ck.extra["epoch"] == 3);
  CHECK(to_json(ck.model.cfg) == to_json(m.cfg));
  REQUIRE(ck.model.params.size() == m.params.size());
  for (std::size_t i = 0; i < m.params.size(); ++i) {
    CHECK(ck.model.params.name(i) == m.params.name(i));
    for (std::size_t k = 0; k < m.params[i].size(); ++k)
      CHECK(ck.model.params[i].data[k] == static_cast<double>(static_cast<float>(m.params[i].data[k])));
  }
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 4);
  CHECK_THROWS_AS(load_checkpoint(path), CheckpointError);
  CHECK_THROWS_AS(load_checkpoint((dir / "missing").string()), CheckpointError);
}
