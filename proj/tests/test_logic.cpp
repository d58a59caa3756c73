#include "doctest.h"
#include "fixtures.hpp"
#include "hcnet/logic.hpp"
#include "hcnet/random_instances.hpp"

using namespace hcnet;
using namespace fixtures;

namespace {

LogicSignature person_sig(const RelationalHypergraph& g) { return signature_of(g, {"Person", "Other"}); }

// Person at x, with a degree from a university that was awarded fewer than two prizes.
FormulaPtr degree_formula() {
  return parse_formula(
      "(color(Person) and exists>=1 StudyDegree@1 [2: not exists>=2 Awarded@3 []])");
}

FormulaPtr degree_formula_with_constants() {
  return parse_formula(
      "(color(Person) and exists>=1 StudyDegree@1 [3:is(Physics), 4:is(BA), "
      "2:not exists>=2 Awarded@3 [1:is(Physics)]])");
}

// Counts edges by a direct scan of the edge list, for the differential oracle.
int brute_count(const RelationalHypergraph& g, const std::string& rel, int pos, NodeId v) {
  int c = 0;
  for (const auto& e : g.edges())
    if (g.relation(e.relation).name == rel && e.nodes[static_cast<std::size_t>(pos - 1)] == v) ++c;
  return c;
}

}  // namespace

TEST_CASE("eval: atoms") {
  auto g = degree_award_graph(true);
  auto sig = person_sig(g);
  CHECK(eval_formula(g, sig, color_atom("Person"), Hawking));
  CHECK(!eval_formula(g, sig, color_atom("Person"), Oxford));
  CHECK_THROWS_AS(eval_formula(g, sig, color_atom("Robot"), Hawking), LogicError);
  CHECK_THROWS_AS(eval_formula(g, sig, exists_geq(1, "Knows", 1), Hawking), LogicError);
  CHECK_THROWS_AS(eval_formula(g, sig, const_atom("BA"), Hawking), LogicError);
}

TEST_CASE("eval: degree example") {
  auto g = degree_award_graph(true);
  auto sig = person_sig(g);
  auto phi = degree_formula();
  CHECK(eval_formula(g, sig, phi, Hawking));
  CHECK(!eval_formula(g, sig, phi, Oxford));
  // Oxford has exactly one award at position 3.
  CHECK(brute_count(g, "Awarded", 3, Oxford) == 1);
  CHECK(eval_formula(g, sig, exists_geq(1, "Awarded", 3), Oxford));
  CHECK(!eval_formula(g, sig, exists_geq(2, "Awarded", 3), Oxford));
}

TEST_CASE("eval_c: constants") {
  auto g = degree_award_graph(true);
  auto sig = person_sig(g);
  sig.constants = {{"Physics", Physics}, {"BA", BA}};
  auto psi = degree_formula_with_constants();
  CHECK(eval_formula_c(g, sig, psi, Hawking));
  CHECK(!eval_formula_c(g, sig, psi, Oxford));
  CHECK(eval_formula_c(g, sig, const_atom("BA"), BA));
  CHECK(!eval_formula_c(g, sig, const_atom("BA"), Physics));
  sig.constants = {{"Physics", Physics}, {"BA", Physics}};
  try {
    eval_formula_c(g, sig, psi, Hawking);
    FAIL("expected InvalidConstants");
  } catch (const LogicError& e) {
    CHECK(e.code() == LogicErrc::InvalidConstants);
  }
}

TEST_CASE("is_hgml_r") {
  CHECK(is_hgml_r(color_atom("a")));
  CHECK(is_hgml_r(parse_formula("exists>=1 r@1 [2:color(a), 3:not color(b)]")));
  CHECK(!is_hgml_r(parse_formula("exists>=1 r@1 [(2:color(a) or 3:color(b))]")));
  CHECK(!is_hgml_r(parse_formula("exists>=1 r@1 [not 2:color(a)]")));
  CHECK(!is_hgml_r(parse_formula("not exists>=1 r@1 [2:exists>=1 r@2 [(1:color(a) or 3:color(a))]]")));
}

TEST_CASE("parser round trip and errors") {
  const char* texts[] = {
      "color(a)",
      "not is(b)",
      "(color(a) and color(b) and color(c))",
      "(color(a) or not color(b))",
      "exists>=3 r@2 []",
      "exists>=1 r@1 [2:color(a), (3:color(b) or not 4:color(a))]",
  };
  for (const char* t : texts) {
    auto f = parse_formula(t);
    CHECK(*parse_formula(to_string(f)) == *f);
  }
  CHECK_THROWS_AS(parse_formula("color(a"), LogicError);
  CHECK_THROWS_AS(parse_formula("(color(a) xor color(b))"), LogicError);
  CHECK_THROWS_AS(parse_formula("exists>=x r@1"), LogicError);
  CHECK_THROWS_AS(parse_formula("color(a) junk"), LogicError);

  Rng rng(4);
  auto g = random_hypergraph(rng, {});
  auto sig = signature_of(g, {"a", "b"});
  sig.constants = {{"k", 0}};
  for (int i = 0; i < 100; ++i) {
    auto f = random_formula(rng, sig, 3, i % 2 == 0);
    CHECK(*parse_formula(to_string(f)) == *f);
  }
}

TEST_CASE("compile: single color atom") {
  auto g = degree_award_graph(true);
  auto sig = person_sig(g);
  auto net = compile_hgml_r(color_atom("Person"), sig);
  CHECK(net.L == 1);
  CHECK(net.W0 == std::vector<std::int64_t>{1});
  auto out = run_compiled(net, g);
  for (NodeId v = 0; v < 5; ++v) CHECK(out[v][0] == (v == Hawking ? 1 : 0));

  auto edgeless = RelationalHypergraph::build(g.relations(), {}, 3, std::vector<ColorId>{0, 1, 0});
  auto out2 = run_compiled(net, edgeless);
  CHECK(out2[0][0] == 1);
  CHECK(out2[1][0] == 0);
}

TEST_CASE("compile: counting row bias") {
  auto kg = RelationalHypergraph::build({{0, "r", 2}}, {{0, {0, 1}}, {0, {0, 2}}, {0, {0, 1}}}, 3,
                                        std::vector<ColorId>{1, 0, 0});
  auto sig = signature_of(kg, {"a", "b"});
  auto f = exists_geq(2, "r", 1, g_at(2, color_atom("a")));
  auto net = compile_hgml_r(f, sig);
  CHECK(net.b[net.root()] == -1);
  CHECK(net.ar[0][net.root()] == 1);
  auto out = run_compiled(net, kg);
  CHECK(out[0][net.root()] == 1);  // three edges, all with an a-colored partner
  CHECK(out[1][net.root()] == 0);
  CHECK_THROWS_AS(compile_hgml_r(parse_formula("exists>=1 r@1 [(2:color(a) or 2:color(b))]"), sig),
                  LogicError);
  CHECK_THROWS_AS(compile_hgml_r(const_atom("x"), sig), LogicError);
  auto bad_colors = RelationalHypergraph::build({{0, "r", 2}}, {}, 1, std::vector<ColorId>{5});
  CHECK_THROWS_AS(run_compiled(net, bad_colors), LogicError);
}

TEST_CASE("compile: degree example") {
  auto g = degree_award_graph(true);
  auto sig = person_sig(g);
  auto net = compile_hgml_r(degree_formula(), sig);
  auto out = run_compiled(net, g);
  CHECK(out[Hawking][net.root()] == 1);
  for (NodeId v = 1; v < 5; ++v) CHECK(out[v][net.root()] == 0);
}

TEST_CASE("property: compiled network matches the evaluator on every subformula") {
  Rng rng(2024);
  int checked = 0;
  for (int t = 0; t < 120; ++t) {
    RandomGraphSpec spec;
    spec.max_nodes = 12;
    spec.max_relations = 3;
    spec.colors = 3;
    auto g = random_hypergraph(rng, spec);
    auto sig = signature_of(g, {"a", "b", "c"});
    auto f = random_formula(rng, sig, 1 + t % 4, true);
    auto net = compile_hgml_r(f, sig);
    auto out = run_compiled(net, g);
    for (std::size_t p = 0; p < net.L; ++p) {
      auto truth = eval_all(g, sig, net.subformulas[p]);
      for (NodeId v = 0; v < g.node_count(); ++v) {
        CHECK(out[v][p] == truth[v]);
        ++checked;
      }
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("property: evaluator invariants") {
  Rng rng(77);
  for (int t = 0; t < 40; ++t) {
    RandomGraphSpec spec;
    spec.max_nodes = 12;
    spec.colors = 2;
    auto g = random_hypergraph(rng, spec);
    auto sig = signature_of(g, {"a", "b"});
    auto f1 = random_formula(rng, sig, 2, false);
    auto f2 = random_formula(rng, sig, 2, false);

    auto perm = random_permutation(rng, g.node_count());
    auto pg = apply_permutation(g, perm);
    auto a = eval_all(g, sig, f1);
    auto b = eval_all(pg, sig, f1);
    for (NodeId v = 0; v < g.node_count(); ++v) CHECK(a[v] == b[perm[v]]);

    auto lhs = eval_all(g, sig, f_not(f_and(f1, f2)));
    auto rhs = eval_all(g, sig, f_or(f_not(f1), f_not(f2)));
    CHECK(lhs == rhs);

    const auto& rel = g.relations()[0];
    auto guard = g_at(rel.arity > 1 ? 2 : 1, f1);
    for (int n = 1; n < 4; ++n) {
      auto hi = eval_all(g, sig, exists_geq(n + 1, rel.name, 1, rel.arity > 1 ? guard : nullptr));
      auto lo = eval_all(g, sig, exists_geq(n, rel.name, 1, rel.arity > 1 ? guard : nullptr));
      for (NodeId v = 0; v < g.node_count(); ++v) CHECK((!hi[v] || lo[v]));
    }
  }
}

TEST_CASE("property: compiled network is equivariant") {
  Rng rng(31);
  for (int t = 0; t < 20; ++t) {
    RandomGraphSpec spec;
    spec.max_nodes = 10;
    spec.colors = 2;
    auto g = random_hypergraph(rng, spec);
    auto sig = signature_of(g, {"a", "b"});
    auto net = compile_hgml_r(random_formula(rng, sig, 3, true), sig);
    auto perm = random_permutation(rng, g.node_count());
    auto a = run_compiled(net, g);
    auto b = run_compiled(net, apply_permutation(g, perm));
    for (NodeId v = 0; v < g.node_count(); ++v) CHECK(a[v] == b[perm[v]]);
  }
}
