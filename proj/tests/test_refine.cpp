#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "hcnet/random_instances.hpp"
#include "hcnet/refine.hpp"
#include "hcnet/synth.hpp"

using namespace hcnet;

namespace {

NodeColoring uniform(const RelationalHypergraph& g) {
  return NodeColoring{std::vector<ColorId>(g.node_count(), 0), 0};
}

// Test-only refinement using printed string keys and std::map interning.
std::vector<ColorId> naive_hrwl1_step(const RelationalHypergraph& g, const std::vector<ColorId>& c) {
  std::vector<std::string> keys;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    std::multiset<std::string> msgs;
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      const auto& nodes = g.edge(e).nodes;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i] != v) continue;
        std::ostringstream m;
        m << "r" << g.edge(e).relation << "@" << i << "[";
        for (std::size_t j = 0; j < nodes.size(); ++j)
          if (j != i) m << c[nodes[j]] << ":" << j << ",";
        m << "]";
        msgs.insert(m.str());
      }
    }
    std::ostringstream k;
    k << c[v] << "{";
    for (const auto& m : msgs) k << m << ";";
    keys.push_back(k.str() + "}");
  }
  std::map<std::string, ColorId> table;
  for (const auto& k : keys) table.emplace(k, 0);
  ColorId next = 0;
  for (auto& [k, id] : table) id = next++;
  std::vector<ColorId> out;
  for (const auto& k : keys) out.push_back(table[k]);
  return out;
}

}  // namespace

TEST_CASE("interner: sorted-key ids, independent of arrival order") {
  ColorInterner in;
  auto a = in.assign({{3}, {1, 2}, {3}, {0}});
  CHECK(a == std::vector<ColorId>{2, 1, 2, 0});
  auto b = in.assign({{0}, {3}, {1, 2}});
  CHECK(b == std::vector<ColorId>{0, 2, 1});
}

TEST_CASE("hrwl1: HyperCycle(8,3) splits into parity classes") {
  auto g = hypercycle(8, 3);
  auto run = hrwl1_run(g, uniform(g), kUntilStable);
  CHECK(run.size() <= 3);
  CHECK(run[1].class_count() == 2);
  CHECK(run.back().class_count() == 2);
  for (NodeId v = 0; v < 8; ++v) CHECK((run[1].colors[v] == run[1].colors[v % 2]));
  CHECK(run[1].colors[0] != run[1].colors[1]);
  CHECK(equivalent(hrwl1_step(g, run[1]), run[1]));
}

TEST_CASE("hrwl1: edgeless graph keeps its partition") {
  auto g = RelationalHypergraph::build({{0, "r", 2}}, {}, 4, std::vector<ColorId>{0, 1, 1, 2});
  NodeColoring c{g.colors(), 0};
  auto run = hrwl1_run(g, c, 3);
  for (const auto& r : run) CHECK(equivalent(r, c));
}

TEST_CASE("hrwl1: automorphic ring nodes stay equal") {
  auto g = fixtures::two_hop_ring();
  auto run = hrwl1_run(g, uniform(g), 6);
  for (const auto& r : run) CHECK(r.colors[2] == r.colors[4]);
  CHECK(hrwl1_run(g, uniform(g), 0).size() == 1);
}

TEST_CASE("hrwl1 agrees with the naive string-key oracle") {
  Rng rng(21);
  for (int t = 0; t < 40; ++t) {
    RandomGraphSpec spec;
    spec.colors = 2;
    auto g = random_hypergraph(rng, spec);
    NodeColoring c{g.colors(), 0};
    std::vector<ColorId> naive = g.colors();
    for (int l = 0; l < 4; ++l) {
      c = hrwl1_step(g, c);
      naive = naive_hrwl1_step(g, naive);
      CHECK(equivalent(c.colors, naive));
    }
  }
}

TEST_CASE("property: refinement is monotone and stabilizes within |V| rounds") {
  Rng rng(8);
  for (int t = 0; t < 40; ++t) {
    RandomGraphSpec spec;
    spec.max_nodes = 12;
    auto g = random_hypergraph(rng, spec);
    auto run = hrwl1_run(g, uniform(g), kUntilStable);
    CHECK(run.size() <= g.node_count() + 1);
    for (std::size_t l = 1; l < run.size(); ++l) CHECK(refines(run[l], run[l - 1]));
    CHECK(equivalent(run.back(), run[run.size() - 2]));
  }
}

TEST_CASE("property: isomorphism invariance") {
  Rng rng(13);
  for (int t = 0; t < 30; ++t) {
    auto g = random_hypergraph(rng, {});
    auto perm = random_permutation(rng, g.node_count());
    auto pg = apply_permutation(g, perm);
    auto q = random_query(rng, g);
    auto a = conditional_run(g, q, 4);
    auto b = conditional_run(pg, permute_query(q, perm), 4);
    for (std::size_t l = 0; l < a.size(); ++l) {
      std::vector<ColorId> pulled(g.node_count());
      for (NodeId v = 0; v < g.node_count(); ++v) pulled[v] = b[l].colors[perm[v]];
      CHECK(a[l].colors == pulled);  // sorted-key ids make colors canonical
    }
  }
}

TEST_CASE("refines / equivalent") {
  std::vector<ColorId> distinct{0, 1, 2, 3}, constant{0, 0, 0, 0}, two{0, 0, 1, 1}, three{0, 1, 2, 2};
  CHECK(refines(distinct, two));
  CHECK(!refines(constant, two));
  CHECK(equivalent(two, two));
  CHECK(equivalent(two, std::vector<ColorId>{7, 7, 3, 3}));
  CHECK(refines(three, two));
  CHECK(!equivalent(three, two));
  CHECK_THROWS_AS(refines(two, std::vector<ColorId>{0, 1}), RefineError);
}

TEST_CASE("conditional run") {
  auto g = fixtures::two_hop_ring();
  Query q{0, {0, 6}, 2};  // r(x0, ?, x6)
  auto run = conditional_run(g, q, 2);
  CHECK(run[0].class_count() == 3);
  CHECK(run[0].colors[0] != run[0].colors[6]);
  CHECK(run[2].colors[2] != run[2].colors[4]);

  Query same{0, {3, 3}, 2};
  CHECK(conditional_init(g, same).class_count() == 2);

  auto edgeless = RelationalHypergraph::build({{0, "r", 3}}, {}, 5);
  auto er = conditional_run(edgeless, Query{0, {1, 2}, 1}, 3);
  for (const auto& r : er) CHECK(equivalent(r, er[0]));
}

TEST_CASE("hcwl2: single fact") {
  auto kg = RelationalHypergraph::build({{0, "r", 2}}, {{0, {0, 1}}}, 2);
  auto init = standard_pair_init(2);
  auto run = hcwl2_run(kg, init, 1);
  CHECK(hcwl2_run(kg, init, 0).size() == 1);
  CHECK(run[0].at(0, 0) == run[0].at(1, 1));
  CHECK(run[0].at(0, 0) != run[0].at(0, 1));
  CHECK(run[0].at(0, 1) == run[0].at(1, 0));
  CHECK(run[1].at(0, 1) != run[1].at(1, 0));
  auto bad = RelationalHypergraph::build({{0, "r", 3}}, {}, 2);
  CHECK_THROWS_AS(hcwl2_run(bad, init, 1), RefineError);
  CHECK_THROWS_AS(rawl2plus_run(bad, init, 1), RefineError);
}

TEST_CASE("augmented graph") {
  auto kg = RelationalHypergraph::build({{0, "r", 2}}, {{0, {0, 1}}, {0, {2, 2}}}, 3);
  auto aug = augment_inverse(kg);
  CHECK(aug.relation_count() == 2);
  CHECK(aug.edges() == std::vector<HyperEdge>{{0, {0, 1}}, {0, {2, 2}}, {1, {1, 0}}});
}

TEST_CASE("hcwl2 and rawl2+ agree on loop-free knowledge graphs") {
  Rng rng(99);
  for (int t = 0; t < 30; ++t) {
    auto kg = random_kg(rng, 10, 3, 1.5, false);
    auto init = standard_pair_init(kg.node_count());
    auto a = hcwl2_run(kg, init, 4);
    auto b = rawl2plus_run(kg, init, 4);
    for (int l = 0; l <= 4; ++l) CHECK(equivalent(a[l], b[l]));
  }
}

TEST_CASE("self-loops separate hcwl2 from rawl2+") {
  // A loop r(a,a) is seen at both positions by hcwl2 but has no inverse in the
  // augmented graph, so rawl2+ cannot tell (b,a) from (a,b) after one round.
  auto kg = RelationalHypergraph::build({{0, "r", 2}}, {{0, {0, 0}}, {0, {1, 2}}}, 3);
  auto init = standard_pair_init(3);
  auto h = hcwl2_run(kg, init, 1);
  auto r = rawl2plus_run(kg, init, 1);
  CHECK(r[1].at(1, 0) == r[1].at(0, 1));
  CHECK(h[1].at(1, 0) != h[1].at(0, 1));
  CHECK(!equivalent(h[1], r[1]));
}
