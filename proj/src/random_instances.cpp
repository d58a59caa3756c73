#include "hcnet/random_instances.hpp"

#include <algorithm>
#include <numeric>

namespace hcnet {

namespace {

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

}  // namespace

RelationalHypergraph random_hypergraph(Rng& rng, const RandomGraphSpec& spec) {
  const int n = uniform_int(rng, spec.min_nodes, spec.max_nodes);
  const int nrel = uniform_int(rng, 1, spec.max_relations);
  std::vector<Relation> relations;
  for (int r = 0; r < nrel; ++r)
    relations.push_back({static_cast<RelationId>(r), "r" + std::to_string(r),
                         uniform_int(rng, spec.min_arity, spec.max_arity)});

  const double factor = std::uniform_real_distribution<double>(spec.edge_factor_lo, spec.edge_factor_hi)(rng);
  const int m = std::max(1, static_cast<int>(factor * n));
  std::vector<HyperEdge> edges;
  for (int e = 0; e < m; ++e) {
    HyperEdge edge;
    edge.relation = static_cast<RelationId>(uniform_int(rng, 0, nrel - 1));
    const int k = relations[edge.relation].arity;
    if (spec.allow_repeated_nodes || k > n) {
      for (int i = 0; i < k; ++i) edge.nodes.push_back(static_cast<NodeId>(uniform_int(rng, 0, n - 1)));
    } else {
      std::vector<NodeId> pool(static_cast<std::size_t>(n));
      std::iota(pool.begin(), pool.end(), 0);
      std::shuffle(pool.begin(), pool.end(), rng);
      edge.nodes.assign(pool.begin(), pool.begin() + k);
    }
    edges.push_back(std::move(edge));
  }

  std::vector<ColorId> colors(static_cast<std::size_t>(n), 0);
  if (spec.colors > 1)
    for (auto& c : colors) c = static_cast<ColorId>(uniform_int(rng, 0, spec.colors - 1));
  return RelationalHypergraph::build(std::move(relations), std::move(edges),
                                     static_cast<std::size_t>(n), std::move(colors));
}

RelationalHypergraph random_kg(Rng& rng, int max_nodes, int relations, double edge_factor,
                               bool allow_loops) {
  const int n = uniform_int(rng, 2, max_nodes);
  std::vector<Relation> rels;
  for (int r = 0; r < relations; ++r) rels.push_back({static_cast<RelationId>(r), "r" + std::to_string(r), 2});
  const int m = std::max(1, static_cast<int>(edge_factor * n));
  std::vector<HyperEdge> edges;
  while (static_cast<int>(edges.size()) < m) {
    NodeId a = static_cast<NodeId>(uniform_int(rng, 0, n - 1));
    NodeId b = static_cast<NodeId>(uniform_int(rng, 0, n - 1));
    if (!allow_loops && a == b) continue;
    edges.push_back({static_cast<RelationId>(uniform_int(rng, 0, relations - 1)), {a, b}});
  }
  return RelationalHypergraph::build(std::move(rels), std::move(edges), static_cast<std::size_t>(n));
}

Query random_query(Rng& rng, const RelationalHypergraph& graph) {
  Query q;
  q.relation = static_cast<RelationId>(uniform_int(rng, 0, static_cast<int>(graph.relation_count()) - 1));
  const int k = graph.arity(q.relation);
  q.target = uniform_int(rng, 1, k);
  for (int i = 0; i < k - 1; ++i)
    q.given.push_back(static_cast<NodeId>(uniform_int(rng, 0, static_cast<int>(graph.node_count()) - 1)));
  return q;
}

std::vector<NodeId> random_permutation(Rng& rng, std::size_t n) {
  std::vector<NodeId> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

}  // namespace hcnet
