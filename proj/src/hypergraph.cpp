#include "hcnet/hypergraph.hpp"

#include <algorithm>
#include <functional>
#include <unordered_set>

namespace hcnet {

RelationalHypergraph RelationalHypergraph::build(std::vector<Relation> relations,
                                                 std::vector<HyperEdge> edges,
                                                 std::size_t node_count,
                                                 std::optional<std::vector<ColorId>> colors) {
  RelationalHypergraph g;
  std::unordered_set<std::string> names;
  for (std::size_t r = 0; r < relations.size(); ++r) {
    const Relation& rel = relations[r];
    if (rel.id != r)
      throw GraphError(GraphErrc::InvalidRelation,
                       "relation ids must be contiguous; got " + std::to_string(rel.id) +
                           " at index " + std::to_string(r));
    if (rel.arity < 1)
      throw GraphError(GraphErrc::InvalidRelation, "relation '" + rel.name + "' has arity < 1");
    if (!names.insert(rel.name).second)
      throw GraphError(GraphErrc::InvalidRelation, "duplicate relation name '" + rel.name + "'");
    g.max_arity_ = std::max(g.max_arity_, rel.arity);
  }

  for (std::size_t e = 0; e < edges.size(); ++e) {
    const HyperEdge& edge = edges[e];
    if (edge.relation >= relations.size())
      throw GraphError(GraphErrc::UnknownRelation,
                       "edge " + std::to_string(e) + " references unknown relation " +
                           std::to_string(edge.relation));
    const int k = relations[edge.relation].arity;
    if (static_cast<int>(edge.nodes.size()) != k)
      throw GraphError(GraphErrc::ArityMismatch,
                       "edge " + std::to_string(e) + " has " + std::to_string(edge.nodes.size()) +
                           " nodes but relation '" + relations[edge.relation].name +
                           "' has arity " + std::to_string(k));
    for (std::size_t i = 0; i < edge.nodes.size(); ++i) {
      if (edge.nodes[i] >= node_count)
        throw GraphError(GraphErrc::NodeOutOfRange,
                         "edge " + std::to_string(e) + " position " + std::to_string(i + 1) +
                             ": node " + std::to_string(edge.nodes[i]) + " out of range");
    }
  }

  if (colors) {
    if (colors->size() != node_count)
      throw GraphError(GraphErrc::NodeOutOfRange, "color vector length differs from node count");
    g.colors_ = std::move(*colors);
  } else {
    g.colors_.assign(node_count, 0);
  }

  // CSR incidence. Edges are scanned in id order and positions in order, so
  // each row comes out sorted by (edge, position) without an explicit sort.
  g.offsets_.assign(node_count + 1, 0);
  for (const auto& edge : edges)
    for (NodeId v : edge.nodes) ++g.offsets_[v + 1];
  for (std::size_t v = 0; v < node_count; ++v) g.offsets_[v + 1] += g.offsets_[v];
  g.incidence_.resize(g.offsets_[node_count]);
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& nodes = edges[e].nodes;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      g.incidence_[cursor[nodes[i]]++] = Incidence{static_cast<EdgeId>(e), static_cast<int>(i) + 1};
  }

  g.node_count_ = node_count;
  g.relations_ = std::move(relations);
  g.edges_ = std::move(edges);
  return g;
}

const Relation& RelationalHypergraph::relation(RelationId r) const {
  if (r >= relations_.size())
    throw GraphError(GraphErrc::UnknownRelation, "unknown relation " + std::to_string(r));
  return relations_[r];
}

std::optional<RelationId> RelationalHypergraph::find_relation(const std::string& name) const {
  for (const auto& rel : relations_)
    if (rel.name == name) return rel.id;
  return std::nullopt;
}

const HyperEdge& RelationalHypergraph::edge(EdgeId e) const {
  if (e >= edges_.size())
    throw GraphError(GraphErrc::NodeOutOfRange, "edge " + std::to_string(e) + " out of range");
  return edges_[e];
}

std::span<const Incidence> RelationalHypergraph::incidence(NodeId v) const {
  if (v >= node_count_)
    throw GraphError(GraphErrc::NodeOutOfRange, "node " + std::to_string(v) + " out of range");
  return {incidence_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
}

std::vector<PositionedNode> RelationalHypergraph::positional_neighborhood(EdgeId e, int i) const {
  const HyperEdge& ed = edge(e);
  const int k = static_cast<int>(ed.nodes.size());
  if (i < 1 || i > k)
    throw GraphError(GraphErrc::PositionOutOfRange,
                     "position " + std::to_string(i) + " outside 1.." + std::to_string(k));
  std::vector<PositionedNode> out;
  out.reserve(static_cast<std::size_t>(k - 1));
  for (int j = 1; j <= k; ++j)
    if (j != i) out.push_back({ed.nodes[static_cast<std::size_t>(j - 1)], j});
  return out;
}

namespace {

void check_bijection(std::span<const NodeId> perm) {
  std::vector<char> seen(perm.size(), 0);
  for (NodeId p : perm) {
    if (p >= perm.size() || seen[p])
      throw GraphError(GraphErrc::NotABijection, "permutation is not a bijection");
    seen[p] = 1;
  }
}

}  // namespace

RelationalHypergraph apply_permutation(const RelationalHypergraph& graph,
                                       std::span<const NodeId> perm) {
  if (perm.size() != graph.node_count())
    throw GraphError(GraphErrc::NotABijection, "permutation size differs from node count");
  check_bijection(perm);
  std::vector<HyperEdge> edges = graph.edges();
  for (auto& e : edges)
    for (auto& v : e.nodes) v = perm[v];
  std::vector<ColorId> colors(graph.node_count());
  for (std::size_t v = 0; v < perm.size(); ++v) colors[perm[v]] = graph.color(static_cast<NodeId>(v));
  return RelationalHypergraph::build(graph.relations(), std::move(edges), graph.node_count(),
                                     std::move(colors));
}

std::vector<NodeId> invert_permutation(std::span<const NodeId> perm) {
  check_bijection(perm);
  std::vector<NodeId> inv(perm.size());
  for (std::size_t v = 0; v < perm.size(); ++v) inv[perm[v]] = static_cast<NodeId>(v);
  return inv;
}

std::vector<HyperEdge> edge_multiset(const RelationalHypergraph& graph) {
  std::vector<HyperEdge> out = graph.edges();
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeId> Query::complete(NodeId candidate) const {
  std::vector<NodeId> tuple;
  tuple.reserve(given.size() + 1);
  for (std::size_t i = 0; i <= given.size(); ++i) {
    if (static_cast<int>(i) + 1 == target) tuple.push_back(candidate);
    if (i < given.size()) tuple.push_back(given[i]);
  }
  return tuple;
}

Query query_from_fact(const HyperEdge& fact, int target) {
  const int k = static_cast<int>(fact.nodes.size());
  if (target < 1 || target > k)
    throw GraphError(GraphErrc::PositionOutOfRange,
                     "target " + std::to_string(target) + " outside 1.." + std::to_string(k));
  Query q;
  q.relation = fact.relation;
  q.target = target;
  for (int j = 1; j <= k; ++j)
    if (j != target) q.given.push_back(fact.nodes[static_cast<std::size_t>(j - 1)]);
  return q;
}

void validate_query(const RelationalHypergraph& graph, const Query& query) {
  const int k = graph.arity(query.relation);
  if (static_cast<int>(query.given.size()) != k - 1)
    throw GraphError(GraphErrc::QueryMismatch,
                     "query has " + std::to_string(query.given.size()) +
                         " given nodes for a relation of arity " + std::to_string(k));
  if (query.target < 1 || query.target > k)
    throw GraphError(GraphErrc::QueryMismatch, "query target out of range");
  for (NodeId v : query.given)
    if (v >= graph.node_count())
      throw GraphError(GraphErrc::NodeOutOfRange, "query node " + std::to_string(v) + " out of range");
}

Query permute_query(const Query& query, std::span<const NodeId> perm) {
  Query q = query;
  for (auto& v : q.given) v = perm[v];
  return q;
}

std::size_t FactSet::Hash::operator()(const HyperEdge& e) const noexcept {
  std::size_t h = std::hash<std::uint32_t>{}(e.relation);
  for (NodeId v : e.nodes) h ^= std::hash<std::uint32_t>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::size_t GraphView::masked_count() const noexcept {
  return static_cast<std::size_t>(std::count(masked_.begin(), masked_.end(), char{1}));
}

std::vector<Incidence> GraphView::visible_incidence(NodeId v) const {
  auto all = graph_->incidence(v);
  std::vector<Incidence> out;
  out.reserve(all.size());
  for (const auto& inc : all)
    if (!is_masked(inc.edge)) out.push_back(inc);
  return out;
}

}  // namespace hcnet
