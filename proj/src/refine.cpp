#include "hcnet/refine.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <unordered_map>

namespace hcnet {

namespace {

std::size_t count_classes(const std::vector<ColorId>& colors) {
  std::vector<ColorId> c = colors;
  std::sort(c.begin(), c.end());
  return static_cast<std::size_t>(std::unique(c.begin(), c.end()) - c.begin());
}

void require_kg(const RelationalHypergraph& kg) {
  for (const auto& r : kg.relations())
    if (r.arity != 2)
      throw RefineError(RefineErrc::NotAKnowledgeGraph,
                        "relation '" + r.name + "' has arity " + std::to_string(r.arity));
}

void require_pair_domain(const RelationalHypergraph& kg, const PairColoring& init) {
  if (init.n != kg.node_count() || init.colors.size() != init.n * init.n)
    throw RefineError(RefineErrc::DomainMismatch, "pair coloring does not cover V x V");
}

}  // namespace

std::size_t NodeColoring::class_count() const { return count_classes(colors); }
std::size_t PairColoring::class_count() const { return count_classes(colors); }

std::vector<ColorId> ColorInterner::assign(const std::vector<ColorKey>& keys) {
  std::vector<std::uint32_t> order(keys.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) { return keys[a] < keys[b]; });
  std::vector<ColorId> ids(keys.size());
  ColorId next = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i > 0 && keys[order[i]] != keys[order[i - 1]]) ++next;
    ids[order[i]] = next;
  }
  return ids;
}

NodeColoring hrwl1_step(const RelationalHypergraph& graph, const NodeColoring& coloring) {
  const std::size_t n = graph.node_count();
  if (coloring.colors.size() != n)
    throw RefineError(RefineErrc::DomainMismatch, "coloring does not cover every node");
  std::vector<ColorKey> keys(n);
  std::vector<ColorKey> messages;
  for (NodeId v = 0; v < n; ++v) {
    messages.clear();
    for (const auto& inc : graph.incidence(v)) {
      const HyperEdge& e = graph.edge(inc.edge);
      // (relation, own position, then (color(w), j) for j != i in position order).
      ColorKey msg;
      msg.reserve(2 * e.nodes.size() + 2);
      msg.push_back(e.relation);
      msg.push_back(static_cast<std::uint64_t>(inc.position));
      for (std::size_t j = 0; j < e.nodes.size(); ++j) {
        if (static_cast<int>(j) + 1 == inc.position) continue;
        msg.push_back(coloring.colors[e.nodes[j]]);
        msg.push_back(j + 1);
      }
      messages.push_back(std::move(msg));
    }
    std::sort(messages.begin(), messages.end());
    ColorKey& key = keys[v];
    key.push_back(coloring.colors[v]);
    key.push_back(messages.size());
    for (const auto& m : messages) {
      key.push_back(m.size());
      key.insert(key.end(), m.begin(), m.end());
    }
  }
  return NodeColoring{ColorInterner{}.assign(keys), coloring.round + 1};
}

std::vector<NodeColoring> hrwl1_run(const RelationalHypergraph& graph, NodeColoring init,
                                    int rounds) {
  std::vector<NodeColoring> out;
  init.round = 0;
  out.push_back(std::move(init));
  if (rounds == kUntilStable) {
    // The class count can only grow, so an unchanged count means a fixed partition.
    while (true) {
      out.push_back(hrwl1_step(graph, out.back()));
      if (out.back().class_count() == out[out.size() - 2].class_count()) break;
    }
    return out;
  }
  for (int l = 0; l < rounds; ++l) out.push_back(hrwl1_step(graph, out.back()));
  return out;
}

NodeColoring conditional_init(const RelationalHypergraph& graph, const Query& query) {
  validate_query(graph, query);
  std::vector<ColorKey> keys(graph.node_count(), ColorKey{0});
  for (std::size_t idx = 0; idx < query.given.size(); ++idx) {
    ColorKey& k = keys[query.given[idx]];
    if (k.size() == 1) k = {1, query.relation};
    k.push_back(static_cast<std::uint64_t>(query.position_of(idx)));
  }
  return NodeColoring{ColorInterner{}.assign(keys), 0};
}

std::vector<NodeColoring> conditional_run(const RelationalHypergraph& graph, const Query& query,
                                          int rounds) {
  return hrwl1_run(graph, conditional_init(graph, query), rounds);
}

bool refines(const std::vector<ColorId>& a, const std::vector<ColorId>& b) {
  if (a.size() != b.size())
    throw RefineError(RefineErrc::DomainMismatch, "colorings have different domains");
  std::unordered_map<ColorId, ColorId> image;
  for (std::size_t x = 0; x < a.size(); ++x) {
    auto [it, fresh] = image.emplace(a[x], b[x]);
    if (!fresh && it->second != b[x]) return false;
  }
  return true;
}

bool equivalent(const std::vector<ColorId>& a, const std::vector<ColorId>& b) {
  return refines(a, b) && refines(b, a);
}

bool refines(const NodeColoring& a, const NodeColoring& b) { return refines(a.colors, b.colors); }
bool equivalent(const NodeColoring& a, const NodeColoring& b) {
  return equivalent(a.colors, b.colors);
}
bool refines(const PairColoring& a, const PairColoring& b) { return refines(a.colors, b.colors); }
bool equivalent(const PairColoring& a, const PairColoring& b) {
  return equivalent(a.colors, b.colors);
}

PairColoring standard_pair_init(std::size_t n) {
  PairColoring p{n, std::vector<ColorId>(n * n, 0), 0};
  for (std::size_t u = 0; u < n; ++u) p.colors[u * n + u] = 1;
  return p;
}

std::vector<PairColoring> hcwl2_run(const RelationalHypergraph& kg, const PairColoring& init,
                                    int rounds) {
  require_kg(kg);
  require_pair_domain(kg, init);
  const std::size_t n = kg.node_count();
  std::vector<PairColoring> out{init};
  out.back().round = 0;
  std::vector<ColorKey> keys(n * n);
  std::vector<std::array<std::uint64_t, 3>> msgs;
  for (int l = 0; l < rounds; ++l) {
    const PairColoring& old = out.back();
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = 0; v < n; ++v) {
        msgs.clear();
        for (const auto& inc : kg.incidence(v)) {
          const HyperEdge& e = kg.edge(inc.edge);
          const int j = inc.position == 1 ? 2 : 1;
          const NodeId w = e.nodes[static_cast<std::size_t>(j - 1)];
          msgs.push_back({old.at(u, w), static_cast<std::uint64_t>(j), e.relation});
        }
        std::sort(msgs.begin(), msgs.end());
        ColorKey& key = keys[u * n + v];
        key.clear();
        key.push_back(old.at(u, v));
        key.push_back(msgs.size());
        for (const auto& m : msgs) key.insert(key.end(), m.begin(), m.end());
      }
    }
    out.push_back(PairColoring{n, ColorInterner{}.assign(keys), l + 1});
  }
  return out;
}

RelationalHypergraph augment_inverse(const RelationalHypergraph& kg) {
  require_kg(kg);
  const auto& rels = kg.relations();
  const RelationId base = static_cast<RelationId>(rels.size());
  std::vector<Relation> aug = rels;
  for (const auto& r : rels) aug.push_back({r.id + base, r.name + "^-", 2});
  std::vector<HyperEdge> edges = kg.edges();
  for (const auto& e : kg.edges())
    if (e.nodes[0] != e.nodes[1]) edges.push_back({e.relation + base, {e.nodes[1], e.nodes[0]}});
  return RelationalHypergraph::build(std::move(aug), std::move(edges), kg.node_count(), kg.colors());
}

std::vector<PairColoring> rawl2plus_run(const RelationalHypergraph& kg, const PairColoring& init,
                                        int rounds) {
  require_kg(kg);
  require_pair_domain(kg, init);
  const RelationalHypergraph aug = augment_inverse(kg);
  const std::size_t n = aug.node_count();

  // out_nbrs[v] = {(w, r) : r(v, w) in E+}, built directly from the edge list.
  std::vector<std::vector<std::pair<NodeId, RelationId>>> out_nbrs(n);
  for (const auto& e : aug.edges()) out_nbrs[e.nodes[0]].push_back({e.nodes[1], e.relation});

  std::vector<PairColoring> out{init};
  out.back().round = 0;
  std::vector<ColorKey> keys(n * n);
  for (int l = 0; l < rounds; ++l) {
    const PairColoring& old = out.back();
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = 0; v < n; ++v) {
        std::map<std::pair<ColorId, RelationId>, std::uint64_t> multiset;
        for (const auto& [w, r] : out_nbrs[v]) ++multiset[{old.at(u, w), r}];
        ColorKey& key = keys[u * n + v];
        key.clear();
        key.push_back(old.at(u, v));
        key.push_back(multiset.size());
        for (const auto& [m, count] : multiset) {
          key.push_back(m.first);
          key.push_back(m.second);
          key.push_back(count);
        }
      }
    }
    out.push_back(PairColoring{n, ColorInterner{}.assign(keys), l + 1});
  }
  return out;
}

}  // namespace hcnet
