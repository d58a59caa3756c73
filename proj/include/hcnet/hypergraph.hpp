#ifndef HCNET_HYPERGRAPH_HPP
#define HCNET_HYPERGRAPH_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace hcnet {

using NodeId = std::uint32_t;
using RelationId = std::uint32_t;
using EdgeId = std::uint32_t;
using ColorId = std::uint32_t;

enum class GraphErrc {
  ArityMismatch,
  NodeOutOfRange,
  PositionOutOfRange,
  UnknownRelation,
  NotABijection,
  InvalidRelation,
  QueryMismatch,
  ParseError,
  InconsistentArity,
  FactNotFound,
  IoError,
};

class GraphError : public std::runtime_error {
 public:
  GraphError(GraphErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  GraphErrc code() const noexcept { return code_; }

 private:
  GraphErrc code_;
};

struct Relation {
  RelationId id = 0;
  std::string name;
  int arity = 0;
};

struct HyperEdge {
  RelationId relation = 0;
  std::vector<NodeId> nodes;

  friend bool operator==(const HyperEdge&, const HyperEdge&) = default;
  friend auto operator<=>(const HyperEdge&, const HyperEdge&) = default;
};

/// One entry of E(v): node v sits at `position` (1-based) of `edge`.
struct Incidence {
  EdgeId edge = 0;
  int position = 0;

  friend bool operator==(const Incidence&, const Incidence&) = default;
};

/// One entry of a positional neighborhood N_i(e).
struct PositionedNode {
  NodeId node = 0;
  int position = 0;

  friend bool operator==(const PositionedNode&, const PositionedNode&) = default;
};

/// A relational hypergraph G = (V, E, R, c). Immutable once built.
///
/// Nodes are dense ids 0..node_count()-1. Edges keep input order and
/// duplicates; the incidence index is a CSR layout sorted by (edge, position).
class RelationalHypergraph {
 public:
  RelationalHypergraph() = default;

  /// Validates every edge against the relation table and builds E(v).
  /// Throws GraphError{ArityMismatch|NodeOutOfRange|UnknownRelation|InvalidRelation}.
  static RelationalHypergraph build(std::vector<Relation> relations,
                                    std::vector<HyperEdge> edges,
                                    std::size_t node_count,
                                    std::optional<std::vector<ColorId>> colors = std::nullopt);

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::size_t relation_count() const noexcept { return relations_.size(); }

  const std::vector<Relation>& relations() const noexcept { return relations_; }
  const Relation& relation(RelationId r) const;
  int arity(RelationId r) const { return relation(r).arity; }
  int max_arity() const noexcept { return max_arity_; }
  std::optional<RelationId> find_relation(const std::string& name) const;

  const std::vector<HyperEdge>& edges() const noexcept { return edges_; }
  const HyperEdge& edge(EdgeId e) const;

  /// Node colors; uniform color 0 when none were supplied.
  const std::vector<ColorId>& colors() const noexcept { return colors_; }
  ColorId color(NodeId v) const { return colors_.at(v); }

  /// E(v), ordered by (edge id, position).
  std::span<const Incidence> incidence(NodeId v) const;

  /// N_i(e) = {(e(j), j) : j != i}, sorted by j.
  std::vector<PositionedNode> positional_neighborhood(EdgeId e, int i) const;

  std::size_t total_incidence() const noexcept { return incidence_.size(); }

 private:
  std::size_t node_count_ = 0;
  int max_arity_ = 0;
  std::vector<Relation> relations_;
  std::vector<HyperEdge> edges_;
  std::vector<ColorId> colors_;
  std::vector<std::size_t> offsets_;
  std::vector<Incidence> incidence_;
};

/// Node permutation helpers. perm[v] is the image of node v.
RelationalHypergraph apply_permutation(const RelationalHypergraph& graph,
                                       std::span<const NodeId> perm);
std::vector<NodeId> invert_permutation(std::span<const NodeId> perm);

/// Sorted copy of the edge list; equal multisets compare equal.
std::vector<HyperEdge> edge_multiset(const RelationalHypergraph& graph);

/// A link prediction query (q, ũ, t). `given` lists the k-1 known nodes in
/// position order, skipping the target slot t (1-based).
struct Query {
  RelationId relation = 0;
  std::vector<NodeId> given;
  int target = 1;

  /// Position (1-based) of given[index].
  int position_of(std::size_t index) const {
    return static_cast<int>(index) + 1 >= target ? static_cast<int>(index) + 2
                                                 : static_cast<int>(index) + 1;
  }
  /// The full k-tuple with `candidate` substituted at the target slot.
  std::vector<NodeId> complete(NodeId candidate) const;

  friend bool operator==(const Query&, const Query&) = default;
};

/// Builds the query that corrupts position t of a fact.
Query query_from_fact(const HyperEdge& fact, int target);
void validate_query(const RelationalHypergraph& graph, const Query& query);
Query permute_query(const Query& query, std::span<const NodeId> perm);

/// Hash set of facts, used for filtering.
class FactSet {
 public:
  FactSet() = default;
  explicit FactSet(std::span<const HyperEdge> facts) { insert(facts); }

  void insert(const HyperEdge& fact) { facts_.insert(fact); }
  void insert(std::span<const HyperEdge> facts) {
    for (const auto& f : facts) insert(f);
  }
  bool contains(const HyperEdge& fact) const { return facts_.count(fact) > 0; }
  std::size_t size() const noexcept { return facts_.size(); }

 private:
  struct Hash {
    std::size_t operator()(const HyperEdge& e) const noexcept;
  };
  std::unordered_set<HyperEdge, Hash> facts_;
};

/// Message passing over a graph with some edges hidden (positive-edge masking).
/// A default view hides nothing.
class GraphView {
 public:
  GraphView(const RelationalHypergraph& graph) : graph_(&graph) {}  // NOLINT: implicit by design of call sites
  GraphView(const RelationalHypergraph& graph, std::vector<char> masked)
      : graph_(&graph), masked_(std::move(masked)) {}

  const RelationalHypergraph& graph() const noexcept { return *graph_; }
  bool is_masked(EdgeId e) const noexcept { return !masked_.empty() && masked_[e] != 0; }
  std::size_t masked_count() const noexcept;

  /// E(v) restricted to visible edges.
  std::vector<Incidence> visible_incidence(NodeId v) const;

 private:
  const RelationalHypergraph* graph_;
  std::vector<char> masked_;
};

}  // namespace hcnet

#endif  // HCNET_HYPERGRAPH_HPP
