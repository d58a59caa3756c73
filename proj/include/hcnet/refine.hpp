#ifndef HCNET_REFINE_HPP
#define HCNET_REFINE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hcnet/hypergraph.hpp"

namespace hcnet {

enum class RefineErrc { DomainMismatch, NotAKnowledgeGraph, InvalidInit };

class RefineError : public std::runtime_error {
 public:
  RefineError(RefineErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  RefineErrc code() const noexcept { return code_; }

 private:
  RefineErrc code_;
};

struct NodeColoring {
  std::vector<ColorId> colors;
  int round = 0;

  std::size_t class_count() const;
};

/// Coloring of V x V, stored row-major: colors[u * n + v].
struct PairColoring {
  std::size_t n = 0;
  std::vector<ColorId> colors;
  int round = 0;

  ColorId at(NodeId u, NodeId v) const { return colors[static_cast<std::size_t>(u) * n + v]; }
  std::size_t class_count() const;
};

/// Canonical structural key: a flat, length-prefixed sequence of integers.
using ColorKey = std::vector<std::uint64_t>;

/// Assigns dense ids to a batch of keys. Keys are sorted first, so ids depend
/// only on the set of keys and never on their arrival order.
class ColorInterner {
 public:
  std::vector<ColorId> assign(const std::vector<ColorKey>& keys);
};

/// Sentinel for hrwl1_run: iterate until the partition stops changing.
inline constexpr int kUntilStable = -1;

NodeColoring hrwl1_step(const RelationalHypergraph& graph, const NodeColoring& coloring);

/// Rounds 0..L. With kUntilStable the last two entries induce the same
/// partition.
std::vector<NodeColoring> hrwl1_run(const RelationalHypergraph& graph, NodeColoring init,
                                    int rounds);

/// The initial coloring used by the conditional test: each given node is
/// colored by the set of positions it occupies, all others share a color.
NodeColoring conditional_init(const RelationalHypergraph& graph, const Query& query);
std::vector<NodeColoring> conditional_run(const RelationalHypergraph& graph, const Query& query,
                                          int rounds);

/// Generic partition algebra over equally sized color vectors.
bool refines(const std::vector<ColorId>& a, const std::vector<ColorId>& b);
bool equivalent(const std::vector<ColorId>& a, const std::vector<ColorId>& b);
bool refines(const NodeColoring& a, const NodeColoring& b);
bool equivalent(const NodeColoring& a, const NodeColoring& b);
bool refines(const PairColoring& a, const PairColoring& b);
bool equivalent(const PairColoring& a, const PairColoring& b);

/// eta(u, v) = 1 if u == v else 0.
PairColoring standard_pair_init(std::size_t n);

std::vector<PairColoring> hcwl2_run(const RelationalHypergraph& kg, const PairColoring& init,
                                    int rounds);
std::vector<PairColoring> rawl2plus_run(const RelationalHypergraph& kg, const PairColoring& init,
                                        int rounds);

/// The inverse-augmented graph: relation r gets a partner r^- with id r + |R|,
/// and every non-loop fact r(u, v) adds r^-(v, u).
RelationalHypergraph augment_inverse(const RelationalHypergraph& kg);

}  // namespace hcnet

#endif  // HCNET_REFINE_HPP
