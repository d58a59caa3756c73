#ifndef HCNET_TEST_FIXTURES_HPP
#define HCNET_TEST_FIXTURES_HPP

#include <filesystem>
#include <string>

#include "hcnet/hypergraph.hpp"

namespace fixtures {

// Nodes of the degree/award example.
enum : hcnet::NodeId { Hawking = 0, Oxford = 1, Physics = 2, BA = 3, Nobel = 4 };
enum : hcnet::RelationId { StudyDegree = 0, Awarded = 1 };

inline hcnet::RelationalHypergraph degree_award_graph(bool colored = false) {
  using namespace hcnet;
  std::vector<Relation> rels{{StudyDegree, "StudyDegree", 4}, {Awarded, "Awarded", 3}};
  std::vector<HyperEdge> edges{{StudyDegree, {Hawking, Oxford, Physics, BA}},
                               {Awarded, {Physics, Nobel, Oxford}}};
  std::optional<std::vector<ColorId>> colors;
  // Color 0 = Person, 1 = Other.
  if (colored) colors = std::vector<ColorId>{0, 1, 1, 1, 1};
  return RelationalHypergraph::build(rels, edges, 5, colors);
}

// Eight nodes on a ring of four ternary edges (x0,x1,x2), (x2,x3,x4), ...
// Relation 0 is a ternary query relation without edges. x2 shares an edge with
// x0, x4 is two edges away, and rotation by two nodes maps x2 to x4.
inline hcnet::RelationalHypergraph two_hop_ring() {
  using namespace hcnet;
  std::vector<Relation> rels{{0, "r", 3}, {1, "s", 3}};
  std::vector<HyperEdge> edges;
  for (NodeId i = 0; i < 8; i += 2) edges.push_back({1, {i, i + 1, (i + 2) % 8}});
  return RelationalHypergraph::build(rels, edges, 8);
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::path(HCNET_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures

#endif
