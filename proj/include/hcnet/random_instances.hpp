#ifndef HCNET_RANDOM_INSTANCES_HPP
#define HCNET_RANDOM_INSTANCES_HPP

#include <random>
#include <vector>

#include "hcnet/hypergraph.hpp"

namespace hcnet {

using Rng = std::mt19937_64;

struct RandomGraphSpec {
  int min_nodes = 2;
  int max_nodes = 30;
  int max_relations = 4;
  int max_arity = 4;
  int min_arity = 1;
  /// Edge count is drawn from [edge_factor_lo, edge_factor_hi] * |V|.
  double edge_factor_lo = 0.5;
  double edge_factor_hi = 2.0;
  /// Number of distinct node colors; 1 means uncolored.
  int colors = 1;
  bool allow_repeated_nodes = true;
};

RelationalHypergraph random_hypergraph(Rng& rng, const RandomGraphSpec& spec);

/// Binary relations only. With allow_loops false no fact has equal endpoints.
RelationalHypergraph random_kg(Rng& rng, int max_nodes, int relations, double edge_factor,
                               bool allow_loops);

/// A query over a uniformly chosen relation with uniformly chosen given nodes.
Query random_query(Rng& rng, const RelationalHypergraph& graph);

std::vector<NodeId> random_permutation(Rng& rng, std::size_t n);

}  // namespace hcnet

#endif  // HCNET_RANDOM_INSTANCES_HPP
