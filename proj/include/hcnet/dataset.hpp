#ifndef HCNET_DATASET_HPP
#define HCNET_DATASET_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "hcnet/hypergraph.hpp"

namespace hcnet {

/// A parsed dataset directory. The graph holds the train facts; nodes cover
/// every entity seen in any split.
struct Dataset {
  RelationalHypergraph graph;
  std::vector<std::string> entity_names;
  std::vector<HyperEdge> train;
  std::vector<HyperEdge> valid;
  std::vector<HyperEdge> test;

  std::vector<HyperEdge> all_facts() const;
};

/// Reads train.txt / valid.txt / test.txt (missing valid/test are empty) and
/// the optional entities.dict / relations.dict.
Dataset load_dataset(const std::filesystem::path& dir);

/// Writes the dataset, including both dictionaries, so that load_dataset
/// reproduces the same ids.
void write_dataset(const Dataset& data, const std::filesystem::path& dir);

/// Writes one fact per line in the dataset text format.
void write_facts(const std::filesystem::path& file, const std::vector<HyperEdge>& facts,
                 const std::vector<Relation>& relations,
                 const std::vector<std::string>& entity_names);

}  // namespace hcnet

#endif  // HCNET_DATASET_HPP
