#ifndef HCNET_CHECKPOINT_HPP
#define HCNET_CHECKPOINT_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "hcnet/model.hpp"

namespace hcnet {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& j);

struct Checkpoint {
  ModelParams model;
  std::uint64_t seed = 0;
  nlohmann::json extra;
};

/// Layout: u64 little-endian header length, JSON header (tensor names,
/// shapes, byte offsets, config, seed, extra), then float32 LE blobs.
void save_checkpoint(const std::string& path, const ModelParams& model, std::uint64_t seed,
                     const nlohmann::json& extra = nlohmann::json::object());
Checkpoint load_checkpoint(const std::string& path);

}  // namespace hcnet

#endif  // HCNET_CHECKPOINT_HPP
