#include "hcnet/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace hcnet {

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

}  // namespace

nlohmann::json to_json(const ModelConfig& c) {
  return {{"kind", to_string(c.kind)},   {"hidden", c.hidden},         {"layers", c.layers},
          {"relations", c.relations},    {"max_arity", c.max_arity},   {"mode", to_string(c.mode)},
          {"init", to_string(c.init)},   {"pe", to_string(c.pe)},      {"layer_norm", c.layer_norm},
          {"skip", c.skip},              {"dropout", c.dropout},       {"ln_eps", c.ln_eps}};
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.kind = parse_model_kind(j.value("kind", to_string(c.kind)));
  c.hidden = j.value("hidden", c.hidden);
  c.layers = j.value("layers", c.layers);
  c.relations = j.value("relations", c.relations);
  c.max_arity = j.value("max_arity", c.max_arity);
  c.mode = parse_message_mode(j.value("mode", to_string(c.mode)));
  c.init = parse_init_variant(j.value("init", to_string(c.init)));
  c.pe = parse_pe_kind(j.value("pe", to_string(c.pe)));
  c.layer_norm = j.value("layer_norm", c.layer_norm);
  c.skip = j.value("skip", c.skip);
  c.dropout = j.value("dropout", c.dropout);
  c.ln_eps = j.value("ln_eps", c.ln_eps);
  return c;
}

void save_checkpoint(const std::string& path, const ModelParams& model, std::uint64_t seed,
                     const nlohmann::json& extra) {
  nlohmann::json header;
  header["format"] = "hcnet-checkpoint-1";
  header["config"] = to_json(model.cfg);
  header["seed"] = seed;
  header["extra"] = extra;
  header["tensors"] = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (std::size_t i = 0; i < model.params.size(); ++i) {
    const Tensor& t = model.params[i];
    header["tensors"].push_back({{"name", model.params.name(i)}, {"shape", t.shape}, {"offset", offset}});
    offset += t.size() * sizeof(float);
  }
  const std::string text = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write " + path);
  const std::uint64_t len = text.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (std::size_t i = 0; i < model.params.size(); ++i) {
    for (double x : model.params[i].data) {
      const float f = static_cast<float>(x);
      out.write(reinterpret_cast<const char*>(&f), sizeof(f));
    }
  }
  if (!out) throw CheckpointError("short write to " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path);
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  if (!in || len > (1ULL << 30)) throw CheckpointError(path + ": bad header length");
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) throw CheckpointError(path + ": truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(path + ": " + e.what());
  }
  Checkpoint ck;
  ck.seed = header.value("seed", std::uint64_t{0});
  ck.extra = header.value("extra", nlohmann::json::object());
  ck.model = init_model(model_config_from_json(header.at("config")), 0);
  const auto blob_start = static_cast<std::streamoff>(sizeof(len) + len);
  auto& P = ck.model.params;
  if (header.at("tensors").size() != P.size()) throw CheckpointError(path + ": tensor count differs from config");
  for (const auto& entry : header.at("tensors")) {
    const std::string name = entry.at("name");
    if (!P.contains(name)) throw CheckpointError(path + ": unexpected tensor '" + name + "'");
    Tensor& t = P.mut(P.index(name));
    if (entry.at("shape").get<std::vector<std::size_t>>() != t.shape)
      throw CheckpointError(path + ": shape mismatch for '" + name + "'");
    in.seekg(blob_start + static_cast<std::streamoff>(entry.at("offset").get<std::uint64_t>()));
    std::vector<float> buf(t.size());
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!in) throw CheckpointError(path + ": truncated tensor '" + name + "'");
    for (std::size_t k = 0; k < buf.size(); ++k) t.data[k] = buf[k];
  }
  rebind(ck.model);
  return ck;
}

}  // namespace hcnet
