#include "hgkt/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "hgkt/errors.hpp"

namespace hgkt {

namespace {

void write_f32(std::ostream& out, float v) {
  std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
  unsigned char b[4] = {static_cast<unsigned char>(bits), static_cast<unsigned char>(bits >> 8),
                        static_cast<unsigned char>(bits >> 16), static_cast<unsigned char>(bits >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

float read_f32(const unsigned char* b) {
  std::uint32_t bits = static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
                       static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
  return std::bit_cast<float>(bits);
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    nlohmann::json doc;
    in >> doc;
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

}  // namespace

void save_checkpoint(const std::filesystem::path& dir, const nn::HgktModel<float>& model, const nlohmann::json& extra) {
  std::filesystem::create_directories(dir);
  nlohmann::json tensors = nlohmann::json::array();
  std::ofstream bin(dir / "params.bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot write " + (dir / "params.bin").string());
  std::size_t offset = 0;
  for (const auto& p : model.parameters()) {
    const auto& shape = p.tensor.shape();
    tensors.push_back({{"name", p.name},
                       {"shape", {shape.rows, shape.cols}},
                       {"dtype", "f32"},
                       {"offset", offset},
                       {"len", p.tensor.size()}});
    for (float v : p.tensor.values()) write_f32(bin, v);
    offset += 4 * p.tensor.size();
  }
  nlohmann::json manifest = {
      {"format_version", kCheckpointFormat},
      {"tensors", tensors},
      {"config",
       {{"model", model_config_to_json(model.config())},
        {"train", extra},
        {"heg", "heg.json"},
        {"exercise_count", model.heg().exercise_count()},
        {"knowledge_count", model.knowledge_count()},
        {"schema_count", model.schema_count()}}},
  };
  std::ofstream(dir / "manifest.json") << manifest.dump(1) << '\n';
  save_heg(dir / "heg.json", model.heg());
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& dir, const Heg* heg_override) {
  LoadedCheckpoint out;
  out.manifest = read_json(dir / "manifest.json");
  const auto& m = out.manifest;
  if (m.value("format_version", 0) != kCheckpointFormat) throw ValidationError("unsupported checkpoint format");
  Heg stored = load_heg(dir / "heg.json");
  const Heg& heg = heg_override ? *heg_override : stored;
  const auto& cfg = m.at("config");
  auto check = [&](const char* key, std::size_t actual) {
    const auto expected = cfg.at(key).get<std::size_t>();
    if (expected != actual) {
      throw DimensionError(std::string("checkpoint ") + key + " is " + std::to_string(expected) + " but graph has " +
                           std::to_string(actual));
    }
  };
  check("exercise_count", heg.exercise_count());
  check("knowledge_count", heg.knowledge_count());
  check("schema_count", heg.schema_count());

  out.model = std::make_unique<nn::HgktModel<float>>(model_config_from_json(cfg.at("model")), heg, 0);
  std::ifstream bin(dir / "params.bin", std::ios::binary);
  if (!bin) throw ValidationError("cannot open " + (dir / "params.bin").string());
  std::vector<unsigned char> raw((std::istreambuf_iterator<char>(bin)), std::istreambuf_iterator<char>());

  auto params = out.model->parameters();
  const auto& tensors = m.at("tensors");
  if (tensors.size() != params.size()) {
    throw DimensionError("checkpoint has " + std::to_string(tensors.size()) + " tensors, model expects " +
                         std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& t = tensors[i];
    auto& p = params[i];
    const auto shape = t.at("shape").get<std::vector<std::size_t>>();
    if (t.at("name").get<std::string>() != p.name || shape.size() != 2 || shape[0] != p.tensor.rows() ||
        shape[1] != p.tensor.cols()) {
      throw DimensionError("checkpoint tensor " + t.at("name").get<std::string>() + " does not match model parameter " +
                           p.name + " " + p.tensor.shape().str());
    }
    const auto offset = t.at("offset").get<std::size_t>();
    const auto len = t.at("len").get<std::size_t>();
    if (len != p.tensor.size() || offset + 4 * len > raw.size()) throw DimensionError("params.bin is truncated");
    auto values = p.tensor.mutable_values();
    for (std::size_t k = 0; k < len; ++k) values[k] = read_f32(raw.data() + offset + 4 * k);
  }
  return out;
}

}  // namespace hgkt
