#pragma once

#include <filesystem>
#include <memory>

#include <nlohmann/json.hpp>

#include "hgkt/heg.hpp"
#include "hgkt/model.hpp"

namespace hgkt {

inline constexpr int kCheckpointFormat = 1;

/// Writes manifest.json, params.bin (little-endian f32 in manifest order)
/// and heg.json into `dir`. `extra` lands under config.train.
void save_checkpoint(const std::filesystem::path& dir, const nn::HgktModel<float>& model,
                     const nlohmann::json& extra = nlohmann::json::object());

struct LoadedCheckpoint {
  std::unique_ptr<nn::HgktModel<float>> model;
  nlohmann::json manifest;
};

/// Rebuilds the model; any name, shape or size disagreement is a DimensionError.
/// `heg_override` replaces the stored graph and must match its dimensions.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& dir, const Heg* heg_override = nullptr);

}  // namespace hgkt
