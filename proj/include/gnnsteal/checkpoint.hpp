#pragma once

#include <filesystem>
#include <optional>

#include <nlohmann/json.hpp>

#include "gnnsteal/model.hpp"

namespace gnnsteal {

/// JSON container: {"format", "version", "model", optional "classifier", optional "provenance"}.
/// Tensors are stored row-major as 64-bit floats printed with 17 significant digits, so
/// save/load round-trips bit-exactly.
struct Checkpoint {
  TrainedModel model;
  std::optional<TrainedModel> classifier;
  nlohmann::json provenance;  // null when absent
};

nlohmann::json config_to_json(const ModelConfig& config);
ModelConfig config_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& j);

nlohmann::json checkpoint_to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& file);
Checkpoint load_checkpoint(const std::filesystem::path& file);

}  // namespace gnnsteal
