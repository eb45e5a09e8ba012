#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gnnsteal/harness.hpp"
#include "gnnsteal/server.hpp"

namespace gnnsteal {

/// Sweep axes: "budget", "sigma", "structure" and the hyperparameter axes.
struct SweepSettings {
  std::string axis = "budget";
  std::vector<double> values{0.03, 0.09, 0.15, 0.21, 0.27};
};

/// One experiment document. Every section is optional and every key has a default; unknown
/// keys are rejected at any depth.
struct RunConfig {
  std::uint64_t seed = 0;  // run seed for single-run commands
  std::filesystem::path out = "out";
  std::filesystem::path data_root = "data";
  std::vector<std::string> datasets;
  ExperimentSettings settings;
  CellSpec cell;  // target.kind, attack.surrogate, oracle.response, attack.scenario
  GridSpec grid;
  SweepSettings sweep;
  ServerConfig server;

  void validate() const;
};

/// Throws ConfigError naming the offending key path.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& file);
nlohmann::json run_config_to_json(const RunConfig& config);

}  // namespace gnnsteal
