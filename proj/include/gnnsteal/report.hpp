#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gnnsteal/harness.hpp"

namespace gnnsteal {

/// Writes under out_dir (created if missing):
///   results.csv      grid runs that succeeded, one row each
///   curves.csv       sweep runs that succeeded (axis,value + the results columns)
///   failures.csv     runs that threw, with the message
///   aggregates.csv   per grid cell mean/std; curve_aggregates.csv per sweep point
///   pearson.csv      per target kind, pooled ("*") and per dataset
///   heatmap_*.svg    target x surrogate accuracy/fidelity per dataset, scenario
///   curve_*.svg      accuracy/fidelity against the swept value
/// Every CSV is written even when empty (header only). Output depends only on the report,
/// so re-emitting gives identical bytes. Returns the written paths in order.
std::vector<std::filesystem::path> emit_report(const MetricsReport& report, const std::filesystem::path& out_dir);

/// Reads the records back from results.csv, curves.csv and failures.csv (the last two
/// optional) and rebuilds the report. Metric values carry the CSV's 6-decimal rounding.
MetricsReport load_report(const std::filesystem::path& dir);

std::vector<std::vector<std::string>> parse_csv(const std::string& text);
std::string csv_field(const std::string& raw);

}  // namespace gnnsteal
