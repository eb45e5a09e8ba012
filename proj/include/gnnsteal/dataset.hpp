#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "gnnsteal/graph.hpp"

namespace gnnsteal {

/// Reads a dataset directory:
///   meta.json     {"n", "d", "num_classes", "name"}
///   edges.csv     src,dst
///   features.csv  node_id,f1,...,fd
///   labels.csv    node_id,label
/// Blank lines and lines starting with '#' are ignored. Nodes absent from labels.csv
/// get kUnknownLabel. Throws LoadError naming the file and line on bad input.
Graph load_dataset(const std::filesystem::path& dir, const std::string& name = {});

/// Writes `graph` in the format read by load_dataset (features at full double precision).
void save_dataset(const Graph& graph, const std::filesystem::path& dir);

/// Writes only edges.csv for an edge list.
void save_edges(std::span<const Edge> edges, const std::filesystem::path& file);

/// `spec` is either a directory containing meta.json or a name resolved under `data_root`
/// (case-insensitive match on the directory name).
std::filesystem::path resolve_dataset(const std::string& spec, const std::filesystem::path& data_root);

}  // namespace gnnsteal
