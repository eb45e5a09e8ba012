#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gnnsteal/graph.hpp"
#include "gnnsteal/layers.hpp"

namespace gnnsteal {

/// Fanout value meaning "take every neighbour".
inline constexpr std::size_t kFullNeighborhood = 0;

/// Message-flow blocks for a mini-batch, built from the output layer backwards.
/// blocks[0] consumes features of `input_nodes`; the last block produces the outputs,
/// which are the first rows of every block's source set.
struct ComputePlan {
  std::vector<NodeId> input_nodes;
  std::vector<Block> blocks;
  std::size_t num_outputs = 0;
};

/// `outputs` must be distinct. fanouts[l] applies to layer l (input side first).
/// Layer l samples with seed derive_seed(seed, {l}).
ComputePlan build_plan(const Graph& graph, std::span<const NodeId> outputs, std::span<const std::size_t> fanouts,
                       std::uint64_t seed);

}  // namespace gnnsteal
