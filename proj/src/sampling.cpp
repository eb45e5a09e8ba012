#include "gnnsteal/sampling.hpp"

#include "gnnsteal/errors.hpp"
#include "gnnsteal/random.hpp"

namespace gnnsteal {

ComputePlan build_plan(const Graph& graph, std::span<const NodeId> outputs, std::span<const std::size_t> fanouts,
                       std::uint64_t seed) {
  const std::size_t n = graph.num_nodes();
  std::vector<std::ptrdiff_t> local(n, -1);
  std::vector<NodeId> frontier(outputs.begin(), outputs.end());
  for (std::size_t i = 0; i < frontier.size(); ++i) {
    const NodeId v = frontier[i];
    if (v >= n) throw InvalidArgument("node id " + std::to_string(v) + " out of range (n=" + std::to_string(n) + ")");
    if (local[v] >= 0) throw InvalidArgument("build_plan: duplicate output node " + std::to_string(v));
    local[v] = static_cast<std::ptrdiff_t>(i);
  }

  ComputePlan plan;
  plan.num_outputs = frontier.size();
  plan.blocks.resize(fanouts.size());
  for (std::size_t layer = fanouts.size(); layer-- > 0;) {
    Block& block = plan.blocks[layer];
    std::vector<NodeId> sources = frontier;
    const std::uint64_t layer_seed = derive_seed(seed, {layer});
    for (NodeId v : frontier) {
      const auto picked = fanouts[layer] == kFullNeighborhood
                              ? std::vector<NodeId>(graph.neighbors(v).begin(), graph.neighbors(v).end())
                              : sample_neighbors(graph, v, fanouts[layer], layer_seed);
      for (NodeId u : picked) {
        if (local[u] < 0) {
          local[u] = static_cast<std::ptrdiff_t>(sources.size());
          sources.push_back(u);
        }
        block.neighbors.push_back(static_cast<std::size_t>(local[u]));
      }
      block.offsets.push_back(block.neighbors.size());
    }
    block.num_src = sources.size();
    frontier = std::move(sources);
  }
  plan.input_nodes = std::move(frontier);
  return plan;
}

}  // namespace gnnsteal
