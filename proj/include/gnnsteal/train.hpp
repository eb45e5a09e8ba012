#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "gnnsteal/graph.hpp"
#include "gnnsteal/model.hpp"
#include "gnnsteal/optim.hpp"

namespace gnnsteal {

struct TrainConfig {
  std::size_t epochs = 200;
  std::size_t batch_size = 512;
  double lr = 1e-3;
  double val_fraction = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Supervised training with softmax cross-entropy on the labelled nodes of `graph`.
/// `val_fraction` of them is held out; the parameters with the best validation accuracy
/// (first occurrence) are returned. epochs = 0 returns the model unchanged.
TrainedModel train_model(TrainedModel model, const Graph& graph, const TrainConfig& config);

/// Loss on a mini-batch output. Writes d loss / d output and returns the loss value.
using BatchLoss = std::function<double(const Matrix& output, std::span<const NodeId> batch, Matrix& d_output)>;

/// One epoch of shuffled mini-batch Adam steps over `nodes`. Returns the size-weighted mean loss.
double train_epoch(TrainedModel& model, Adam& optimizer, const Graph& graph, std::span<const NodeId> nodes,
                   const TrainConfig& config, std::size_t epoch, const BatchLoss& loss);

/// Fraction of `nodes` whose argmax prediction equals the graph label.
double node_accuracy(const TrainedModel& model, const Graph& graph, std::span<const NodeId> nodes);

}  // namespace gnnsteal
