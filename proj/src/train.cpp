#include "gnnsteal/train.hpp"

#include <algorithm>
#include <cmath>

#include "gnnsteal/errors.hpp"
#include "gnnsteal/loss.hpp"

namespace gnnsteal {

void TrainConfig::validate() const {
  if (batch_size < 1) throw InvalidArgument("batch size must be >= 1");
  if (!(lr > 0.0)) throw InvalidArgument("learning rate must be positive");
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) throw InvalidArgument("val_fraction must be in (0, 1)");
}

double train_epoch(TrainedModel& model, Adam& optimizer, const Graph& graph, std::span<const NodeId> nodes,
                   const TrainConfig& config, std::size_t epoch, const BatchLoss& loss) {
  std::vector<NodeId> order(nodes.begin(), nodes.end());
  Rng shuffle_rng(derive_seed(config.seed, {0x7e, epoch}));
  std::shuffle(order.begin(), order.end(), shuffle_rng);
  Rng dropout_rng(derive_seed(config.seed, {0xd0, epoch}));

  double total = 0.0;
  std::vector<Matrix*> params = model.tensors();
  for (std::size_t start = 0, b = 0; start < order.size(); start += config.batch_size, ++b) {
    const std::size_t count = std::min(config.batch_size, order.size() - start);
    const std::span<const NodeId> batch(order.data() + start, count);
    const ComputePlan plan = build_plan(graph, batch, model.config.fanouts, derive_seed(config.seed, {0x5a, epoch, b}));
    ModelCache cache;
    const Matrix output = model_forward(model, plan, gather_rows(graph.features(), plan.input_nodes), &cache,
                                        &dropout_rng);
    Matrix d_output;
    total += loss(output, batch, d_output) * static_cast<double>(count);
    const std::vector<LayerParams> grads = model_backward(model, plan, cache, d_output);
    std::vector<const Matrix*> grad_tensors;
    for (const LayerParams& g : grads)
      for (const Matrix* m : g.tensors()) grad_tensors.push_back(m);
    optimizer.step(params, grad_tensors);
  }
  return order.empty() ? 0.0 : total / static_cast<double>(order.size());
}

double node_accuracy(const TrainedModel& model, const Graph& graph, std::span<const NodeId> nodes) {
  if (nodes.empty()) throw InvalidArgument("accuracy over an empty node set");
  const std::vector<int> pred = argmax_rows(forward(model, graph, nodes, Head::output));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) correct += pred[i] == graph.labels()[nodes[i]];
  return static_cast<double>(correct) / static_cast<double>(nodes.size());
}

TrainedModel train_model(TrainedModel model, const Graph& graph, const TrainConfig& config) {
  config.validate();
  std::vector<NodeId> labelled;
  for (NodeId v = 0; v < graph.num_nodes(); ++v)
    if (graph.labels()[v] != kUnknownLabel) labelled.push_back(v);
  if (labelled.empty()) throw InvalidArgument("train_model: graph has no labelled nodes");
  if (static_cast<int>(model.config.output_size()) != graph.num_classes()) {
    throw InvalidArgument("model outputs " + std::to_string(model.config.output_size()) + " classes, graph has " +
                          std::to_string(graph.num_classes()));
  }
  model.meta.seed = config.seed;
  if (config.epochs == 0) return model;

  Rng split_rng(derive_seed(config.seed, {0x7a1}));
  std::shuffle(labelled.begin(), labelled.end(), split_rng);
  std::size_t n_val = static_cast<std::size_t>(std::llround(config.val_fraction * static_cast<double>(labelled.size())));
  n_val = std::clamp<std::size_t>(n_val, labelled.size() > 1 ? 1 : 0, labelled.size() - 1);
  const std::vector<NodeId> val(labelled.begin(), labelled.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<NodeId> train(labelled.begin() + static_cast<std::ptrdiff_t>(n_val), labelled.end());
  std::sort(train.begin(), train.end());

  const BatchLoss ce = [&](const Matrix& output, std::span<const NodeId> batch, Matrix& d_output) {
    std::vector<int> y(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) y[i] = graph.labels()[batch[i]];
    LossValue l = cross_entropy(output, y);
    d_output = std::move(l.grad);
    return l.value;
  };

  Adam optimizer(AdamConfig{.lr = config.lr});
  TrainedModel best = model;
  double best_acc = -1.0;
  std::vector<EpochRecord> trace;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const double loss = train_epoch(model, optimizer, graph, train, config, epoch, ce);
    const double acc = val.empty() ? 0.0 : node_accuracy(model, graph, val);
    if (acc > best_acc) {
      best_acc = acc;
      best = model;
      best.meta.best_epoch = epoch;
    }
    trace.push_back({epoch, loss, acc, best_acc});
  }
  best.meta.epochs_run = config.epochs;
  best.meta.best_val_accuracy = best_acc;
  best.meta.seed = config.seed;
  best.meta.trace = std::move(trace);
  return best;
}

}  // namespace gnnsteal
