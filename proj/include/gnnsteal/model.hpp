#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gnnsteal/graph.hpp"
#include "gnnsteal/layers.hpp"
#include "gnnsteal/sampling.hpp"

namespace gnnsteal {

/// Architecture description. The first `graph_layers()` layers are message-passing layers of
/// `kind`; the trailing `dense_layers` are plain linear layers. ReLU sits between layers.
struct ModelConfig {
  LayerKind kind = LayerKind::sage;
  std::vector<std::size_t> widths;   // input width first, output width last
  std::vector<std::size_t> fanouts;  // one per graph layer, input side first; 0 = full neighbourhood
  std::size_t dense_layers = 0;
  double dropout = 0.0;              // on hidden activations, training only
  std::size_t heads = 4;             // gat; hidden layers concatenate, the last graph layer of
                                     // a pure gat stack averages

  std::size_t num_layers() const { return widths.empty() ? 0 : widths.size() - 1; }
  std::size_t graph_layers() const { return num_layers() - dense_layers; }
  /// Width of the representation fed to the final layer.
  std::size_t embedding_size() const { return widths.size() >= 2 ? widths[widths.size() - 2] : 0; }
  std::size_t output_size() const { return widths.empty() ? 0 : widths.back(); }
  void validate() const;
};

/// Target architectures: gin/gat 3 graph layers d-256-emb-C with fanouts 10,10,10 (gat with
/// 4 heads); sage 2 graph layers d-256-emb with fanouts 25,10 and dropout 0.5, then a linear
/// classifier.
ModelConfig target_config(LayerKind kind, std::size_t input_width, std::size_t num_classes,
                          std::size_t embedding_size = 256);

/// Surrogate encoder: 2 graph layers d-hidden-out with fanouts 10,50 and a linear output.
ModelConfig encoder_config(LayerKind kind, std::size_t input_width, std::size_t output_width,
                           std::size_t hidden = 256);

/// Two-layer perceptron in-hidden-out.
ModelConfig mlp_config(std::size_t input_width, std::size_t hidden, std::size_t output_width);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_accuracy = 0.0;
  double best_val_accuracy = 0.0;
};

struct TrainingMeta {
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;
  double best_val_accuracy = 0.0;
  std::uint64_t seed = 0;
  std::vector<EpochRecord> trace;
};

struct TrainedModel {
  ModelConfig config;
  std::vector<LayerParams> layers;
  TrainingMeta meta;

  std::vector<Matrix*> tensors();
  std::vector<const Matrix*> tensors() const;
};

/// Deterministic Glorot initialisation from `seed`.
TrainedModel build_model(const ModelConfig& config, std::uint64_t seed);

/// FNV-1a over every parameter byte; equal hashes for bitwise-identical parameters.
std::uint64_t parameter_hash(const TrainedModel& model);

enum class Head {
  embedding,  // input of the final layer (after ReLU)
  posterior,  // softmax of the final layer
  output,     // raw final layer output
};

inline constexpr std::uint64_t kInferenceSeed = 0x1f3d5b79;

struct ForwardOptions {
  std::uint64_t seed = kInferenceSeed;
  bool full_neighborhood = false;  // ignore fanouts and aggregate every neighbour
  std::size_t batch_size = 1024;   // output rows per compute plan
};

/// Inference (dropout off). Rows follow `nodes`; repeated ids give repeated rows.
Matrix forward(const TrainedModel& model, const Graph& graph, std::span<const NodeId> nodes, Head head,
               const ForwardOptions& options = {});

/// Activations kept by model_forward for model_backward.
struct ModelCache {
  std::vector<Matrix> inputs;       // input of each layer (after activation and dropout)
  std::vector<Matrix> outputs;      // raw output of each layer
  std::vector<Matrix> masks;        // dropout multipliers applied to inputs[l], l >= 1 (empty if none)
  std::vector<LayerCache> layers;
};

/// Runs every layer over a compute plan. `input` holds features of plan.input_nodes.
/// Dropout is active only when `dropout_rng` is non-null.
Matrix model_forward(const TrainedModel& model, const ComputePlan& plan, const Matrix& input, ModelCache* cache,
                     Rng* dropout_rng = nullptr);

/// Gradients of every layer for d loss / d final output.
std::vector<LayerParams> model_backward(const TrainedModel& model, const ComputePlan& plan, const ModelCache& cache,
                                        const Matrix& d_output);

/// Gathers rows of `features` in `nodes` order.
Matrix gather_rows(const Matrix& features, std::span<const NodeId> nodes);

}  // namespace gnnsteal
