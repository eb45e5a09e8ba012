#include "gnnsteal/model.hpp"

#include <cstring>
#include <unordered_map>

#include "gnnsteal/errors.hpp"
#include "gnnsteal/loss.hpp"

namespace gnnsteal {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

const Block kNoBlock{};

}  // namespace

void ModelConfig::validate() const {
  if (widths.size() < 2) throw InvalidArgument("model needs at least one layer");
  for (std::size_t w : widths)
    if (w == 0) throw InvalidArgument("model widths must be positive");
  if (dense_layers > num_layers()) throw InvalidArgument("more dense layers than layers");
  if (fanouts.size() != graph_layers()) {
    throw InvalidArgument("model has " + std::to_string(graph_layers()) + " graph layers but " +
                          std::to_string(fanouts.size()) + " fanouts");
  }
  if (kind == LayerKind::dense && graph_layers() != 0) throw InvalidArgument("graph layers need sage, gat or gin");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw InvalidArgument("dropout must be in [0, 1)");
  if (kind == LayerKind::gat) {
    if (heads == 0) throw InvalidArgument("gat needs at least one head");
    for (std::size_t l = 0; l + 1 < graph_layers(); ++l) {
      if (widths[l + 1] % heads != 0) {
        throw InvalidArgument("gat hidden width " + std::to_string(widths[l + 1]) + " is not divisible by " +
                              std::to_string(heads) + " heads");
      }
    }
  }
}

ModelConfig target_config(LayerKind kind, std::size_t input_width, std::size_t num_classes, std::size_t embedding_size) {
  ModelConfig c;
  c.kind = kind;
  switch (kind) {
    case LayerKind::gin:
    case LayerKind::gat:
      c.widths = {input_width, 256, embedding_size, num_classes};
      c.fanouts = {10, 10, 10};
      break;
    case LayerKind::sage:
      c.widths = {input_width, 256, embedding_size, num_classes};
      c.fanouts = {25, 10};
      c.dense_layers = 1;
      c.dropout = 0.5;
      break;
    case LayerKind::dense:
      throw InvalidArgument("target model kind must be sage, gat or gin");
  }
  c.validate();
  return c;
}

ModelConfig encoder_config(LayerKind kind, std::size_t input_width, std::size_t output_width, std::size_t hidden) {
  if (kind == LayerKind::dense) throw InvalidArgument("surrogate kind must be sage, gat or gin");
  ModelConfig c;
  c.kind = kind;
  c.widths = {input_width, hidden, output_width};
  c.fanouts = {10, 50};
  c.validate();
  return c;
}

ModelConfig mlp_config(std::size_t input_width, std::size_t hidden, std::size_t output_width) {
  ModelConfig c;
  c.kind = LayerKind::dense;
  c.widths = {input_width, hidden, output_width};
  c.dense_layers = 2;
  c.validate();
  return c;
}

std::vector<Matrix*> TrainedModel::tensors() {
  std::vector<Matrix*> out;
  for (LayerParams& layer : layers)
    for (Matrix* m : layer.tensors()) out.push_back(m);
  return out;
}

std::vector<const Matrix*> TrainedModel::tensors() const {
  std::vector<const Matrix*> out;
  for (const LayerParams& layer : layers)
    for (const Matrix* m : layer.tensors()) out.push_back(m);
  return out;
}

TrainedModel build_model(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  TrainedModel model;
  model.config = config;
  model.meta.seed = seed;
  Rng rng(derive_seed(seed, {0x1417}));
  const std::size_t graph_layers = config.graph_layers();
  for (std::size_t l = 0; l < config.num_layers(); ++l) {
    const bool is_graph = l < graph_layers;
    const LayerKind kind = is_graph ? config.kind : LayerKind::dense;
    const bool concat = kind == LayerKind::gat && l + 1 < graph_layers;
    model.layers.push_back(make_layer(kind, config.widths[l], config.widths[l + 1], config.heads, concat, rng));
  }
  return model;
}

std::uint64_t parameter_hash(const TrainedModel& model) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const Matrix* m : model.tensors()) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(m->data());
    for (std::size_t i = 0; i < static_cast<std::size_t>(m->size()) * sizeof(double); ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

Matrix gather_rows(const Matrix& features, std::span<const NodeId> nodes) {
  Matrix out(idx(nodes.size()), features.cols());
  for (std::size_t i = 0; i < nodes.size(); ++i) out.row(idx(i)) = features.row(idx(nodes[i]));
  return out;
}

Matrix model_forward(const TrainedModel& model, const ComputePlan& plan, const Matrix& input, ModelCache* cache,
                     Rng* dropout_rng) {
  const std::size_t layers = model.layers.size();
  if (plan.blocks.size() != model.config.graph_layers()) {
    throw InvalidArgument("compute plan has " + std::to_string(plan.blocks.size()) + " blocks, model has " +
                          std::to_string(model.config.graph_layers()) + " graph layers");
  }
  if (cache) {
    cache->inputs.assign(layers, Matrix{});
    cache->outputs.assign(layers, Matrix{});
    cache->masks.assign(layers, Matrix{});
    cache->layers.assign(layers, LayerCache{});
  }
  const double keep = 1.0 - model.config.dropout;
  std::bernoulli_distribution keep_draw(keep);
  Matrix h = input;
  for (std::size_t l = 0; l < layers; ++l) {
    if (l > 0) {
      h = h.cwiseMax(0.0);
      if (dropout_rng && model.config.dropout > 0.0) {
        Matrix mask(h.rows(), h.cols());
        for (Eigen::Index i = 0; i < mask.size(); ++i) mask.data()[i] = keep_draw(*dropout_rng) ? 1.0 / keep : 0.0;
        h = h.cwiseProduct(mask);
        if (cache) cache->masks[l] = std::move(mask);
      }
    }
    const Block& block = l < plan.blocks.size() ? plan.blocks[l] : kNoBlock;
    Matrix out = layer_forward(model.layers[l], block, h, cache ? &cache->layers[l] : nullptr);
    if (cache) {
      cache->inputs[l] = std::move(h);
      cache->outputs[l] = out;
    }
    h = std::move(out);
  }
  return h;
}

std::vector<LayerParams> model_backward(const TrainedModel& model, const ComputePlan& plan, const ModelCache& cache,
                                        const Matrix& d_output) {
  std::vector<LayerParams> grads;
  grads.reserve(model.layers.size());
  for (const LayerParams& layer : model.layers) grads.push_back(layer.zeros_like());
  Matrix d = d_output;
  for (std::size_t l = model.layers.size(); l-- > 0;) {
    const Block& block = l < plan.blocks.size() ? plan.blocks[l] : kNoBlock;
    Matrix d_in = layer_backward(model.layers[l], block, cache.inputs[l], cache.layers[l], d, grads[l]);
    if (l == 0) break;
    if (cache.masks[l].size()) d_in = d_in.cwiseProduct(cache.masks[l]);
    const Matrix& prev = cache.outputs[l - 1];
    d = d_in.cwiseProduct((prev.array() > 0.0).cast<double>().matrix());
  }
  return grads;
}

Matrix forward(const TrainedModel& model, const Graph& graph, std::span<const NodeId> nodes, Head head,
               const ForwardOptions& options) {
  if (graph.feature_dim() != model.config.widths.front()) {
    throw InvalidArgument("model expects " + std::to_string(model.config.widths.front()) + " features, graph has " +
                          std::to_string(graph.feature_dim()));
  }
  std::vector<NodeId> unique;
  std::vector<std::size_t> row_of(nodes.size());
  std::unordered_map<NodeId, std::size_t> seen;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] >= graph.num_nodes()) {
      throw InvalidArgument("node id " + std::to_string(nodes[i]) + " out of range (n=" +
                            std::to_string(graph.num_nodes()) + ")");
    }
    auto [it, inserted] = seen.emplace(nodes[i], unique.size());
    if (inserted) unique.push_back(nodes[i]);
    row_of[i] = it->second;
  }

  std::vector<std::size_t> fanouts = model.config.fanouts;
  if (options.full_neighborhood) fanouts.assign(fanouts.size(), kFullNeighborhood);
  const std::size_t width = head == Head::embedding ? model.config.embedding_size() : model.config.output_size();
  Matrix unique_rows(idx(unique.size()), idx(width));
  const std::size_t chunk = std::max<std::size_t>(options.batch_size, 1);
  for (std::size_t start = 0; start < unique.size(); start += chunk) {
    const std::size_t count = std::min(chunk, unique.size() - start);
    const std::span<const NodeId> batch(unique.data() + start, count);
    const ComputePlan plan = build_plan(graph, batch, fanouts, options.seed);
    const Matrix input = gather_rows(graph.features(), plan.input_nodes);
    Matrix rows;
    if (head == Head::embedding) {
      ModelCache cache;
      model_forward(model, plan, input, &cache);
      rows = cache.inputs.back();
    } else {
      rows = model_forward(model, plan, input, nullptr);
      if (head == Head::posterior) rows = softmax_rows(rows);
    }
    unique_rows.middleRows(idx(start), idx(count)) = rows;
  }
  if (unique.size() == nodes.size()) return unique_rows;
  Matrix out(idx(nodes.size()), idx(width));
  for (std::size_t i = 0; i < nodes.size(); ++i) out.row(idx(i)) = unique_rows.row(idx(row_of[i]));
  return out;
}

}  // namespace gnnsteal
