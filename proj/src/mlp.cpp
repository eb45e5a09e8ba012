#include "gnnsteal/mlp.hpp"

#include "gnnsteal/errors.hpp"
#include "gnnsteal/loss.hpp"

namespace gnnsteal {

Matrix mlp_forward(const TrainedModel& mlp, const Matrix& x, Head head) {
  if (mlp.config.graph_layers() != 0) throw InvalidArgument("mlp_forward: model has graph layers");
  ComputePlan plan;
  plan.num_outputs = static_cast<std::size_t>(x.rows());
  if (head == Head::embedding) {
    ModelCache cache;
    model_forward(mlp, plan, x, &cache);
    return cache.inputs.back();
  }
  Matrix out = model_forward(mlp, plan, x, nullptr);
  return head == Head::posterior ? softmax_rows(out) : out;
}

TrainedModel train_mlp(TrainedModel mlp, const Matrix& x, std::span<const int> labels, int num_classes,
                       const TrainConfig& config) {
  if (mlp.config.graph_layers() != 0) throw InvalidArgument("train_mlp: model has graph layers");
  Graph rows(x, {}, std::vector<int>(labels.begin(), labels.end()), num_classes, "mlp");
  return train_model(std::move(mlp), rows, config);
}

}  // namespace gnnsteal
