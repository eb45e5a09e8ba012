#pragma once

#include <span>

#include "gnnsteal/model.hpp"
#include "gnnsteal/train.hpp"

namespace gnnsteal {

/// Applies a model without graph layers to feature rows.
Matrix mlp_forward(const TrainedModel& mlp, const Matrix& x, Head head);

/// train_model on the rows of `x` treated as isolated nodes.
TrainedModel train_mlp(TrainedModel mlp, const Matrix& x, std::span<const int> labels, int num_classes,
                       const TrainConfig& config);

}  // namespace gnnsteal
