#pragma once

#include <span>
#include <vector>

#include "gnnsteal/tensor.hpp"

namespace gnnsteal {

/// Row-wise softmax, shifted by the row maximum.
Matrix softmax_rows(const Matrix& logits);

/// Index of the largest entry; ties go to the lowest index.
int argmax(const Eigen::Ref<const RowVector>& row);
std::vector<int> argmax_rows(const Matrix& scores);

struct LossValue {
  double value = 0.0;
  Matrix grad;  // d value / d input, same shape as the input
};

/// Softmax cross-entropy averaged over rows. Labels must be in 0..cols-1.
LossValue cross_entropy(const Matrix& logits, std::span<const int> labels);

}  // namespace gnnsteal
