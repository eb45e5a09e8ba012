#include "gnnsteal/loss.hpp"

#include <cmath>

#include "gnnsteal/errors.hpp"

namespace gnnsteal {

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double shift = logits.row(i).maxCoeff();
    out.row(i) = (logits.row(i).array() - shift).exp().matrix();
    out.row(i) /= out.row(i).sum();
  }
  return out;
}

int argmax(const Eigen::Ref<const RowVector>& row) {
  if (row.size() == 0) throw InvalidArgument("argmax of an empty row");
  Eigen::Index best = 0;
  for (Eigen::Index j = 1; j < row.size(); ++j)
    if (row(j) > row(best)) best = j;
  return static_cast<int>(best);
}

std::vector<int> argmax_rows(const Matrix& scores) {
  std::vector<int> out(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) out[static_cast<std::size_t>(i)] = argmax(scores.row(i));
  return out;
}

LossValue cross_entropy(const Matrix& logits, std::span<const int> labels) {
  if (static_cast<std::size_t>(logits.rows()) != labels.size()) {
    throw InvalidArgument("cross_entropy: " + std::to_string(labels.size()) + " labels for " +
                          std::to_string(logits.rows()) + " rows");
  }
  if (labels.empty()) throw InvalidArgument("cross_entropy: empty batch");
  LossValue out;
  out.grad = softmax_rows(logits);
  const double inv_n = 1.0 / static_cast<double>(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i];
    if (y < 0 || y >= logits.cols()) {
      throw InvalidArgument("cross_entropy: label " + std::to_string(y) + " outside 0.." +
                            std::to_string(logits.cols() - 1));
    }
    const auto r = static_cast<Eigen::Index>(i);
    const double shift = logits.row(r).maxCoeff();
    const double log_z = shift + std::log((logits.row(r).array() - shift).exp().sum());
    out.value += (log_z - logits(r, y)) * inv_n;
    out.grad(r, y) -= 1.0;
  }
  out.grad *= inv_n;
  return out;
}

}  // namespace gnnsteal
