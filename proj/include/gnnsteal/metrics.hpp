#pragma once

#include <span>
#include <vector>

#include "gnnsteal/tensor.hpp"

namespace gnnsteal {

/// Share of positions where prediction == label. Throws on empty or mismatched input.
double accuracy(std::span<const int> predictions, std::span<const int> labels);
/// Same, from score rows (argmax, ties to the lowest class).
double accuracy(const Matrix& scores, std::span<const int> labels);

/// Share of positions where the two prediction vectors agree.
double fidelity(std::span<const int> surrogate, std::span<const int> target);
double fidelity(const Matrix& surrogate_scores, const Matrix& target_scores);

/// Sample Pearson correlation. Needs >= 2 points and non-zero variance on both sides.
double pearson(std::span<const double> xs, std::span<const double> ys);

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation (divides by count)
};

Summary summarize(std::span<const double> values);

}  // namespace gnnsteal
