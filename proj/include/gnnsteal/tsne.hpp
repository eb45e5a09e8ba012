#pragma once

#include <cstdint>

#include "gnnsteal/tensor.hpp"

namespace gnnsteal {

struct TsneConfig {
  double perplexity = 30.0;
  std::size_t iterations = 1000;
  double early_exaggeration = 12.0;
  std::size_t exaggeration_iterations = 250;
  double learning_rate = 200.0;
  std::uint64_t seed = 0;
};

/// Exact t-SNE to two dimensions: Gaussian input affinities calibrated to the perplexity by
/// bisection, symmetrised; Student-t output kernel; gradient descent with momentum
/// (0.5, then 0.8 after the exaggeration phase) and per-coordinate gains.
/// The result is centred (zero column means).
Matrix tsne_project(const Matrix& h, const TsneConfig& config = {});

}  // namespace gnnsteal
