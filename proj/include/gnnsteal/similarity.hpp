#pragma once

#include <cstddef>

#include "gnnsteal/random.hpp"
#include "gnnsteal/tensor.hpp"

namespace gnnsteal {

/// Per-head feature reweightings for multi-head weighted cosine similarity.
struct SimilarityHeads {
  Matrix weights;  // heads x d, row h is w_h

  std::size_t head_count() const { return static_cast<std::size_t>(weights.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(weights.cols()); }

  /// Every weight 1: each head is plain cosine similarity.
  static SimilarityHeads ones(std::size_t heads, std::size_t dim);
  /// Weights 1 + U(-spread, spread), so heads start near plain cosine but differ.
  static SimilarityHeads random(std::size_t heads, std::size_t dim, Rng& rng, double spread = 0.1);
};

/// S_ij = mean_h cos(w_h * x_i, w_h * x_j). Symmetric, unit diagonal, entries in [-1, 1].
/// Throws InvalidArgument if some weighted row has zero norm.
Matrix multihead_similarity(const Matrix& x, const SimilarityHeads& heads);

/// Gradient of sum_ij grad_s_ij * S_ij with respect to the head weights. The diagonal of
/// grad_s is ignored (S_ii is constant).
Matrix multihead_similarity_backward(const Matrix& x, const SimilarityHeads& heads, const Matrix& grad_s);

}  // namespace gnnsteal
