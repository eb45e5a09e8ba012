#include "gnnsteal/similarity.hpp"

#include "gnnsteal/errors.hpp"

namespace gnnsteal {

namespace {

// Rows of x reweighted by w and scaled to unit length; norms receives the pre-scaling lengths.
Matrix unit_weighted_rows(const Matrix& x, const Eigen::Ref<const RowVector>& w, Vector& norms) {
  Matrix y = x.array().rowwise() * w.array();
  norms = y.rowwise().norm();
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    if (norms(i) == 0.0) throw InvalidArgument("multihead_similarity: weighted row " + std::to_string(i) + " has zero norm");
    y.row(i) /= norms(i);
  }
  return y;
}

void check_shapes(const Matrix& x, const SimilarityHeads& heads) {
  if (heads.head_count() < 1) throw InvalidArgument("multihead_similarity: need at least one head");
  if (heads.dim() != static_cast<std::size_t>(x.cols())) {
    throw InvalidArgument("multihead_similarity: head width " + std::to_string(heads.dim()) + " != feature width " +
                          std::to_string(x.cols()));
  }
}

}  // namespace

SimilarityHeads SimilarityHeads::ones(std::size_t heads, std::size_t dim) {
  return {Matrix::Ones(static_cast<Eigen::Index>(heads), static_cast<Eigen::Index>(dim))};
}

SimilarityHeads SimilarityHeads::random(std::size_t heads, std::size_t dim, Rng& rng, double spread) {
  std::uniform_real_distribution<double> u(-spread, spread);
  SimilarityHeads out = ones(heads, dim);
  for (Eigen::Index i = 0; i < out.weights.size(); ++i) out.weights.data()[i] += u(rng);
  return out;
}

Matrix multihead_similarity(const Matrix& x, const SimilarityHeads& heads) {
  check_shapes(x, heads);
  const Eigen::Index n = x.rows();
  Matrix s = Matrix::Zero(n, n);
  Vector norms;
  for (Eigen::Index h = 0; h < heads.weights.rows(); ++h) {
    const Matrix y = unit_weighted_rows(x, heads.weights.row(h), norms);
    s.noalias() += y * y.transpose();
  }
  s /= static_cast<double>(heads.head_count());
  // GEMM blocking can leave S_ij and S_ji an ulp apart.
  s = (0.5 * (s + s.transpose())).cwiseMax(-1.0).cwiseMin(1.0);
  s.diagonal().setOnes();
  return s;
}

Matrix multihead_similarity_backward(const Matrix& x, const SimilarityHeads& heads, const Matrix& grad_s) {
  check_shapes(x, heads);
  if (grad_s.rows() != x.rows() || grad_s.cols() != x.rows()) throw InvalidArgument("multihead_similarity_backward: grad shape");
  Matrix g = grad_s + grad_s.transpose();
  g.diagonal().setZero();
  g /= static_cast<double>(heads.head_count());

  Matrix grad_w(heads.weights.rows(), heads.weights.cols());
  Vector norms;
  for (Eigen::Index h = 0; h < heads.weights.rows(); ++h) {
    const Matrix y = unit_weighted_rows(x, heads.weights.row(h), norms);
    const Matrix d_unit = g * y;
    // Through the row normalisation: (I - y y^T) / |y|.
    const Vector along = (d_unit.cwiseProduct(y)).rowwise().sum();
    Matrix d_raw = d_unit - along.asDiagonal() * y;
    d_raw = norms.cwiseInverse().asDiagonal() * d_raw;
    grad_w.row(h) = d_raw.cwiseProduct(x).colwise().sum();
  }
  return grad_w;
}

}  // namespace gnnsteal
