#include "gnnsteal/regularizer.hpp"

#include <cmath>

#include "gnnsteal/errors.hpp"

namespace gnnsteal {

namespace {

void check_adjacency(const SparseMatrix& a, const SparseMatrix& x) {
  if (a.rows() != a.cols()) throw InvalidArgument("graph_regularizer: adjacency must be square");
  if (a.rows() != x.rows()) throw InvalidArgument("graph_regularizer: adjacency and features disagree on n");
  for (Eigen::Index i = 0; i < a.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(a, i); it; ++it)
      if (it.value() < 0.0) throw InvalidArgument("graph_regularizer: adjacency has a negative entry");
  const double scale = std::max(1.0, a.norm());
  if (SparseMatrix(a - SparseMatrix(a.transpose())).norm() > 1e-12 * scale) {
    throw InvalidArgument("graph_regularizer: adjacency is not symmetric");
  }
}

}  // namespace

void RegularizerCoefficients::validate() const {
  if (!(smoothness >= 0.0) || !(connectivity >= 0.0) || !(sparsity >= 0.0)) {
    throw InvalidArgument("regularizer coefficients must be >= 0");
  }
}

double graph_regularizer(const Matrix& a, const Matrix& x, const RegularizerCoefficients& coeffs) {
  return graph_regularizer(SparseMatrix(a.sparseView()), SparseMatrix(x.sparseView()), coeffs);
}

double graph_regularizer(const SparseMatrix& a, const SparseMatrix& x, const RegularizerCoefficients& coeffs) {
  coeffs.validate();
  check_adjacency(a, x);
  const auto n = static_cast<double>(a.rows());
  // tr(X^T L X) = sum_ij A_ij (|x_i|^2 - x_i . x_j)
  double smooth = 0.0, frob = 0.0, connect = 0.0;
  for (Eigen::Index i = 0; i < a.outerSize(); ++i) {
    const double self = x.row(i).squaredNorm();
    double degree = 0.0;
    for (SparseMatrix::InnerIterator it(a, i); it; ++it) {
      smooth += it.value() * (self - x.row(i).dot(x.row(it.col())));
      frob += it.value() * it.value();
      degree += it.value();
    }
    connect += std::log(degree + kConnectivityGuard);
  }
  return coeffs.smoothness / (n * n) * smooth - coeffs.connectivity / n * connect + coeffs.sparsity / (n * n) * frob;
}

SparseMatrix graph_regularizer_grad(const SparseMatrix& a, const SparseMatrix& x, const RegularizerCoefficients& coeffs) {
  coeffs.validate();
  check_adjacency(a, x);
  const auto n = static_cast<double>(a.rows());
  SparseMatrix grad = a;
  for (Eigen::Index i = 0; i < grad.outerSize(); ++i) {
    const double self = x.row(i).squaredNorm();
    double degree = 0.0;
    for (SparseMatrix::InnerIterator it(a, i); it; ++it) degree += it.value();
    for (SparseMatrix::InnerIterator it(grad, i); it; ++it) {
      const double aij = it.value();
      it.valueRef() = coeffs.smoothness / (n * n) * (self - x.row(i).dot(x.row(it.col()))) -
                      coeffs.connectivity / n / (degree + kConnectivityGuard) + 2.0 * coeffs.sparsity / (n * n) * aij;
    }
  }
  return grad;
}

}  // namespace gnnsteal
