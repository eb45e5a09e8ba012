#pragma once

#include <Eigen/SparseCore>

#include "gnnsteal/tensor.hpp"

namespace gnnsteal {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

inline constexpr double kConnectivityGuard = 1e-12;

struct RegularizerCoefficients {
  double smoothness = 0.2;    // alpha
  double connectivity = 0.1;  // beta
  double sparsity = 0.1;      // gamma

  void validate() const;
};

/// alpha/n^2 tr(X^T L X) - beta/n 1^T log(A 1 + delta) + gamma/n^2 ||A||_F^2 with L = D - A.
/// A must be symmetric and non-negative.
double graph_regularizer(const Matrix& a, const Matrix& x, const RegularizerCoefficients& coeffs);
double graph_regularizer(const SparseMatrix& a, const SparseMatrix& x, const RegularizerCoefficients& coeffs);

/// Partial derivatives with respect to each stored entry of `a` (entries treated as
/// independent variables), on the sparsity pattern of `a`.
SparseMatrix graph_regularizer_grad(const SparseMatrix& a, const SparseMatrix& x, const RegularizerCoefficients& coeffs);

}  // namespace gnnsteal
