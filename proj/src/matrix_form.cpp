#include "gnnsteal/matrix_form.hpp"

#include "gnnsteal/errors.hpp"

namespace gnnsteal {

MatrixFormSpec sage_matrix_form() {
  return MatrixFormSpec{.phi = 1.0, .psi = 1.0, .xi = std::nullopt, .norm = AdjacencyNorm::none,
                        .eta = RowScale::self_inclusive_degree};
}

MatrixFormSpec random_walk_matrix_form() {
  return MatrixFormSpec{.phi = 1.0, .psi = 1.0, .xi = std::nullopt, .norm = AdjacencyNorm::random_walk,
                        .eta = RowScale::none};
}

MatrixFormSpec gin_matrix_form(double eps) {
  return MatrixFormSpec{.phi = 1.0 + eps, .psi = 1.0, .xi = std::nullopt, .norm = AdjacencyNorm::none,
                        .eta = RowScale::none};
}

MatrixFormSpec gat_matrix_form(Matrix xi) {
  return MatrixFormSpec{.phi = 0.0, .psi = 1.0, .xi = std::move(xi), .norm = AdjacencyNorm::none,
                        .eta = RowScale::none};
}

Matrix matrix_form_forward(const MatrixFormSpec& spec, const Matrix& h, const Matrix& adjacency) {
  const Eigen::Index n = adjacency.rows();
  if (adjacency.cols() != n) throw InvalidArgument("matrix form: adjacency must be square");
  if (h.rows() != n) throw InvalidArgument("matrix form: H has " + std::to_string(h.rows()) + " rows, A has " +
                                           std::to_string(n));
  if (spec.xi && (spec.xi->rows() != n || spec.xi->cols() != n)) throw InvalidArgument("matrix form: Xi must be n x n");

  const Vector degree = adjacency.rowwise().sum();
  Matrix a = adjacency;
  if (spec.norm == AdjacencyNorm::random_walk) {
    for (Eigen::Index i = 0; i < n; ++i)
      if (degree(i) > 0.0) a.row(i) /= degree(i);
  }
  Matrix op = spec.xi ? Matrix(spec.xi->cwiseProduct(a)) : Matrix(spec.psi * a);
  op.diagonal().array() += spec.phi;
  Matrix out = op * h;
  if (spec.eta == RowScale::self_inclusive_degree) {
    for (Eigen::Index i = 0; i < n; ++i) out.row(i) /= degree(i) + 1.0;
  }
  return out;
}

}  // namespace gnnsteal
