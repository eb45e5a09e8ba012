#pragma once

#include <optional>

#include "gnnsteal/tensor.hpp"

namespace gnnsteal {

enum class AdjacencyNorm {
  none,         // A
  random_walk,  // D^-1 A; rows of isolated nodes stay zero
};

enum class RowScale {
  none,
  self_inclusive_degree,  // divide row v by deg(v) + 1
};

/// H' = eta^-1 (phi I + psi A~) H, where psi is a scalar or, when `xi` is set, the
/// element-wise weight matrix Xi applied as Xi * A~ (entrywise).
struct MatrixFormSpec {
  double phi = 1.0;
  double psi = 1.0;
  std::optional<Matrix> xi;
  AdjacencyNorm norm = AdjacencyNorm::none;
  RowScale eta = RowScale::none;
};

/// Mean over self and neighbours, the sage layer's aggregation.
MatrixFormSpec sage_matrix_form();
/// (I + D^-1 A) H.
MatrixFormSpec random_walk_matrix_form();
/// ((1 + eps) I + A) H, the gin layer's aggregation.
MatrixFormSpec gin_matrix_form(double eps);
/// Xi * A, the attention-weighted aggregation with phi = 0.
MatrixFormSpec gat_matrix_form(Matrix xi);

Matrix matrix_form_forward(const MatrixFormSpec& spec, const Matrix& h, const Matrix& adjacency);

}  // namespace gnnsteal
