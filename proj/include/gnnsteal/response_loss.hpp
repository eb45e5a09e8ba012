#pragma once

#include "gnnsteal/loss.hpp"

namespace gnnsteal {

/// Rows whose residual norm is below this get a zero gradient.
inline constexpr double kZeroRowNorm = 1e-12;

/// (1/n) sum_v |H_hat_v - R_v|_2, the row-wise L2,1 norm of the residual over n.
LossValue response_loss(const Matrix& h_hat, const Matrix& r);

}  // namespace gnnsteal
