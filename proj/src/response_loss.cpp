#include "gnnsteal/response_loss.hpp"

#include "gnnsteal/errors.hpp"

namespace gnnsteal {

LossValue response_loss(const Matrix& h_hat, const Matrix& r) {
  if (h_hat.rows() != r.rows() || h_hat.cols() != r.cols()) {
    throw InvalidArgument("response_loss: shapes " + std::to_string(h_hat.rows()) + "x" + std::to_string(h_hat.cols()) +
                          " and " + std::to_string(r.rows()) + "x" + std::to_string(r.cols()) + " differ");
  }
  if (h_hat.rows() == 0) throw InvalidArgument("response_loss: no rows");
  const auto n = static_cast<double>(h_hat.rows());
  LossValue out{0.0, h_hat - r};
  for (Eigen::Index i = 0; i < out.grad.rows(); ++i) {
    const double norm = out.grad.row(i).norm();
    out.value += norm;
    if (norm < kZeroRowNorm) {
      out.grad.row(i).setZero();
    } else {
      out.grad.row(i) /= norm * n;
    }
  }
  out.value /= n;
  return out;
}

}  // namespace gnnsteal
