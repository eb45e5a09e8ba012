#include "gnnsteal/optim.hpp"

#include <cmath>

#include "gnnsteal/errors.hpp"

namespace gnnsteal {

void Adam::step(const std::vector<Matrix*>& params, const std::vector<const Matrix*>& grads) {
  if (params.size() != grads.size()) throw InvalidArgument("adam: parameter and gradient lists differ in length");
  if (m_.empty()) {
    for (const Matrix* p : params) {
      m_.push_back(Matrix::Zero(p->rows(), p->cols()));
      v_.push_back(Matrix::Zero(p->rows(), p->cols()));
    }
  }
  if (m_.size() != params.size()) throw InvalidArgument("adam: parameter list changed between steps");
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (grads[i]->rows() != params[i]->rows() || grads[i]->cols() != params[i]->cols()) {
      throw InvalidArgument("adam: gradient shape mismatch for tensor " + std::to_string(i));
    }
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * *grads[i];
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * grads[i]->cwiseProduct(*grads[i]);
    params[i]->array() -= config_.lr * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + config_.eps);
  }
}

}  // namespace gnnsteal
