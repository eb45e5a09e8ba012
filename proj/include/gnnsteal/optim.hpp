#pragma once

#include <vector>

#include "gnnsteal/tensor.hpp"

namespace gnnsteal {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction. Moment buffers are created on the first step and must keep
/// matching the parameter list passed afterwards.
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  void step(const std::vector<Matrix*>& params, const std::vector<const Matrix*>& grads);
  std::size_t steps() const { return t_; }

 private:
  AdamConfig config_;
  std::size_t t_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

}  // namespace gnnsteal
