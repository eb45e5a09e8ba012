#include "gnnsteal/tsne.hpp"

#include <cmath>
#include <limits>

#include "gnnsteal/errors.hpp"
#include "gnnsteal/random.hpp"

namespace gnnsteal {

namespace {

// Row-conditional affinities p_{j|i} with entropy log(perplexity).
Matrix conditional_affinities(const Matrix& sq_dist, double perplexity) {
  const Eigen::Index n = sq_dist.rows();
  const double target = std::log(perplexity);
  Matrix p = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (int step = 0; step < 200; ++step) {
      double sum = 0.0, weighted = 0.0;
      // Subtract the smallest distance so the exponentials do not all underflow.
      double min_d = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < n; ++j)
        if (j != i) min_d = std::min(min_d, sq_dist(i, j));
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        const double w = std::exp(-beta * (sq_dist(i, j) - min_d));
        p(i, j) = w;
        sum += w;
        weighted += w * (sq_dist(i, j) - min_d);
      }
      const double entropy = std::log(sum) + beta * weighted / sum;
      p.row(i) /= sum;
      const double diff = entropy - target;
      if (std::abs(diff) < 1e-5) break;
      if (diff > 0) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : (beta + hi) / 2.0;
      } else {
        hi = beta;
        beta = (beta + lo) / 2.0;
      }
    }
  }
  return p;
}

Matrix squared_distances(const Matrix& x) {
  const Vector norms = x.rowwise().squaredNorm();
  Matrix d = (-2.0 * x * x.transpose()).colwise() + norms;
  d.rowwise() += norms.transpose();
  return d.cwiseMax(0.0);
}

}  // namespace

Matrix tsne_project(const Matrix& h, const TsneConfig& cfg) {
  const Eigen::Index n = h.rows();
  if (n < 4) throw InvalidArgument("t-SNE needs at least 4 points, got " + std::to_string(n));
  if (!(cfg.perplexity > 0.0) || cfg.perplexity >= static_cast<double>(n)) {
    throw InvalidArgument("t-SNE perplexity " + std::to_string(cfg.perplexity) + " must be below the point count " +
                          std::to_string(n));
  }

  Matrix x = h.rowwise() - h.colwise().mean();
  const double max_abs = x.cwiseAbs().maxCoeff();
  if (max_abs > 0.0) x /= max_abs;

  const Matrix cond = conditional_affinities(squared_distances(x), cfg.perplexity);
  Matrix p = (cond + cond.transpose()) / (2.0 * static_cast<double>(n));
  p = p.cwiseMax(1e-12);
  p.diagonal().setZero();

  Rng rng(derive_seed(cfg.seed, {0x75e}));
  std::normal_distribution<double> init(0.0, 1e-4);
  Matrix y(n, 2);
  for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = init(rng);
  Matrix update = Matrix::Zero(n, 2);
  Matrix gains = Matrix::Ones(n, 2);

  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    const double exaggeration = it < cfg.exaggeration_iterations ? cfg.early_exaggeration : 1.0;
    const double momentum = it < cfg.exaggeration_iterations ? 0.5 : 0.8;
    Matrix num = (squared_distances(y).array() + 1.0).inverse().matrix();
    num.diagonal().setZero();
    const double z = num.sum();
    const Matrix q = (num / z).cwiseMax(1e-12);
    // dC/dy_i = 4 sum_j (exag * p_ij - q_ij) num_ij (y_i - y_j)
    const Matrix w = (exaggeration * p - q).cwiseProduct(num);
    const Vector wsum = w.rowwise().sum();
    const Matrix grad = 4.0 * (wsum.asDiagonal() * y - w * y);

    for (Eigen::Index i = 0; i < grad.size(); ++i) {
      const bool same_sign = (grad.data()[i] > 0) == (update.data()[i] > 0);
      gains.data()[i] = same_sign ? std::max(gains.data()[i] * 0.8, 0.01) : gains.data()[i] + 0.2;
    }
    update = momentum * update - cfg.learning_rate * gains.cwiseProduct(grad);
    y += update;
    y.rowwise() -= y.colwise().mean();
  }
  return y;
}

}  // namespace gnnsteal
