#include "gnnsteal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gnnsteal/errors.hpp"
#include "gnnsteal/loss.hpp"

namespace gnnsteal {

namespace {

double agreement(std::span<const int> a, std::span<const int> b, const char* what) {
  if (a.size() != b.size()) {
    throw InvalidArgument(std::string(what) + ": " + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " entries");
  }
  if (a.empty()) throw InvalidArgument(std::string(what) + " over an empty set");
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) same += a[i] == b[i];
  return static_cast<double>(same) / static_cast<double>(a.size());
}

}  // namespace

double accuracy(std::span<const int> predictions, std::span<const int> labels) {
  return agreement(predictions, labels, "accuracy");
}

double accuracy(const Matrix& scores, std::span<const int> labels) { return accuracy(argmax_rows(scores), labels); }

double fidelity(std::span<const int> surrogate, std::span<const int> target) {
  return agreement(surrogate, target, "fidelity");
}

double fidelity(const Matrix& surrogate_scores, const Matrix& target_scores) {
  return fidelity(argmax_rows(surrogate_scores), argmax_rows(target_scores));
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw InvalidArgument("pearson: sequences differ in length");
  if (xs.size() < 2) throw InvalidArgument("pearson: need at least two points");
  const Summary sx = summarize(xs), sy = summarize(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - sx.mean, dy = ys[i] - sy.mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw InvalidArgument("pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

Summary summarize(std::span<const double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(s.count);
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(sq / static_cast<double>(s.count));
  return s;
}

}  // namespace gnnsteal
