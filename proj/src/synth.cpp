#include "gnnsteal/errors.hpp"
#include "gnnsteal/graph.hpp"
#include "gnnsteal/random.hpp"

namespace gnnsteal {

Graph synth_graph(std::size_t n, int classes, double intra_p, double inter_p, std::size_t dim,
                  std::uint64_t seed) {
  if (classes < 1) throw InvalidArgument("synth_graph: need at least one class");
  if (static_cast<std::size_t>(classes) > n) {
    throw InvalidArgument("synth_graph: " + std::to_string(classes) + " classes exceed " +
                          std::to_string(n) + " nodes");
  }
  if (!(0.0 <= inter_p && inter_p <= intra_p && intra_p <= 1.0)) {
    throw InvalidArgument("synth_graph: require 0 <= inter_p <= intra_p <= 1");
  }
  if (dim < static_cast<std::size_t>(classes)) {
    throw InvalidArgument("synth_graph: feature dimension must be >= class count");
  }

  Rng rng(derive_seed(seed, {0x5b3}));
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % static_cast<std::size_t>(classes));
  std::shuffle(labels.begin(), labels.end(), rng);

  std::normal_distribution<double> noise(0.0, 1.0);
  Matrix features(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    for (Eigen::Index j = 0; j < features.cols(); ++j) features(i, j) = noise(rng);
    features(i, labels[static_cast<std::size_t>(i)]) += 4.0;
  }

  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<Edge> edges;
  for (NodeId a = 0; a < n; ++a) {
    for (NodeId b = a + 1; b < n; ++b) {
      const double p = labels[a] == labels[b] ? intra_p : inter_p;
      if (p > 0.0 && coin(rng) < p) edges.push_back({a, b});
    }
  }
  return Graph(std::move(features), std::move(edges), std::move(labels), classes, "synthetic");
}

}  // namespace gnnsteal
