#include <algorithm>
#include <numeric>

#include "gnnsteal/errors.hpp"
#include "gnnsteal/graph.hpp"

namespace gnnsteal {

namespace {

constexpr Eigen::Index kRowBlock = 512;

// Indices of the k largest entries of `row`, skipping `self`; ties go to the lower index.
std::vector<NodeId> best_k(const Eigen::Ref<const RowVector>& row, NodeId self, std::size_t k,
                           std::vector<NodeId>& scratch) {
  scratch.clear();
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    if (static_cast<NodeId>(j) != self) scratch.push_back(static_cast<NodeId>(j));
  }
  auto better = [&](NodeId a, NodeId b) {
    const double sa = row(static_cast<Eigen::Index>(a));
    const double sb = row(static_cast<Eigen::Index>(b));
    return sa != sb ? sa > sb : a < b;
  };
  std::partial_sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k), scratch.end(), better);
  std::vector<NodeId> out(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<std::vector<NodeId>> top_k_neighbors(const Matrix& similarity, std::size_t k) {
  const auto n = static_cast<std::size_t>(similarity.rows());
  if (similarity.cols() != similarity.rows()) throw InvalidArgument("top_k_neighbors: similarity must be square");
  if (k < 1) throw InvalidArgument("knn: k must be >= 1");
  if (k >= n) throw InvalidArgument("knn: k=" + std::to_string(k) + " must be < n=" + std::to_string(n));
  std::vector<std::vector<NodeId>> out(n);
  std::vector<NodeId> scratch;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = best_k(similarity.row(static_cast<Eigen::Index>(i)), i, k, scratch);
  }
  return out;
}

std::vector<Edge> symmetrize(const std::vector<std::vector<NodeId>>& neighbor_lists) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < neighbor_lists.size(); ++i) {
    for (NodeId j : neighbor_lists[i]) {
      if (j == i) continue;
      edges.push_back({std::min<NodeId>(i, j), std::max<NodeId>(i, j)});
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

std::vector<Edge> knn_graph(const Matrix& features, std::size_t k, SimilarityMetric metric) {
  (void)metric;  // cosine is the only metric
  const auto n = static_cast<std::size_t>(features.rows());
  if (k < 1) throw InvalidArgument("knn_graph: k must be >= 1");
  if (k >= n) throw InvalidArgument("knn_graph: k=" + std::to_string(k) + " must be < n=" + std::to_string(n));

  Matrix normalized = features;
  for (Eigen::Index i = 0; i < normalized.rows(); ++i) {
    const double norm = normalized.row(i).norm();
    if (norm == 0.0) throw InvalidArgument("knn_graph: feature row " + std::to_string(i) + " has zero norm");
    normalized.row(i) /= norm;
  }

  std::vector<std::vector<NodeId>> lists(n);
  std::vector<NodeId> scratch;
  for (Eigen::Index start = 0; start < static_cast<Eigen::Index>(n); start += kRowBlock) {
    const Eigen::Index rows = std::min(kRowBlock, static_cast<Eigen::Index>(n) - start);
    const Matrix block = normalized.middleRows(start, rows) * normalized.transpose();
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto i = static_cast<NodeId>(start + r);
      lists[i] = best_k(block.row(r), i, k, scratch);
    }
  }
  return symmetrize(lists);
}

}  // namespace gnnsteal
