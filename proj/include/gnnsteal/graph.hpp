#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gnnsteal/tensor.hpp"

namespace gnnsteal {

inline constexpr int kUnknownLabel = -1;

/// Undirected edge, stored with u <= v. u == v is an explicit self-loop.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Labelled, undirected, unweighted, attributed graph.
///
/// Immutable after construction. Edges are canonicalised (u <= v), deduplicated and
/// sorted; neighbour lists are sorted. `origin()` maps local node ids to ids in the
/// graph this one was carved out of (identity for a freshly loaded graph).
class Graph {
 public:
  Graph() = default;
  Graph(Matrix features, std::vector<Edge> edges, std::vector<int> labels, int num_classes,
        std::string name = {});

  std::size_t num_nodes() const { return static_cast<std::size_t>(features_.rows()); }
  std::size_t feature_dim() const { return static_cast<std::size_t>(features_.cols()); }
  std::size_t num_edges() const { return edges_.size(); }
  int num_classes() const { return num_classes_; }
  const std::string& name() const { return name_; }

  const Matrix& features() const { return features_; }
  const std::vector<int>& labels() const { return labels_; }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const NodeId> neighbors(NodeId v) const;
  std::size_t degree(NodeId v) const { return neighbors(v).size(); }
  const std::vector<NodeId>& origin() const { return origin_; }

  /// Dense symmetric {0,1} adjacency.
  Matrix dense_adjacency() const;

  /// Subgraph induced on `nodes`, renumbered 0..k-1 in the given order.
  Graph induced(std::span<const NodeId> nodes) const;

  /// Same nodes, features and labels with a replacement edge set.
  Graph with_edges(std::vector<Edge> edges) const;

  /// Same graph with labels replaced (length must match).
  Graph with_labels(std::vector<int> labels) const;

 private:
  Matrix features_;
  std::vector<Edge> edges_;
  std::vector<int> labels_;
  int num_classes_ = 0;
  std::string name_;
  std::vector<NodeId> origin_;
  // CSR adjacency.
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> adjacency_;
};

struct SplitSpec {
  double target_train_fraction = 0.2;
  double query_fraction = 0.3;
  double test_fraction = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Disjoint node partition; each part is the induced subgraph on its node set.
struct InductiveSplit {
  Graph train;
  Graph query;
  Graph test;
};

/// Partitions the nodes at random into train/query/test, dropping cross-partition edges.
InductiveSplit split_inductive(const Graph& graph, const SplitSpec& spec);

/// Node ids of each part, ascending, as produced by split_inductive for the same inputs.
struct SplitAssignment {
  std::vector<NodeId> train;
  std::vector<NodeId> query;
  std::vector<NodeId> test;
};
SplitAssignment assign_split(std::size_t num_nodes, const SplitSpec& spec);

struct Subgraph {
  NodeId center = 0;           // id in the source graph
  std::size_t hops = 0;
  std::vector<NodeId> nodes;   // ids in the source graph, BFS order, center first
  Graph graph;                 // induced subgraph; local id i corresponds to nodes[i]
};

Subgraph khop_subgraph(const Graph& graph, NodeId center, std::size_t hops);

/// Uniform sample of min(fanout, degree) neighbours without replacement, returned sorted.
/// The draw depends only on (seed, node), not on call order.
std::vector<NodeId> sample_neighbors(const Graph& graph, NodeId node, std::size_t fanout,
                                     std::uint64_t seed);

enum class SimilarityMetric { cosine };

/// k nearest neighbours by similarity (ties to the lower id), symmetrised by union.
std::vector<Edge> knn_graph(const Matrix& features, std::size_t k,
                            SimilarityMetric metric = SimilarityMetric::cosine);

/// For each row, the k most similar other rows of a precomputed similarity matrix.
std::vector<std::vector<NodeId>> top_k_neighbors(const Matrix& similarity, std::size_t k);

/// Union-symmetrised edge list from per-node neighbour lists.
std::vector<Edge> symmetrize(const std::vector<std::vector<NodeId>>& neighbor_lists);

/// Stochastic block model with class-conditional Gaussian features.
Graph synth_graph(std::size_t n, int classes, double intra_p, double inter_p, std::size_t dim,
                  std::uint64_t seed);

/// Erdos-Renyi style graph with the requested mean degree.
std::vector<Edge> random_graph(std::size_t n, double mean_degree, std::uint64_t seed);

}  // namespace gnnsteal
