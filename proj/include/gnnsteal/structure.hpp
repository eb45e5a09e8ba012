#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gnnsteal/graph.hpp"
#include "gnnsteal/layers.hpp"
#include "gnnsteal/regularizer.hpp"
#include "gnnsteal/similarity.hpp"

namespace gnnsteal {

struct StructureLearnConfig {
  std::size_t heads = 8;
  std::size_t initial_k = 24;
  double edge_cutoff = 0.99;  // on the final similarity matrix
  RegularizerCoefficients regularizer;
  double mix = 0.8;  // weight of the kNN seed in the candidate adjacency
  std::size_t max_iterations = 10;
  double stop_fraction = 1e-3;  // stop once fewer than this fraction of pairs flip
  // Inner classifier: two mean-aggregating layers over the weighted graph.
  std::size_t hidden = 256;
  std::size_t inner_epochs = 50;
  double inner_lr = 0.01;
  std::size_t head_steps = 5;  // similarity-head updates per refinement iteration
  double head_lr = 0.01;

  void validate() const;
};

struct StructureIteration {
  std::size_t iteration = 0;
  double task_loss = 0.0;
  double regularization = 0.0;
  double joint_loss = 0.0;
  double changed_fraction = 1.0;  // share of node pairs whose thresholded edge flipped
  std::size_t learned_edges = 0;  // above the cutoff in the similarity this iteration was fitted on;
                                   // the final edges come from the refitted logits and can differ
};

struct LearnedStructure {
  std::vector<Edge> edges;       // binary, symmetric, no self-loops
  std::vector<Edge> seed_edges;  // the initial kNN graph
  std::vector<StructureIteration> trace;  // entry 0: classifier fitted on the seed graph
  SimilarityHeads feature_heads;
  SimilarityHeads embedding_heads;  // over the classifier logits
};

/// Inner classifier: H = ReLU(P X W1 + b1), Z = P H W2 + b2 with P the row-normalised
/// (A + I) of a weighted adjacency A. `first` and `second` are dense layers.
struct InnerClassifier {
  LayerParams first;
  LayerParams second;
};

struct HeadObjective {
  double value = 0.0;  // cross-entropy on labelled nodes + graph_regularizer(A, X)
  Matrix grad;         // d value / d head weights
};

/// The joint loss for a fixed classifier as a function of the embedding heads, with A the
/// candidate adjacency built from `seed` and the similarity of `embeddings` (the logits).
HeadObjective head_objective(const InnerClassifier& classifier, const SparseMatrix& x, const Matrix& embeddings,
                             const SimilarityHeads& heads, const SparseMatrix& seed, std::span<const int> labels,
                             const StructureLearnConfig& config);

/// Learns a discrete adjacency for structureless query features.
///
/// Seeds a kNN graph from multi-head similarity of the features, then alternates between
/// training the inner classifier (cross-entropy on labelled nodes) on the candidate adjacency
///   mix * A_seed + (1 - mix) * S masked to S >= edge_cutoff
/// and updating the similarity heads on the joint loss (cross-entropy + graph_regularizer).
/// S is the multi-head similarity of the classifier's output logits. Refinement stops when
/// fewer than stop_fraction of node pairs flip, or when the joint loss rises by more than 1e-3
/// (that iteration is undone). The result is 1[S >= edge_cutoff]; seed edges are not retained
/// unless they pass the cutoff.
/// Labels may contain kUnknownLabel for unlabelled nodes.
LearnedStructure learn_structure(const Matrix& x, std::span<const int> labels, int num_classes,
                                 const StructureLearnConfig& config, std::uint64_t seed);

/// Baselines for comparison: plain-cosine kNN, and a uniform random graph of a given edge count.
/// As in the learner's seed graph, all-zero feature rows are left without kNN edges.
std::vector<Edge> knn_baseline(const Matrix& x, std::size_t k);
std::vector<Edge> random_baseline(std::size_t n, std::size_t num_edges, std::uint64_t seed);

}  // namespace gnnsteal
