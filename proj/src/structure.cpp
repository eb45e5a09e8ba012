#include "gnnsteal/structure.hpp"

#include <algorithm>
#include <set>

#include "gnnsteal/errors.hpp"
#include "gnnsteal/loss.hpp"
#include "gnnsteal/optim.hpp"

namespace gnnsteal {

namespace {

constexpr double kLossTolerance = 1e-3;

SparseMatrix edges_to_sparse(std::size_t n, std::span<const Edge> edges) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(2 * edges.size());
  for (const Edge& e : edges) {
    if (e.u == e.v) continue;
    t.emplace_back(static_cast<int>(e.u), static_cast<int>(e.v), 1.0);
    t.emplace_back(static_cast<int>(e.v), static_cast<int>(e.u), 1.0);
  }
  SparseMatrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

SparseMatrix candidate_adjacency(const SparseMatrix& seed, const Matrix& s, const StructureLearnConfig& cfg) {
  std::vector<Eigen::Triplet<double>> t;
  for (Eigen::Index i = 0; i < seed.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(seed, i); it; ++it) t.emplace_back(static_cast<int>(i), static_cast<int>(it.col()), cfg.mix * it.value());
  for (Eigen::Index i = 0; i < s.rows(); ++i)
    for (Eigen::Index j = 0; j < s.cols(); ++j)
      if (i != j && s(i, j) >= cfg.edge_cutoff) t.emplace_back(static_cast<int>(i), static_cast<int>(j), (1.0 - cfg.mix) * s(i, j));
  SparseMatrix a(s.rows(), s.cols());
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

// Row-normalised A + I; degree receives the row sums of A + I.
SparseMatrix propagation(const SparseMatrix& a, Vector& degree) {
  SparseMatrix eye(a.rows(), a.cols());
  eye.setIdentity();
  SparseMatrix p = a + eye;
  degree = Vector::Zero(a.rows());
  for (Eigen::Index i = 0; i < p.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(p, i); it; ++it) degree(i) += it.value();
    for (SparseMatrix::InnerIterator it(p, i); it; ++it) it.valueRef() /= degree(i);
  }
  return p;
}

struct Pass {
  Matrix p;       // X W1
  Matrix pre;     // P X W1 + b1, the embedding
  Matrix hidden;  // ReLU(pre)
  Matrix q;       // hidden W2
  Matrix logits;
};

Pass classifier_forward(const InnerClassifier& c, const SparseMatrix& prop, const SparseMatrix& x) {
  Pass out;
  out.p = x * c.first.weight;
  out.pre = prop * out.p;
  out.pre.rowwise() += c.first.bias.row(0);
  out.hidden = out.pre.cwiseMax(0.0);
  out.q = out.hidden * c.second.weight;
  out.logits = prop * out.q;
  out.logits.rowwise() += c.second.bias.row(0);
  return out;
}

LossValue labelled_cross_entropy(const Matrix& logits, std::span<const int> labels) {
  std::vector<NodeId> rows;
  std::vector<int> known;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == kUnknownLabel) continue;
    rows.push_back(i);
    known.push_back(labels[i]);
  }
  LossValue out{0.0, Matrix::Zero(logits.rows(), logits.cols())};
  if (rows.empty()) return out;
  Matrix sub(static_cast<Eigen::Index>(rows.size()), logits.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) sub.row(static_cast<Eigen::Index>(r)) = logits.row(static_cast<Eigen::Index>(rows[r]));
  const LossValue ce = cross_entropy(sub, known);
  out.value = ce.value;
  for (std::size_t r = 0; r < rows.size(); ++r) out.grad.row(static_cast<Eigen::Index>(rows[r])) = ce.grad.row(static_cast<Eigen::Index>(r));
  return out;
}

struct Grads {
  InnerClassifier params;
  SparseMatrix prop;  // d loss / d P on P's pattern; empty unless requested
};

Grads classifier_backward(const InnerClassifier& c, const SparseMatrix& prop, const SparseMatrix& x, const Pass& pass,
                          const Matrix& grad_logits, bool want_prop) {
  Grads g{{c.first.zeros_like(), c.second.zeros_like()}, {}};
  const Matrix dq = prop.transpose() * grad_logits;
  g.params.second.weight = pass.hidden.transpose() * dq;
  g.params.second.bias = grad_logits.colwise().sum();
  const Matrix dpre = (dq * c.second.weight.transpose()).cwiseProduct((pass.pre.array() > 0.0).cast<double>().matrix());
  g.params.first.bias = dpre.colwise().sum();
  const Matrix dp = prop.transpose() * dpre;
  g.params.first.weight = x.transpose() * dp;
  if (want_prop) {
    g.prop = prop;
    for (Eigen::Index i = 0; i < g.prop.outerSize(); ++i)
      for (SparseMatrix::InnerIterator it(g.prop, i); it; ++it)
        it.valueRef() = grad_logits.row(i).dot(pass.q.row(it.col())) + dpre.row(i).dot(pass.p.row(it.col()));
  }
  return g;
}

std::vector<Matrix*> params_of(InnerClassifier& c) {
  return {&c.first.weight, &c.first.bias, &c.second.weight, &c.second.bias};
}
std::vector<const Matrix*> params_of(const InnerClassifier& c) {
  return {&c.first.weight, &c.first.bias, &c.second.weight, &c.second.bias};
}

}  // namespace

void StructureLearnConfig::validate() const {
  if (heads < 1) throw InvalidArgument("structure learning needs at least one similarity head");
  if (initial_k < 1) throw InvalidArgument("initial_k must be >= 1");
  if (!(edge_cutoff > 0.0 && edge_cutoff <= 1.0)) throw InvalidArgument("edge cutoff must be in (0, 1]");
  if (!(mix >= 0.0 && mix <= 1.0)) throw InvalidArgument("mix weight must be in [0, 1]");
  if (hidden < 1) throw InvalidArgument("inner hidden width must be >= 1");
  if (!(inner_lr > 0.0) || !(head_lr > 0.0)) throw InvalidArgument("learning rates must be positive");
  regularizer.validate();
}

HeadObjective head_objective(const InnerClassifier& classifier, const SparseMatrix& x, const Matrix& embeddings,
                             const SimilarityHeads& heads, const SparseMatrix& seed, std::span<const int> labels,
                             const StructureLearnConfig& config) {
  const Matrix s = multihead_similarity(embeddings, heads);
  const SparseMatrix a = candidate_adjacency(seed, s, config);
  Vector degree;
  const SparseMatrix prop = propagation(a, degree);
  const Pass pass = classifier_forward(classifier, prop, x);
  const LossValue ce = labelled_cross_entropy(pass.logits, labels);
  const Grads g = classifier_backward(classifier, prop, x, pass, ce.grad, true);

  // P = D^-1 (A + I): dL/dA_ij = (dL/dP_ij - sum_k dL/dP_ik P_ik) / d_i
  Vector row_term = Vector::Zero(a.rows());
  for (Eigen::Index i = 0; i < g.prop.outerSize(); ++i) {
    SparseMatrix::InnerIterator pit(prop, i);
    for (SparseMatrix::InnerIterator it(g.prop, i); it; ++it, ++pit) row_term(i) += it.value() * pit.value();
  }
  const SparseMatrix reg_grad = graph_regularizer_grad(a, x, config.regularizer);
  Matrix grad_s = Matrix::Zero(s.rows(), s.cols());
  for (Eigen::Index i = 0; i < a.outerSize(); ++i) {
    SparseMatrix::InnerIterator rit(reg_grad, i);
    for (SparseMatrix::InnerIterator it(a, i); it; ++it, ++rit) {
      const Eigen::Index j = it.col();
      if (j == i || s(i, j) < config.edge_cutoff) continue;
      const double d_a = (g.prop.coeff(i, j) - row_term(i)) / degree(i) + rit.value();
      grad_s(i, j) = (1.0 - config.mix) * d_a;
    }
  }
  return {ce.value + graph_regularizer(a, x, config.regularizer), multihead_similarity_backward(embeddings, heads, grad_s)};
}

namespace {

// Runs a kNN construction over the rows with non-zero norm only: an all-zero row (an empty
// bag of words) has no direction, so it gets no edges instead of failing the cosine.
template <class Build>
std::vector<Edge> over_nonzero_rows(const Matrix& x, std::size_t k, Build build) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    if (x.row(i).squaredNorm() > 0.0) keep.push_back(i);
  if (keep.size() == static_cast<std::size_t>(x.rows())) return build(x);
  if (keep.size() < k + 1) {
    throw InvalidArgument("kNN needs more than k=" + std::to_string(k) + " non-zero feature rows, got " +
                          std::to_string(keep.size()));
  }
  Matrix sub(static_cast<Eigen::Index>(keep.size()), x.cols());
  for (std::size_t i = 0; i < keep.size(); ++i) sub.row(static_cast<Eigen::Index>(i)) = x.row(keep[i]);
  std::vector<Edge> edges = build(sub);
  for (Edge& e : edges) {
    e.u = static_cast<NodeId>(keep[e.u]);
    e.v = static_cast<NodeId>(keep[e.v]);
  }
  return edges;
}

}  // namespace

LearnedStructure learn_structure(const Matrix& x, std::span<const int> labels, int num_classes,
                                 const StructureLearnConfig& config, std::uint64_t seed) {
  config.validate();
  const auto n = static_cast<std::size_t>(x.rows());
  if (labels.size() != n) throw InvalidArgument("learn_structure: one label per feature row required");
  if (num_classes < 1) throw InvalidArgument("learn_structure: num_classes must be >= 1");
  for (int c : labels)
    if (c != kUnknownLabel && (c < 0 || c >= num_classes)) throw InvalidArgument("learn_structure: label out of range");
  if (n < config.initial_k + 1) {
    throw InvalidArgument("learn_structure: need more than initial_k=" + std::to_string(config.initial_k) + " nodes, got " +
                          std::to_string(n));
  }
  bool degenerate = true;
  for (Eigen::Index i = 1; i < x.rows() && degenerate; ++i) degenerate = x.row(i) == x.row(0);
  if (degenerate) throw InvalidArgument("learn_structure: all feature rows are identical");

  LearnedStructure out;
  Rng rng(derive_seed(seed, {0x57c}));
  out.feature_heads = SimilarityHeads::random(config.heads, static_cast<std::size_t>(x.cols()), rng);
  out.seed_edges = over_nonzero_rows(x, config.initial_k, [&](const Matrix& rows) {
    return symmetrize(top_k_neighbors(multihead_similarity(rows, out.feature_heads), config.initial_k));
  });
  const SparseMatrix seed_adj = edges_to_sparse(n, out.seed_edges);
  const SparseMatrix xs = x.sparseView();

  InnerClassifier classifier{
      make_layer(LayerKind::dense, static_cast<std::size_t>(x.cols()), config.hidden, 1, false, rng),
      make_layer(LayerKind::dense, config.hidden, static_cast<std::size_t>(num_classes), 1, false, rng)};
  Adam classifier_opt(AdamConfig{.lr = config.inner_lr});
  auto fit = [&](const SparseMatrix& a) {
    Vector degree;
    const SparseMatrix prop = propagation(a, degree);
    for (std::size_t epoch = 0; epoch < config.inner_epochs; ++epoch) {
      const Pass pass = classifier_forward(classifier, prop, xs);
      const LossValue ce = labelled_cross_entropy(pass.logits, labels);
      const Grads g = classifier_backward(classifier, prop, xs, pass, ce.grad, false);
      classifier_opt.step(params_of(classifier), params_of(g.params));
    }
    return classifier_forward(classifier, prop, xs);
  };
  auto record = [&](std::size_t iteration, const SparseMatrix& a, const Pass& pass, double changed, std::size_t learned) {
    StructureIteration rec;
    rec.iteration = iteration;
    rec.task_loss = labelled_cross_entropy(pass.logits, labels).value;
    rec.regularization = graph_regularizer(a, xs, config.regularizer);
    rec.joint_loss = rec.task_loss + rec.regularization;
    rec.changed_fraction = changed;
    rec.learned_edges = learned;
    out.trace.push_back(rec);
  };

  Pass pass = fit(seed_adj);
  record(0, seed_adj, pass, 1.0, 0);

  // Thresholded edge set of the previous iteration, starting from the seed.
  std::vector<bool> previous(n * n, false);
  for (const Edge& e : out.seed_edges) previous[e.u * n + e.v] = previous[e.v * n + e.u] = true;

  out.embedding_heads = SimilarityHeads::random(config.heads, static_cast<std::size_t>(num_classes), rng);
  Adam head_opt(AdamConfig{.lr = config.head_lr});
  for (std::size_t iteration = 1; iteration <= config.max_iterations; ++iteration) {
    // Kept so that an iteration which raises the joint loss can be undone.
    const InnerClassifier kept_classifier = classifier;
    const SimilarityHeads kept_heads = out.embedding_heads;
    const Pass kept_pass = pass;

    const Matrix embeddings = pass.logits;
    for (std::size_t step = 0; step < config.head_steps; ++step) {
      const HeadObjective obj = head_objective(classifier, xs, embeddings, out.embedding_heads, seed_adj, labels, config);
      head_opt.step({&out.embedding_heads.weights}, {&obj.grad});
    }
    const Matrix s = multihead_similarity(embeddings, out.embedding_heads);
    const SparseMatrix a = candidate_adjacency(seed_adj, s, config);
    pass = fit(a);

    std::vector<bool> current(n * n, false);
    std::size_t flipped = 0, learned = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const bool edge = s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) >= config.edge_cutoff;
        flipped += edge != previous[i * n + j];
        learned += edge && i < j;
        current[i * n + j] = edge;
      }
    }
    const double changed = static_cast<double>(flipped) / static_cast<double>(n * (n - 1));
    const double before = out.trace.back().joint_loss;
    record(iteration, a, pass, changed, learned);
    if (iteration > 1 && out.trace.back().joint_loss > before + kLossTolerance) {
      out.trace.pop_back();
      classifier = kept_classifier;
      out.embedding_heads = kept_heads;
      pass = kept_pass;
      break;
    }
    previous.swap(current);
    if (changed < config.stop_fraction) break;
  }

  const Matrix s = multihead_similarity(pass.logits, out.embedding_heads);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) >= config.edge_cutoff) out.edges.push_back({i, j});
  return out;
}

std::vector<Edge> knn_baseline(const Matrix& x, std::size_t k) {
  return over_nonzero_rows(x, k, [&](const Matrix& rows) { return knn_graph(rows, k); });
}

std::vector<Edge> random_baseline(std::size_t n, std::size_t num_edges, std::uint64_t seed) {
  if (n < 2 && num_edges > 0) throw InvalidArgument("random_baseline: need at least two nodes");
  if (num_edges > n * (n - 1) / 2) throw InvalidArgument("random_baseline: more edges than node pairs");
  Rng rng(derive_seed(seed, {0x7a4d}));
  std::uniform_int_distribution<NodeId> pick(0, n - 1);
  std::set<Edge> edges;
  while (edges.size() < num_edges) {
    const NodeId u = pick(rng), v = pick(rng);
    if (u != v) edges.insert({std::min(u, v), std::max(u, v)});
  }
  return {edges.begin(), edges.end()};
}

}  // namespace gnnsteal
