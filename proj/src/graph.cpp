#include "gnnsteal/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <unordered_map>

#include "gnnsteal/errors.hpp"
#include "gnnsteal/random.hpp"

namespace gnnsteal {

Graph::Graph(Matrix features, std::vector<Edge> edges, std::vector<int> labels, int num_classes,
             std::string name)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      num_classes_(num_classes),
      name_(std::move(name)) {
  const std::size_t n = num_nodes();
  if (labels_.size() != n) {
    throw InvalidArgument("graph: " + std::to_string(labels_.size()) + " labels for " +
                          std::to_string(n) + " nodes");
  }
  if (num_classes_ < 0) throw InvalidArgument("graph: negative class count");
  for (int label : labels_) {
    if (label != kUnknownLabel && (label < 0 || label >= num_classes_)) {
      throw InvalidArgument("graph: label " + std::to_string(label) + " outside 0.." +
                            std::to_string(num_classes_ - 1));
    }
  }
  for (Edge& e : edges) {
    if (e.u >= n || e.v >= n) {
      throw InvalidArgument("graph: edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                            ") references a node outside 0.." + std::to_string(n));
    }
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);

  origin_.resize(n);
  std::iota(origin_.begin(), origin_.end(), NodeId{0});

  std::vector<std::size_t> degree(n, 0);
  for (const Edge& e : edges_) {
    ++degree[e.u];
    if (e.u != e.v) ++degree[e.v];
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
  adjacency_.resize(offsets_[n]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const Edge& e : edges_) {
    adjacency_[fill[e.u]++] = e.v;
    if (e.u != e.v) adjacency_[fill[e.v]++] = e.u;
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
              adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]));
  }
}

std::span<const NodeId> Graph::neighbors(NodeId v) const {
  if (v >= num_nodes()) {
    throw InvalidArgument("node id " + std::to_string(v) + " out of range (n=" +
                          std::to_string(num_nodes()) + ")");
  }
  return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
}

Matrix Graph::dense_adjacency() const {
  const auto n = static_cast<Eigen::Index>(num_nodes());
  Matrix a = Matrix::Zero(n, n);
  for (const Edge& e : edges_) {
    a(static_cast<Eigen::Index>(e.u), static_cast<Eigen::Index>(e.v)) = 1.0;
    a(static_cast<Eigen::Index>(e.v), static_cast<Eigen::Index>(e.u)) = 1.0;
  }
  return a;
}

Graph Graph::induced(std::span<const NodeId> nodes) const {
  const std::size_t n = num_nodes();
  std::vector<std::ptrdiff_t> local(n, -1);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] >= n) throw InvalidArgument("induced: node id " + std::to_string(nodes[i]) + " out of range");
    if (local[nodes[i]] >= 0) throw InvalidArgument("induced: duplicate node id " + std::to_string(nodes[i]));
    local[nodes[i]] = static_cast<std::ptrdiff_t>(i);
  }
  Matrix features(static_cast<Eigen::Index>(nodes.size()), features_.cols());
  std::vector<int> labels(nodes.size());
  std::vector<NodeId> origin(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    features.row(static_cast<Eigen::Index>(i)) = features_.row(static_cast<Eigen::Index>(nodes[i]));
    labels[i] = labels_[nodes[i]];
    origin[i] = origin_[nodes[i]];
  }
  std::vector<Edge> edges;
  for (const Edge& e : edges_) {
    if (local[e.u] >= 0 && local[e.v] >= 0) {
      edges.push_back({static_cast<NodeId>(local[e.u]), static_cast<NodeId>(local[e.v])});
    }
  }
  Graph g(std::move(features), std::move(edges), std::move(labels), num_classes_, name_);
  g.origin_ = std::move(origin);
  return g;
}

Graph Graph::with_edges(std::vector<Edge> edges) const {
  Graph g(features_, std::move(edges), labels_, num_classes_, name_);
  g.origin_ = origin_;
  return g;
}

Graph Graph::with_labels(std::vector<int> labels) const {
  Graph g(features_, edges_, std::move(labels), num_classes_, name_);
  g.origin_ = origin_;
  return g;
}

void SplitSpec::validate() const {
  if (!(target_train_fraction > 0.0) || !(query_fraction > 0.0) || !(test_fraction > 0.0)) {
    throw InvalidArgument("split fractions must be positive");
  }
  const double sum = target_train_fraction + query_fraction + test_fraction;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw InvalidArgument("split fractions sum to " + std::to_string(sum) + ", expected 1");
  }
}

SplitAssignment assign_split(std::size_t num_nodes, const SplitSpec& spec) {
  spec.validate();
  std::vector<NodeId> order(num_nodes);
  std::iota(order.begin(), order.end(), NodeId{0});
  Rng rng(derive_seed(spec.seed, {0x5117}));
  std::shuffle(order.begin(), order.end(), rng);

  const auto n_train = static_cast<std::size_t>(std::llround(spec.target_train_fraction * static_cast<double>(num_nodes)));
  const auto n_query = static_cast<std::size_t>(std::llround(spec.query_fraction * static_cast<double>(num_nodes)));
  if (n_train == 0 || n_query == 0 || n_train + n_query >= num_nodes) {
    throw InvalidArgument("split of " + std::to_string(num_nodes) + " nodes leaves an empty part");
  }
  SplitAssignment out;
  out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.query.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                   order.begin() + static_cast<std::ptrdiff_t>(n_train + n_query));
  out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_query), order.end());
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.query.begin(), out.query.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

InductiveSplit split_inductive(const Graph& graph, const SplitSpec& spec) {
  const SplitAssignment parts = assign_split(graph.num_nodes(), spec);
  return {graph.induced(parts.train), graph.induced(parts.query), graph.induced(parts.test)};
}

Subgraph khop_subgraph(const Graph& graph, NodeId center, std::size_t hops) {
  if (center >= graph.num_nodes()) {
    throw InvalidArgument("khop_subgraph: center " + std::to_string(center) + " out of range");
  }
  std::unordered_map<NodeId, std::size_t> depth{{center, 0}};
  std::vector<NodeId> order{center};
  std::deque<NodeId> frontier{center};
  while (!frontier.empty()) {
    const NodeId v = frontier.front();
    frontier.pop_front();
    const std::size_t dv = depth[v];
    if (dv == hops) continue;
    for (NodeId u : graph.neighbors(v)) {
      if (depth.emplace(u, dv + 1).second) {
        order.push_back(u);
        frontier.push_back(u);
      }
    }
  }
  Subgraph sub;
  sub.center = center;
  sub.hops = hops;
  sub.graph = graph.induced(order);
  sub.nodes = std::move(order);
  return sub;
}

std::vector<NodeId> sample_neighbors(const Graph& graph, NodeId node, std::size_t fanout,
                                     std::uint64_t seed) {
  if (fanout < 1) throw InvalidArgument("sample_neighbors: fanout must be >= 1");
  const auto all = graph.neighbors(node);
  if (all.size() <= fanout) return {all.begin(), all.end()};
  std::vector<NodeId> pool(all.begin(), all.end());
  Rng rng(derive_seed(seed, {node}));
  for (std::size_t i = 0; i < fanout; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(fanout);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<Edge> random_graph(std::size_t n, double mean_degree, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("random_graph: need at least two nodes");
  if (mean_degree < 0.0) throw InvalidArgument("random_graph: negative mean degree");
  const std::size_t pairs = n * (n - 1) / 2;
  auto target = static_cast<std::size_t>(std::llround(mean_degree * static_cast<double>(n) / 2.0));
  target = std::min(target, pairs);
  Rng rng(derive_seed(seed, {0xe7}));
  std::uniform_int_distribution<NodeId> pick(0, n - 1);
  std::vector<Edge> edges;
  edges.reserve(target);
  // Rejection sampling is fine while the graph stays sparse; fall back to enumeration otherwise.
  if (target * 2 < pairs) {
    std::unordered_map<std::uint64_t, bool> used;
    used.reserve(target * 2);
    while (edges.size() < target) {
      NodeId a = pick(rng);
      NodeId b = pick(rng);
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      if (used.emplace(static_cast<std::uint64_t>(a) * n + b, true).second) edges.push_back({a, b});
    }
  } else {
    for (NodeId a = 0; a < n; ++a)
      for (NodeId b = a + 1; b < n; ++b) edges.push_back({a, b});
    std::shuffle(edges.begin(), edges.end(), rng);
    edges.resize(target);
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

}  // namespace gnnsteal
