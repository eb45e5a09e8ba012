#include <doctest.h>

#include <algorithm>
#include <set>

#include "gnnsteal/dataset.hpp"
#include "gnnsteal/errors.hpp"
#include "gnnsteal/graph.hpp"
#include "support.hpp"

using namespace gnnsteal;

namespace {

Graph path_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return Graph(Matrix::Ones(static_cast<Eigen::Index>(n), 2), edges, std::vector<int>(n, 0), 1);
}

// Fixed point of l rounds of neighbour expansion on the dense adjacency.
std::set<NodeId> bfs_oracle(const Graph& g, NodeId center, std::size_t hops) {
  const Matrix a = g.dense_adjacency();
  std::set<NodeId> reached{center};
  for (std::size_t round = 0; round < hops; ++round) {
    std::set<NodeId> next = reached;
    for (NodeId v : reached)
      for (Eigen::Index u = 0; u < a.cols(); ++u)
        if (a(static_cast<Eigen::Index>(v), u) != 0.0) next.insert(static_cast<NodeId>(u));
    reached = std::move(next);
  }
  return reached;
}

}  // namespace

TEST_CASE("graph canonicalises edges and builds a symmetric adjacency") {
  Graph g(Matrix::Zero(4, 1), {{2, 0}, {0, 2}, {1, 3}}, {0, 1, 0, 1}, 2);
  CHECK(g.num_edges() == 2);
  const Matrix a = g.dense_adjacency();
  CHECK(a.isApprox(a.transpose()));
  CHECK(a.diagonal().isZero());
  CHECK(g.degree(0) == 1);
  CHECK(g.neighbors(2)[0] == 0);
  CHECK_THROWS_AS(g.neighbors(4), InvalidArgument);
}

TEST_CASE("graph rejects bad construction input") {
  CHECK_THROWS_AS(Graph(Matrix::Zero(2, 1), {{0, 2}}, {0, 0}, 1), InvalidArgument);
  CHECK_THROWS_AS(Graph(Matrix::Zero(2, 1), {}, {0}, 1), InvalidArgument);
  CHECK_THROWS_AS(Graph(Matrix::Zero(2, 1), {}, {0, 3}, 2), InvalidArgument);
}

TEST_CASE("adjacency of random graphs is symmetric with empty diagonal") {
  for (unsigned seed = 0; seed < 20; ++seed) {
    const Graph g = testing::random_test_graph(25, 3, 0.2, 3, seed);
    const Matrix a = g.dense_adjacency();
    CHECK(a == a.transpose());
    CHECK(a.diagonal().isZero());
    CHECK(a.sum() == doctest::Approx(2.0 * static_cast<double>(g.num_edges())));
  }
}

TEST_CASE("split sizes and determinism") {
  const Graph g = testing::random_test_graph(100, 2, 0.05, 2, 1);
  const SplitSpec spec{0.2, 0.3, 0.5, 7};
  const InductiveSplit a = split_inductive(g, spec);
  CHECK(a.train.num_nodes() == 20);
  CHECK(a.query.num_nodes() == 30);
  CHECK(a.test.num_nodes() == 50);
  const InductiveSplit b = split_inductive(g, spec);
  CHECK(a.train.origin() == b.train.origin());
  CHECK(a.query.origin() == b.query.origin());
  CHECK(a.test.origin() == b.test.origin());
}

TEST_CASE("split drops cross-partition edges") {
  const Graph g = testing::random_test_graph(60, 2, 0.3, 2, 3);
  const InductiveSplit s = split_inductive(g, SplitSpec{0.2, 0.3, 0.5, 11});
  for (const Graph* part : {&s.train, &s.query, &s.test}) {
    std::set<std::pair<NodeId, NodeId>> expected;
    std::set<NodeId> members(part->origin().begin(), part->origin().end());
    for (const Edge& e : g.edges())
      if (members.count(e.u) && members.count(e.v)) expected.insert({e.u, e.v});
    std::set<std::pair<NodeId, NodeId>> got;
    for (const Edge& e : part->edges()) {
      NodeId a = part->origin()[e.u], b = part->origin()[e.v];
      got.insert({std::min(a, b), std::max(a, b)});
    }
    CHECK(got == expected);
  }
}

TEST_CASE("split partitions are disjoint and exhaustive over 100 seeds") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const SplitAssignment parts = assign_split(137, SplitSpec{0.2, 0.3, 0.5, seed});
    std::vector<NodeId> all;
    all.insert(all.end(), parts.train.begin(), parts.train.end());
    all.insert(all.end(), parts.query.begin(), parts.query.end());
    all.insert(all.end(), parts.test.begin(), parts.test.end());
    REQUIRE(all.size() == 137);
    std::sort(all.begin(), all.end());
    CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
    CHECK(all.back() == 136);
  }
}

TEST_CASE("split rejects invalid fractions and empty parts") {
  CHECK_THROWS_AS(assign_split(100, SplitSpec{0.2, 0.3, 0.4, 0}), InvalidArgument);
  CHECK_THROWS_AS(assign_split(100, SplitSpec{0.0, 0.5, 0.5, 0}), InvalidArgument);
  CHECK_THROWS_AS(assign_split(2, SplitSpec{0.2, 0.3, 0.5, 0}), InvalidArgument);
}

TEST_CASE("khop subgraph on a path") {
  const Graph g = path_graph(3);
  const Subgraph one = khop_subgraph(g, 0, 1);
  CHECK(one.nodes == std::vector<NodeId>{0, 1});
  CHECK(one.graph.num_edges() == 1);
  const Subgraph two = khop_subgraph(g, 0, 2);
  CHECK(two.nodes == std::vector<NodeId>{0, 1, 2});
  CHECK(two.graph.num_edges() == 2);
  const Subgraph zero = khop_subgraph(g, 1, 0);
  CHECK(zero.nodes == std::vector<NodeId>{1});
  CHECK(zero.graph.num_edges() == 0);
  CHECK_THROWS_AS(khop_subgraph(g, 3, 1), InvalidArgument);
}

TEST_CASE("khop subgraph matches brute-force expansion") {
  for (unsigned seed = 0; seed < 30; ++seed) {
    const std::size_t n = 10 + seed % 41;
    const Graph g = testing::random_test_graph(n, 2, 3.0 / static_cast<double>(n), 2, seed);
    for (std::size_t hops = 0; hops <= 3; ++hops) {
      const NodeId center = seed % n;
      const Subgraph sub = khop_subgraph(g, center, hops);
      const std::set<NodeId> got(sub.nodes.begin(), sub.nodes.end());
      CHECK(got == bfs_oracle(g, center, hops));
      CHECK(sub.nodes.front() == center);
      for (const Edge& e : sub.graph.edges()) {
        const auto nb = g.neighbors(sub.nodes[e.u]);
        CHECK(std::binary_search(nb.begin(), nb.end(), sub.nodes[e.v]));
      }
      std::size_t expected_edges = 0;
      for (const Edge& e : g.edges()) expected_edges += got.count(e.u) && got.count(e.v);
      CHECK(sub.graph.num_edges() == expected_edges);
    }
  }
}

TEST_CASE("sample_neighbors") {
  std::vector<Edge> star;
  for (NodeId i = 1; i <= 100; ++i) star.push_back({0, i});
  const Graph g(Matrix::Zero(101, 1), star, std::vector<int>(101, 0), 1);

  CHECK(sample_neighbors(g, 1, 10, 3) == std::vector<NodeId>{0});
  const auto s = sample_neighbors(g, 0, 10, 3);
  CHECK(s.size() == 10);
  CHECK(std::set<NodeId>(s.begin(), s.end()).size() == 10);
  CHECK(s == sample_neighbors(g, 0, 10, 3));
  CHECK(s != sample_neighbors(g, 0, 10, 4));
  CHECK_THROWS_AS(sample_neighbors(g, 0, 0, 3), InvalidArgument);
  CHECK_THROWS_AS(sample_neighbors(g, 101, 5, 3), InvalidArgument);

  // Every neighbour should be picked roughly fanout/degree of the time.
  std::vector<int> hits(101, 0);
  for (std::uint64_t seed = 0; seed < 2000; ++seed)
    for (NodeId v : sample_neighbors(g, 0, 10, seed)) ++hits[v];
  for (NodeId v = 1; v <= 100; ++v) CHECK(hits[v] == doctest::Approx(200).epsilon(0.35));
}

TEST_CASE("knn graph hand example and tie-break") {
  Matrix x(3, 2);
  x << 1, 0, 0.9, 0.1, 0, 1;
  const auto edges = knn_graph(x, 1);
  CHECK(edges == std::vector<Edge>{{0, 1}, {1, 2}});

  const Matrix same = Matrix::Ones(4, 3);
  const auto lists = top_k_neighbors(same * same.transpose(), 1);
  CHECK(lists[0] == std::vector<NodeId>{1});
  CHECK(lists[3] == std::vector<NodeId>{0});

  CHECK_THROWS_AS(knn_graph(x, 3), InvalidArgument);
  Matrix zero = x;
  zero.row(1).setZero();
  CHECK_THROWS_AS(knn_graph(zero, 1), InvalidArgument);
}

TEST_CASE("knn graph matches brute-force all-pairs cosine") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 5 + static_cast<std::size_t>(rng() % 96);
    const std::size_t k = 1 + static_cast<std::size_t>(rng() % std::min<std::size_t>(n - 1, 8));
    const Graph g = testing::random_test_graph(n, 4, 0.0, 1, static_cast<unsigned>(rng()));
    const Matrix& x = g.features();
    const auto edges = knn_graph(x, k);
    std::set<std::pair<NodeId, NodeId>> edge_set;
    for (const Edge& e : edges) edge_set.insert({e.u, e.v});
    std::vector<std::size_t> degree(n, 0);
    for (const Edge& e : edges) ++degree[e.u], ++degree[e.v];

    for (std::size_t i = 0; i < n; ++i) {
      CHECK(degree[i] >= k);
      std::vector<std::pair<double, NodeId>> scored;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double cos = x.row(static_cast<Eigen::Index>(i)).dot(x.row(static_cast<Eigen::Index>(j))) /
                           (x.row(static_cast<Eigen::Index>(i)).norm() * x.row(static_cast<Eigen::Index>(j)).norm());
        scored.push_back({-cos, j});
      }
      std::sort(scored.begin(), scored.end());
      for (std::size_t r = 0; r < k; ++r) {
        const NodeId j = scored[r].second;
        CHECK(edge_set.count({std::min(i, j), std::max(i, j)}) == 1);
      }
    }
  }
}

TEST_CASE("synthetic SBM") {
  const Graph g = synth_graph(60, 3, 0.2, 0.01, 8, 42);
  std::size_t intra = 0, inter = 0, intra_pairs = 0, inter_pairs = 0;
  for (NodeId a = 0; a < 60; ++a)
    for (NodeId b = a + 1; b < 60; ++b) (g.labels()[a] == g.labels()[b] ? intra_pairs : inter_pairs)++;
  for (const Edge& e : g.edges()) (g.labels()[e.u] == g.labels()[e.v] ? intra : inter)++;
  CHECK(static_cast<double>(intra) / static_cast<double>(intra_pairs) >
        static_cast<double>(inter) / static_cast<double>(inter_pairs));

  CHECK(synth_graph(30, 3, 0.0, 0.0, 3, 1).num_edges() == 0);
  const Graph again = synth_graph(60, 3, 0.2, 0.01, 8, 42);
  CHECK(again.features() == g.features());
  CHECK(std::equal(again.edges().begin(), again.edges().end(), g.edges().begin(), g.edges().end()));
  CHECK(again.labels() == g.labels());
  CHECK_THROWS_AS(synth_graph(2, 3, 0.1, 0.0, 3, 1), InvalidArgument);
  CHECK_THROWS_AS(synth_graph(20, 2, 0.1, 0.2, 3, 1), InvalidArgument);
}

TEST_CASE("random graph mean degree") {
  const auto edges = random_graph(1000, 24.0, 9);
  CHECK(edges.size() == 12000);
  for (const Edge& e : edges) CHECK(e.u < e.v);
  CHECK(random_graph(10, 100.0, 1).size() == 45);
}

TEST_CASE("dataset round trip") {
  testing::TempDir dir;
  const Graph g = synth_graph(40, 2, 0.3, 0.05, 5, 3);
  save_dataset(g, dir.path());
  const Graph back = load_dataset(dir.path(), "synthetic");
  CHECK(back.features() == g.features());
  CHECK(back.labels() == g.labels());
  CHECK(std::equal(back.edges().begin(), back.edges().end(), g.edges().begin(), g.edges().end()));
  CHECK(back.num_classes() == 2);
}

TEST_CASE("dataset loading errors are distinct and name the file and line") {
  testing::TempDir dir;
  auto write_valid = [&] {
    testing::write_file(dir / "meta.json", R"({"n": 3, "d": 2, "num_classes": 2, "name": "tiny"})");
    testing::write_file(dir / "features.csv", "0,1,0\n1,0,1\n2,1,1\n");
    testing::write_file(dir / "labels.csv", "0,0\n1,1\n2,1\n");
    testing::write_file(dir / "edges.csv", "");
  };
  write_valid();
  const Graph empty_edges = load_dataset(dir.path());
  CHECK(empty_edges.num_nodes() == 3);
  CHECK(empty_edges.num_edges() == 0);
  CHECK(empty_edges.name() == "tiny");

  auto expect = [&](LoadErrorKind kind, const std::string& file, std::size_t line) {
    try {
      load_dataset(dir.path());
      FAIL("expected a load error");
    } catch (const LoadError& e) {
      CHECK(e.kind() == kind);
      CHECK(std::filesystem::path(e.file()).filename() == file);
      CHECK(e.line() == line);
    }
  };
  testing::write_file(dir / "edges.csv", "0,1\n1,5\n");
  expect(LoadErrorKind::node_out_of_range, "edges.csv", 2);
  write_valid();
  testing::write_file(dir / "labels.csv", "0,0\n1,2\n");
  expect(LoadErrorKind::label_out_of_range, "labels.csv", 2);
  write_valid();
  testing::write_file(dir / "features.csv", "0,1,0\n1,abc,1\n2,1,1\n");
  expect(LoadErrorKind::bad_number, "features.csv", 2);
  write_valid();
  std::filesystem::remove(dir / "labels.csv");
  expect(LoadErrorKind::missing_file, "labels.csv", 0);
}

TEST_CASE("dataset resolution by name") {
  testing::TempDir root;
  save_dataset(synth_graph(10, 2, 0.5, 0.1, 2, 1), root / "CiteSeer");
  CHECK(resolve_dataset("citeseer", root.path()) == root / "CiteSeer");
  CHECK(resolve_dataset((root / "CiteSeer").string(), "/nonexistent") == root / "CiteSeer");
  CHECK_THROWS_AS(resolve_dataset("pubmed", root.path()), LoadError);
}
