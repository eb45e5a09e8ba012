#include <doctest.h>

#include <numeric>

#include "gnnsteal/attack.hpp"
#include "gnnsteal/metrics.hpp"
#include "gnnsteal/response_loss.hpp"
#include "gnnsteal/server.hpp"
#include "support.hpp"

using namespace gnnsteal;

namespace {

std::vector<NodeId> all_nodes(const Graph& g) {
  std::vector<NodeId> v(g.num_nodes());
  std::iota(v.begin(), v.end(), NodeId{0});
  return v;
}

struct World {
  InductiveSplit split;
  TrainedModel target;
};

const World& world() {
  static const World w = [] {
    const Graph g = synth_graph(900, 3, 0.03, 0.003, 16, 21);
    World out;
    out.split = split_inductive(g, SplitSpec{.target_train_fraction = 0.3, .query_fraction = 0.3, .test_fraction = 0.4, .seed = 2});
    out.target = train_model(build_model(target_config(LayerKind::sage, 16, 3, 32), 3), out.split.train,
                             TrainConfig{.epochs = 30, .batch_size = 64, .seed = 3});
    return out;
  }();
  return w;
}

AttackConfig fast_config(Scenario scenario) {
  AttackConfig cfg;
  cfg.scenario = scenario;
  cfg.encoder_hidden = 32;
  cfg.classifier_hidden = 32;
  cfg.encoder_train = TrainConfig{.epochs = 30, .batch_size = 64, .lr = 0.01};
  cfg.classifier_train = TrainConfig{.epochs = 60, .batch_size = 64, .lr = 0.01};
  cfg.structure.initial_k = 8;
  cfg.structure.hidden = 32;
  cfg.structure.inner_epochs = 30;
  cfg.structure.max_iterations = 4;
  cfg.seed = 5;
  return cfg;
}

Oracle make_oracle(ResponseType type, std::optional<std::size_t> budget = std::nullopt) {
  OracleConfig cfg;
  cfg.response_type = type;
  cfg.budget = budget;
  cfg.tsne.iterations = 300;
  return Oracle(world().target, cfg);
}

// Records every request so tests can see what the attack sent.
class SpyOracle final : public QueryOracle {
 public:
  explicit SpyOracle(QueryOracle& inner) : inner_(inner) {}
  QueryResponse respond(const Graph& g, std::span<const NodeId> nodes) override {
    graphs.push_back(g);
    return inner_.respond(g, nodes);
  }
  OracleMeta meta() const override { return inner_.meta(); }
  std::vector<Graph> graphs;

 private:
  QueryOracle& inner_;
};

}  // namespace

TEST_CASE("response loss hand cases") {
  const Matrix r = Matrix::Random(4, 3);
  CHECK(response_loss(r, r).value == 0.0);
  CHECK(response_loss(r, r).grad == Matrix::Zero(4, 3));
  CHECK(response_loss(Matrix{{1.0, 0.0}, {0.0, 1.0}}, Matrix::Zero(2, 2)).value == 1.0);
  CHECK(response_loss(Matrix{{3.0, 4.0}}, Matrix::Zero(1, 2)).value == 5.0);
  CHECK_THROWS_AS(response_loss(Matrix::Zero(2, 2), Matrix::Zero(2, 3)), InvalidArgument);
  CHECK_THROWS_AS(response_loss(Matrix::Zero(0, 2), Matrix::Zero(0, 2)), InvalidArgument);
}

TEST_CASE("response loss gradient") {
  Rng rng(1);
  std::normal_distribution<double> normal;
  Matrix h(6, 4), r(6, 4);
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    h.data()[i] = normal(rng);
    r.data()[i] = normal(rng);
  }
  r.row(2) = h.row(2);                                      // exactly zero residual
  r.row(4) = h.row(4) + RowVector::Constant(4, 1e-14);      // below the guard
  const LossValue l = response_loss(h, r);
  CHECK(l.grad.row(2).norm() == 0.0);
  CHECK(l.grad.row(4).norm() == 0.0);
  const double step = 1e-6;
  for (Eigen::Index i : {0, 1, 3, 5}) {
    for (Eigen::Index j = 0; j < 4; ++j) {
      Matrix plus = h, minus = h;
      plus(i, j) += step;
      minus(i, j) -= step;
      const double numeric = (response_loss(plus, r).value - response_loss(minus, r).value) / (2 * step);
      CHECK(l.grad(i, j) == doctest::Approx(numeric).epsilon(1e-4));
    }
  }
  // Near-zero but above the guard: the gradient is the unit residual over n.
  Matrix tiny = r;
  tiny.row(0) = r.row(0) + RowVector::Constant(4, 1e-9);
  CHECK(response_loss(tiny, r).grad.row(0).norm() == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("scenario taxonomy") {
  CHECK(scenario_response(Scenario::I1) == ResponseType::embedding);
  CHECK(scenario_response(Scenario::I2) == ResponseType::prediction);
  CHECK(scenario_response(Scenario::I3) == ResponseType::projection);
  CHECK(scenario_response(Scenario::II1) == ResponseType::embedding);
  CHECK(scenario_response(Scenario::II2) == ResponseType::prediction);
  CHECK(scenario_response(Scenario::II3) == ResponseType::projection);
  for (Scenario s : kAllScenarios) {
    CHECK(parse_scenario(to_string(s)) == s);
    CHECK(make_scenario(learns_structure(s), scenario_response(s)) == s);
  }
  CHECK(parse_scenario("ii2") == Scenario::II2);
  CHECK_FALSE(learns_structure(Scenario::I3));
  CHECK_THROWS_AS(parse_scenario("III.1"), InvalidArgument);
}

TEST_CASE("encoder output width follows the response, not its type") {
  const Graph& q = world().split.query;
  const auto nodes = all_nodes(q);
  for (ResponseType type : {ResponseType::embedding, ResponseType::prediction, ResponseType::projection}) {
    Oracle oracle = make_oracle(type);
    const QueryResponse r = oracle.respond(q, nodes);
    AttackConfig cfg = fast_config(make_scenario(false, type));
    cfg.encoder_train.epochs = 2;
    const TrainedModel enc = train_encoder(q, r, cfg);
    CHECK(enc.config.output_size() == r.dim());
    CHECK(surrogate_features(enc, q, nodes).cols() == static_cast<Eigen::Index>(r.dim()));
  }
  Oracle proj = make_oracle(ResponseType::projection);
  CHECK(proj.respond(q, nodes).dim() == 2);
}

TEST_CASE("encoder edge cases") {
  const Graph& q = world().split.query;
  const auto nodes = all_nodes(q);
  Oracle oracle = make_oracle(ResponseType::embedding);
  const QueryResponse r = oracle.respond(q, nodes);
  AttackConfig cfg = fast_config(Scenario::I1);

  cfg.encoder_train.epochs = 0;
  const TrainedModel untouched = train_encoder(q, r, cfg);
  const TrainedModel fresh = build_model(encoder_config(cfg.surrogate, q.feature_dim(), r.dim(), cfg.encoder_hidden),
                                         derive_seed(cfg.seed, {0xe1}));
  CHECK(parameter_hash(untouched) == parameter_hash(fresh));

  QueryResponse short_r = r;
  short_r.order.pop_back();
  CHECK_THROWS_AS(train_encoder(q, short_r, cfg), InvalidArgument);

  // Two isolated nodes with identical features get identical outputs.
  Matrix x = q.features().topRows(10);
  x.row(9) = x.row(4);
  const Graph iso(x, {{0, 1}, {2, 3}}, std::vector<int>(10, 0), 3);
  QueryResponse rr{ResponseType::embedding, Matrix::Random(10, 5), all_nodes(iso)};
  rr.matrix.row(9) = rr.matrix.row(4);
  cfg.encoder_train.epochs = 3;
  const Matrix out = surrogate_features(train_encoder(iso, rr, cfg), iso, all_nodes(iso));
  CHECK(out.row(9) == out.row(4));
}

TEST_CASE("classifier training leaves the encoder untouched") {
  const Graph& q = world().split.query;
  Oracle oracle = make_oracle(ResponseType::prediction);
  AttackConfig cfg = fast_config(Scenario::I2);
  const TrainedModel enc = train_encoder(q, oracle.respond(q, all_nodes(q)), cfg);
  const std::uint64_t before = parameter_hash(enc);
  const TrainedModel clf = train_classifier(enc, q, cfg);
  CHECK(parameter_hash(enc) == before);
  CHECK(clf.config.output_size() == 3);
  CHECK(clf.config.widths.front() == enc.config.output_size());
  CHECK(clf.config.widths[1] == cfg.classifier_hidden);
}

TEST_CASE("classifier reaches separable training labels") {
  // Response = scaled one-hot labels, so the encoder's outputs become separable.
  const Graph q = synth_graph(200, 2, 0.05, 0.005, 8, 4);
  Matrix onehot = Matrix::Zero(200, 2);
  for (std::size_t i = 0; i < 200; ++i) onehot(static_cast<Eigen::Index>(i), q.labels()[i]) = 5.0;
  AttackConfig cfg = fast_config(Scenario::I1);
  cfg.encoder_train.epochs = 60;
  cfg.classifier_train.val_fraction = 0.05;
  const TrainedModel enc = train_encoder(q, {ResponseType::embedding, onehot, all_nodes(q)}, cfg);
  const SurrogateModel s{enc, train_classifier(enc, q, cfg), {}};
  CHECK(accuracy(surrogate_posteriors(s, q, all_nodes(q)), q.labels()) >= 0.99);
}

TEST_CASE("self-distillation on a synthetic graph") {
  const World& w = world();
  const auto test_nodes = all_nodes(w.split.test);
  const Matrix target_scores = forward(w.target, w.split.test, test_nodes, Head::output);
  const double target_acc = accuracy(target_scores, w.split.test.labels());
  for (Scenario s : {Scenario::I1, Scenario::I2}) {
    Oracle oracle = make_oracle(scenario_response(s));
    const AttackResult res = run_attack(fast_config(s), oracle, w.split.query);
    const Matrix surrogate_scores = surrogate_posteriors(res.surrogate, w.split.test, test_nodes);
    const double fid = fidelity(surrogate_scores, target_scores);
    MESSAGE(std::string(to_string(s)) << " target acc " << target_acc << " surrogate acc "
                         << accuracy(surrogate_scores, w.split.test.labels()) << " fidelity " << fid);
    CHECK(fid >= target_acc - 0.05);
  }
}

TEST_CASE("query ledger matches the oracle's budget accounting") {
  const Graph& q = world().split.query;
  Oracle oracle = make_oracle(ResponseType::embedding, 10'000);
  AttackConfig cfg = fast_config(Scenario::I1);
  cfg.encoder_train.epochs = 1;
  cfg.classifier_train.epochs = 1;
  cfg.query_nodes = 100;
  const AttackResult res = run_attack(cfg, oracle, q);
  CHECK(res.ledger.requests == 1);
  CHECK(res.ledger.distinct_nodes == 100);
  CHECK(*oracle.meta().budget_remaining == 10'000 - res.ledger.distinct_nodes);
  CHECK(res.sampled.size() == 100);
  CHECK(std::is_sorted(res.sampled.begin(), res.sampled.end()));
  CHECK(res.surrogate.provenance["query_nodes"] == 100);

  cfg.query_nodes = q.num_nodes() + 1;
  CHECK_THROWS_AS(run_attack(cfg, oracle, q), InvalidArgument);
}

TEST_CASE("budget refusals and scenario mismatches") {
  const Graph& q = world().split.query;
  AttackConfig cfg = fast_config(Scenario::I1);
  Oracle zero = make_oracle(ResponseType::embedding, 0);
  try {
    run_attack(cfg, zero, q);
    FAIL("expected AttackFailed");
  } catch (const AttackFailed& e) {
    CHECK(e.budget_refused());
    CHECK(e.ledger().distinct_nodes == 0);
  }
  CHECK(*zero.meta().budget_remaining == 0);

  Oracle emb = make_oracle(ResponseType::embedding);
  const Graph bare = q.with_edges({});
  CHECK_THROWS_AS(run_attack(cfg, emb, bare), InvalidArgument);
  cfg.scenario = Scenario::I2;
  CHECK_THROWS_AS(run_attack(cfg, emb, q), AttackFailed);
}

TEST_CASE("type II learns the structure before the single oracle request") {
  const Graph q = world().split.query.with_edges({});
  Oracle inner = make_oracle(ResponseType::embedding);
  SpyOracle spy(inner);
  AttackConfig cfg = fast_config(Scenario::II1);
  cfg.encoder_train.epochs = 5;
  cfg.classifier_train.epochs = 5;
  const AttackResult res = run_attack(cfg, spy, q);
  REQUIRE(res.structure);
  REQUIRE(spy.graphs.size() == 1);
  CHECK(std::vector<Edge>(spy.graphs[0].edges().begin(), spy.graphs[0].edges().end()) == res.structure->edges);
  CHECK(res.query_graph.num_edges() == res.structure->edges.size());
}

TEST_CASE("attacks are reproducible and transport independent") {
  const Graph& q = world().split.query;
  AttackConfig cfg = fast_config(Scenario::I2);
  cfg.encoder_train.epochs = 4;
  cfg.classifier_train.epochs = 4;
  Oracle local = make_oracle(ResponseType::prediction);
  const AttackResult a = run_attack(cfg, local, q);
  Oracle local2 = make_oracle(ResponseType::prediction);
  const AttackResult b = run_attack(cfg, local2, q);
  CHECK(parameter_hash(a.surrogate.encoder) == parameter_hash(b.surrogate.encoder));
  CHECK(parameter_hash(a.surrogate.classifier) == parameter_hash(b.surrogate.classifier));

  Oracle served = make_oracle(ResponseType::prediction);
  OracleServer server(served);
  server.start();
  RemoteOracle remote("127.0.0.1", server.port());
  const AttackResult c = run_attack(cfg, remote, q);
  CHECK(parameter_hash(c.surrogate.encoder) == parameter_hash(a.surrogate.encoder));
  CHECK(parameter_hash(c.surrogate.classifier) == parameter_hash(a.surrogate.classifier));
}
