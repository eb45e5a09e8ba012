#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "gnnsteal/harness.hpp"
#include "gnnsteal/report.hpp"
#include "support.hpp"

using namespace gnnsteal;

namespace {

ExperimentSettings tiny_settings() {
  ExperimentSettings s;
  s.split = SplitSpec{.target_train_fraction = 0.3, .query_fraction = 0.3, .test_fraction = 0.4};
  s.target_train = TrainConfig{.epochs = 4, .batch_size = 64, .lr = 0.01};
  s.embedding_size = 8;
  s.attack.encoder_hidden = 8;
  s.attack.classifier_hidden = 8;
  s.attack.encoder_train = TrainConfig{.epochs = 4, .batch_size = 64, .lr = 0.01};
  s.attack.classifier_train = TrainConfig{.epochs = 4, .batch_size = 64, .lr = 0.01};
  s.oracle.tsne.perplexity = 5;
  s.oracle.tsne.iterations = 100;
  s.seeds = {0, 1};
  return s;
}

std::vector<DatasetInput> tiny_datasets() { return {{"tiny", synth_graph(150, 3, 0.06, 0.005, 8, 9)}}; }

// Independent two-pass mean / population std.
std::pair<double, double> two_pass(const std::vector<double>& v) {
  long double sum = 0;
  for (double x : v) sum += x;
  const long double mean = sum / static_cast<long double>(v.size());
  long double sq = 0;
  for (double x : v) sq += (x - mean) * (x - mean);
  return {static_cast<double>(mean), static_cast<double>(std::sqrt(sq / static_cast<long double>(v.size())))};
}

}  // namespace

TEST_CASE("accuracy and fidelity hand cases") {
  const std::vector<int> pred{0, 1, 0, 0}, labels{0, 1, 1, 0};
  CHECK(accuracy(pred, labels) == doctest::Approx(0.75));
  CHECK(accuracy(labels, labels) == 1.0);
  // target [0,1,1,0], surrogate [0,1,0,0]
  CHECK(fidelity(pred, labels) == doctest::Approx(0.75));
  const std::vector<int> c(6, 2);
  CHECK(fidelity(c, c) == 1.0);

  // Ties break to the lowest class index on both sides.
  Matrix a(2, 3), b(2, 3);
  a << 0.5, 0.5, 0.0, 0.1, 0.2, 0.2;
  b << 0.9, 0.0, 0.1, 0.0, 0.7, 0.3;
  CHECK(fidelity(a, b) == 1.0);
  const std::vector<int> y{0, 1};
  CHECK(accuracy(a, y) == 1.0);

  const std::vector<int> none;
  CHECK_THROWS_AS(accuracy(none, none), InvalidArgument);
  CHECK_THROWS_AS(fidelity(none, none), InvalidArgument);
  CHECK_THROWS_AS(accuracy(pred, std::vector<int>{0, 1}), InvalidArgument);
}

TEST_CASE("constant predictor on a balanced set") {
  std::vector<int> labels;
  for (int i = 0; i < 400; ++i) labels.push_back(i % 4);
  const std::vector<int> constant(400, 1);
  CHECK(accuracy(constant, labels) == doctest::Approx(0.25));
}

TEST_CASE("fidelity of a model with itself is 1") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    Matrix m(37, 5);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
    if (trial % 2) m.col(2) = m.col(1);  // force ties
    CHECK(fidelity(m, m) == 1.0);
  }
}

TEST_CASE("metrics agree with a brute-force recount") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> cls(0, 3);
  std::uniform_int_distribution<int> size(1, 200);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = size(rng);
    Matrix s(n, 4), t(n, 4);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      s.data()[i] = std::round(normal(rng) * 2) / 2;  // coarse values make ties common
      t.data()[i] = std::round(normal(rng) * 2) / 2;
    }
    for (int& l : labels) l = cls(rng);
    int correct = 0, agree = 0;
    for (int i = 0; i < n; ++i) {
      int as = 0, at = 0;
      for (int j = 1; j < 4; ++j) {
        if (s(i, j) > s(i, as)) as = j;
        if (t(i, j) > t(i, at)) at = j;
      }
      correct += as == labels[static_cast<std::size_t>(i)];
      agree += as == at;
    }
    CHECK(accuracy(s, labels) == doctest::Approx(static_cast<double>(correct) / n).epsilon(1e-15));
    CHECK(fidelity(s, t) == doctest::Approx(static_cast<double>(agree) / n).epsilon(1e-15));
  }
}

TEST_CASE("pearson") {
  const std::vector<double> xs{1, 2, 3}, ys{1, 2, 4};
  CHECK(pearson(xs, ys) == doctest::Approx(0.982).epsilon(0.001 / 0.982));
  CHECK(pearson(xs, xs) == doctest::Approx(1.0));
  const std::vector<double> neg{-1, -2, -3};
  CHECK(pearson(xs, neg) == doctest::Approx(-1.0));
  const std::vector<double> flat{2, 2, 2};
  CHECK_THROWS_AS(pearson(xs, flat), InvalidArgument);
  CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{1}), InvalidArgument);
  CHECK_THROWS_AS(pearson(xs, std::vector<double>{1, 2}), InvalidArgument);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(10), b(10);
    for (auto& v : a) v = normal(rng);
    for (auto& v : b) v = normal(rng);
    const double r = pearson(a, b);
    CHECK(r >= -1.0);
    CHECK(r <= 1.0);
  }
}

TEST_CASE("summary matches an independent two-pass computation") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(1 + trial % 9);
    for (double& x : v) x = 0.7 + 0.1 * u(rng);
    const Summary s = summarize(v);
    const auto [mean, sd] = two_pass(v);
    CHECK(s.count == v.size());
    CHECK(std::abs(s.mean - mean) <= 1e-12);
    CHECK(std::abs(s.std - sd) <= 1e-12);
    CHECK(s.std >= 0.0);
  }
  CHECK(summarize(std::vector<double>{}).count == 0);
}

TEST_CASE("report aggregation and pearson bookkeeping") {
  std::vector<RunRecord> records;
  const char* kinds[] = {"gin", "gat", "sage"};
  for (int t = 0; t < 3; ++t)
    for (int s = 0; s < 3; ++s)
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        RunRecord r;
        r.dataset = "d";
        r.scenario = "I.1";
        r.response = "embedding";
        r.target_kind = kinds[t];
        r.surrogate_kind = kinds[s];
        r.seed = seed;
        r.target_acc = 0.9;
        r.surrogate_acc = 0.6 + 0.1 * s + 0.01 * static_cast<double>(seed);
        r.fidelity = r.surrogate_acc + 0.02;
        records.push_back(r);
      }
  records[3].error = "boom";
  const MetricsReport report = build_report(records);
  CHECK(report.partial());
  REQUIRE(report.aggregates.size() == 9);
  CHECK(report.aggregates[0].accuracy.count == 4);
  CHECK(report.aggregates[0].failures == 1);
  CHECK(report.aggregates[1].accuracy.count == 5);
  for (const PearsonRecord& p : report.pearson) {
    CHECK(p.cells == 3);
    CHECK(p.r == doctest::Approx(1.0));
  }
  CHECK(report.aggregates[4].pearson_r == doctest::Approx(1.0));
}

TEST_CASE("emit_report") {
  testing::TempDir dir;
  SUBCASE("empty report gives header-only CSVs") {
    const auto files = emit_report(MetricsReport{}, dir.path());
    CHECK(files.size() == 6);
    for (const auto& f : files) {
      const std::string text = testing::read_file(f);
      CHECK(std::count(text.begin(), text.end(), '\n') == 1);
    }
    CHECK(testing::read_file(dir / "results.csv") ==
          "dataset,scenario,response,target_kind,surrogate_kind,seed,target_acc,surrogate_acc,fidelity,queries_used,"
          "wall_seconds\n");
    CHECK(testing::read_file(dir / "aggregates.csv").find("acc_mean,acc_std,fid_mean,fid_std,pearson_r") !=
          std::string::npos);
  }
  SUBCASE("quoting, round trip and idempotence") {
    RunRecord a;
    a.dataset = "odd, \"name\"";
    a.scenario = "I.2";
    a.response = "prediction";
    a.target_kind = "gat";
    a.surrogate_kind = "sage";
    a.seed = 3;
    a.target_acc = 0.875;
    a.surrogate_acc = 0.8125;
    a.fidelity = 0.5;
    a.queries_used = 40;
    RunRecord b = a;
    b.axis = "sigma";
    b.value = 7;
    RunRecord c = a;
    c.error = "line one\nline two";
    const MetricsReport report = build_report({a, b, c});
    const auto first = emit_report(report, dir.path());
    std::vector<std::string> bytes;
    for (const auto& f : first) bytes.push_back(testing::read_file(f));
    const auto second = emit_report(report, dir.path());
    REQUIRE(first == second);
    for (std::size_t i = 0; i < first.size(); ++i) CHECK(testing::read_file(second[i]) == bytes[i]);
    CHECK(std::any_of(first.begin(), first.end(), [](const auto& p) { return p.extension() == ".svg"; }));

    const MetricsReport back = load_report(dir.path());
    REQUIRE(back.records.size() == 3);
    CHECK(back.records[0].dataset == a.dataset);
    CHECK(back.records[0].fidelity == 0.5);
    CHECK(std::isnan(back.records[0].wall_seconds));
    CHECK(back.records[1].axis == "sigma");
    CHECK(back.records[1].value == 7.0);
    CHECK(back.records[2].error == c.error);
  }
  SUBCASE("unwritable path") {
    testing::write_file(dir / "file", "x");
    CHECK_THROWS_AS(emit_report(MetricsReport{}, dir / "file" / "sub"), Error);
  }
}

TEST_CASE("parse_csv") {
  const auto rows = parse_csv("a,b\n\"x,1\",\"say \"\"hi\"\"\"\r\n,\n");
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][0] == "x,1");
  CHECK(rows[1][1] == "say \"hi\"");
  CHECK(rows[2] == std::vector<std::string>{"", ""});
  CHECK_THROWS_AS(parse_csv("\"open"), ConfigError);
  CHECK(csv_field("plain") == "plain");
}

TEST_CASE("grid over one dataset: cardinality, determinism, sweeps") {
  testing::TempDir dir;
  Experiment experiment(tiny_datasets(), tiny_settings());
  const MetricsReport report = run_grid(experiment, GridSpec{});
  REQUIRE(report.records.size() == 27 * 2);
  for (const RunRecord& r : report.records) {
    INFO(r.error);
    CHECK(r.ok());
    CHECK(r.surrogate_acc >= 0.0);
    CHECK(r.surrogate_acc <= 1.0);
    CHECK(r.fidelity >= 0.0);
    CHECK(r.fidelity <= 1.0);
    CHECK(r.queries_used > 0);
  }
  CHECK(report.aggregates.size() == 27);
  for (const AggregateRecord& a : report.aggregates) CHECK(a.accuracy.count == 2);
  CHECK_FALSE(report.partial());

  emit_report(report, dir / "a");
  const std::string rows = testing::read_file(dir / "a" / "results.csv");
  CHECK(std::count(rows.begin(), rows.end(), '\n') == 27 * 2 + 1);

  Experiment again(tiny_datasets(), tiny_settings());
  emit_report(run_grid(again, GridSpec{}), dir / "b");
  CHECK(testing::read_file(dir / "b" / "results.csv") == rows);

  const CellSpec cell{LayerKind::sage, LayerKind::sage, ResponseType::embedding, false};
  const auto zero = defense_sweep(experiment, "tiny", cell, {0.0});
  for (const RunRecord& z : zero) {
    const auto base = std::find_if(report.records.begin(), report.records.end(), [&](const RunRecord& r) {
      return r.target_kind == "sage" && r.surrogate_kind == "sage" && r.response == "embedding" && r.seed == z.seed;
    });
    REQUIRE(base != report.records.end());
    CHECK(z.surrogate_acc == base->surrogate_acc);
    CHECK(z.fidelity == base->fidelity);
    CHECK(z.axis == "sigma");
  }

  const auto budget = budget_sweep(experiment, "tiny", cell, {0.1, 0.3});
  REQUIRE(budget.size() == 4);
  CHECK(budget[0].queries_used <= 15);
  CHECK(budget[2].queries_used > budget[0].queries_used);
  CHECK_THROWS_AS(budget_sweep(experiment, "tiny", cell, {0.0}), InvalidArgument);
  CHECK_THROWS_AS(budget_sweep(experiment, "tiny", cell, {0.5}), InvalidArgument);
  CHECK_THROWS_AS(budget_sweep(experiment, "tiny", cell, {}), InvalidArgument);
  CHECK_THROWS_AS(defense_sweep(experiment, "tiny", cell, {-1.0}), InvalidArgument);

  const auto hidden = hyper_sweep(experiment, "tiny", cell, HyperAxis::hidden, {4, 16});
  CHECK(hidden.size() == 4);
  CHECK(hidden[0].axis == "hidden");
  CHECK_THROWS_AS(hyper_sweep(experiment, "tiny", cell, HyperAxis::batch, {0.5}), InvalidArgument);
  CHECK_THROWS_AS(parse_hyper_axis("dropout"), InvalidArgument);
  CHECK(parse_hyper_axis("epochs") == HyperAxis::epochs);

  const MetricsReport curves = build_report(budget);
  emit_report(curves, dir / "c");
  CHECK(std::filesystem::exists(dir / "c" / "curve_budget_tiny_I_1_embedding.svg"));
}

TEST_CASE("failed cells are recorded without aborting") {
  ExperimentSettings s = tiny_settings();
  s.oracle.tsne.perplexity = 100;  // above the query node count: projection cells fail
  s.seeds = {0};
  Experiment experiment(tiny_datasets(), s);
  GridSpec grid;
  grid.targets = {LayerKind::sage};
  grid.surrogates = {LayerKind::sage};
  const MetricsReport report = run_grid(experiment, grid);
  REQUIRE(report.records.size() == 3);
  CHECK(report.partial());
  std::size_t failed = 0;
  for (const RunRecord& r : report.records) failed += !r.ok();
  CHECK(failed == 1);
  CHECK_THROWS_AS(experiment.run("missing", CellSpec{}, 0), InvalidArgument);
}

TEST_CASE("structure baselines run as Type II cells") {
  ExperimentSettings s = tiny_settings();
  s.seeds = {0};
  s.attack.structure.initial_k = 5;
  s.attack.structure.hidden = 8;
  s.attack.structure.inner_epochs = 5;
  s.attack.structure.max_iterations = 2;
  Experiment experiment(tiny_datasets(), s);
  const CellSpec cell{LayerKind::sage, LayerKind::sage, ResponseType::embedding, true};
  const auto records = structure_comparison(experiment, "tiny", cell);
  REQUIRE(records.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    INFO(records[i].error);
    CHECK(records[i].ok());
    CHECK(records[i].scenario == "II.1");
    CHECK(records[i].value == static_cast<double>(i));
  }
  const RunRecord plain = experiment.run("tiny", cell, 0);
  CHECK(plain.fidelity == records[0].fidelity);
  CHECK_THROWS_AS(experiment.run("tiny", CellSpec{}, 0, QueryStructure::knn), InvalidArgument);
}
