#include <doctest.h>

#include <numeric>

#include "gnnsteal/checkpoint.hpp"
#include "gnnsteal/errors.hpp"
#include "gnnsteal/loss.hpp"
#include "gnnsteal/mlp.hpp"
#include "gnnsteal/model.hpp"
#include "gnnsteal/train.hpp"
#include "support.hpp"

using namespace gnnsteal;

namespace {

std::vector<NodeId> all_nodes(const Graph& g) {
  std::vector<NodeId> v(g.num_nodes());
  std::iota(v.begin(), v.end(), NodeId{0});
  return v;
}

}  // namespace

TEST_CASE("target architectures") {
  const ModelConfig gin = target_config(LayerKind::gin, 50, 6, 128);
  CHECK(gin.widths == std::vector<std::size_t>{50, 256, 128, 6});
  CHECK(gin.fanouts == std::vector<std::size_t>{10, 10, 10});
  CHECK(gin.graph_layers() == 3);
  const ModelConfig sage = target_config(LayerKind::sage, 50, 6, 64);
  CHECK(sage.fanouts == std::vector<std::size_t>{25, 10});
  CHECK(sage.dropout == 0.5);
  CHECK(sage.embedding_size() == 64);
  const TrainedModel gat = build_model(target_config(LayerKind::gat, 50, 6, 64), 1);
  CHECK(gat.layers.size() == 3);
  CHECK(gat.layers[0].concat_heads);
  CHECK(gat.layers[1].concat_heads);
  CHECK_FALSE(gat.layers[2].concat_heads);
  CHECK(gat.layers[2].out_width == 6);
  const ModelConfig enc = encoder_config(LayerKind::sage, 50, 2);
  CHECK(enc.fanouts == std::vector<std::size_t>{10, 50});
  CHECK(enc.widths == std::vector<std::size_t>{50, 256, 2});

  ModelConfig bad = gin;
  bad.fanouts.pop_back();
  CHECK_THROWS_AS(build_model(bad, 0), InvalidArgument);
  bad = target_config(LayerKind::gat, 50, 6, 64);
  bad.widths[1] = 30;
  CHECK_THROWS_AS(build_model(bad, 0), InvalidArgument);
}

TEST_CASE("build_model is deterministic and Glorot-bounded") {
  const ModelConfig cfg = target_config(LayerKind::gin, 20, 4, 64);
  const TrainedModel a = build_model(cfg, 9);
  const TrainedModel b = build_model(cfg, 9);
  CHECK(parameter_hash(a) == parameter_hash(b));
  CHECK(parameter_hash(a) != parameter_hash(build_model(cfg, 10)));
  const double limit = std::sqrt(6.0 / (20.0 + 256.0));
  CHECK(a.layers[0].weight.cwiseAbs().maxCoeff() <= limit);
  CHECK(a.layers[0].weight.cwiseAbs().maxCoeff() > 0.9 * limit);
  CHECK(a.layers[0].bias.isZero());
}

TEST_CASE("forward heads, determinism and duplicates") {
  const Graph g = synth_graph(80, 4, 0.1, 0.02, 12, 3);
  const TrainedModel model = build_model(target_config(LayerKind::sage, 12, 4, 256), 1);
  const auto nodes = all_nodes(g);
  const Matrix h = forward(model, g, nodes, Head::embedding);
  CHECK(h.rows() == 80);
  CHECK(h.cols() == 256);
  CHECK(h.minCoeff() >= 0.0);
  CHECK(forward(model, g, nodes, Head::embedding) == h);
  const Matrix p = forward(model, g, nodes, Head::posterior, ForwardOptions{.batch_size = 7});
  CHECK(p.isApprox(forward(model, g, nodes, Head::posterior)));
  const std::vector<NodeId> dup{5, 2, 5};
  const Matrix d = forward(model, g, dup, Head::posterior);
  CHECK(d.row(0) == d.row(2));
  CHECK_THROWS_AS(forward(model, g, std::vector<NodeId>{80}, Head::posterior), InvalidArgument);
}

TEST_CASE("training reaches high accuracy on a separable SBM") {
  const Graph g = synth_graph(300, 3, 0.05, 0.005, 16, 21);
  for (LayerKind kind : {LayerKind::sage, LayerKind::gin, LayerKind::gat}) {
    CAPTURE(to_string(kind));
    const TrainedModel init = build_model(target_config(kind, 16, 3, 64), 4);
    const TrainedModel trained = train_model(init, g, TrainConfig{.epochs = 50, .batch_size = 64, .seed = 2});
    CHECK(node_accuracy(trained, g, all_nodes(g)) >= 0.95);
    CHECK(trained.meta.epochs_run == 50);
    CHECK(trained.meta.trace.size() == 50);
    for (std::size_t i = 1; i < trained.meta.trace.size(); ++i)
      CHECK(trained.meta.trace[i].best_val_accuracy >= trained.meta.trace[i - 1].best_val_accuracy);
    CHECK(trained.meta.best_val_accuracy == trained.meta.trace[trained.meta.best_epoch].val_accuracy);
  }
}

TEST_CASE("training is reproducible and epochs=0 is a no-op") {
  const Graph g = synth_graph(120, 2, 0.08, 0.01, 8, 5);
  const TrainedModel init = build_model(target_config(LayerKind::sage, 8, 2, 64), 4);
  const TrainConfig cfg{.epochs = 5, .batch_size = 32, .seed = 7};
  const TrainedModel a = train_model(init, g, cfg);
  const TrainedModel b = train_model(init, g, cfg);
  CHECK(parameter_hash(a) == parameter_hash(b));
  CHECK(parameter_hash(train_model(init, g, TrainConfig{.epochs = 0})) == parameter_hash(init));

  CHECK_THROWS_AS(train_model(init, g, TrainConfig{.batch_size = 0}), InvalidArgument);
  const Graph unlabelled = g.with_labels(std::vector<int>(120, kUnknownLabel));
  CHECK_THROWS_AS(train_model(init, unlabelled, cfg), InvalidArgument);
}

TEST_CASE("mlp learns separable blobs") {
  Rng rng(1);
  std::normal_distribution<double> normal(0.0, 0.3);
  Matrix x(200, 2);
  std::vector<int> y(200);
  for (Eigen::Index i = 0; i < 200; ++i) {
    y[static_cast<std::size_t>(i)] = static_cast<int>(i % 2);
    x(i, 0) = (i % 2 ? 2.0 : -2.0) + normal(rng);
    x(i, 1) = normal(rng);
  }
  const TrainedModel mlp = train_mlp(build_model(mlp_config(2, 100, 2), 3), x, y, 2,
                                     TrainConfig{.epochs = 100, .batch_size = 64, .seed = 1});
  const std::vector<int> pred = argmax_rows(mlp_forward(mlp, x, Head::output));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < y.size(); ++i) correct += pred[i] == y[i];
  CHECK(static_cast<double>(correct) / 200.0 >= 0.99);
}

TEST_CASE("checkpoint round-trips bit-exactly") {
  const Graph g = synth_graph(60, 3, 0.1, 0.01, 6, 2);
  const TrainedModel model =
      train_model(build_model(target_config(LayerKind::gat, 6, 3, 16), 1), g, TrainConfig{.epochs = 3, .seed = 3});
  testing::TempDir dir;
  Checkpoint cp{model, build_model(mlp_config(16, 10, 3), 2), nlohmann::json{{"scenario", "I.1"}}};
  save_checkpoint(cp, dir / "model.json");
  const Checkpoint back = load_checkpoint(dir / "model.json");
  CHECK(parameter_hash(back.model) == parameter_hash(model));
  REQUIRE(back.classifier);
  CHECK(parameter_hash(*back.classifier) == parameter_hash(*cp.classifier));
  CHECK(back.provenance["scenario"] == "I.1");
  CHECK(back.model.meta.trace.size() == 3);
  CHECK(back.model.meta.best_val_accuracy == model.meta.best_val_accuracy);
  const auto nodes = all_nodes(g);
  CHECK(forward(back.model, g, nodes, Head::posterior) == forward(model, g, nodes, Head::posterior));
  save_checkpoint(back, dir / "again.json");
  CHECK(testing::read_file(dir / "again.json") == testing::read_file(dir / "model.json"));

  testing::write_file(dir / "bad.json", "{\"format\": \"other\"}");
  CHECK_THROWS_AS(load_checkpoint(dir / "bad.json"), Error);
}
