#include "gnnsteal/attack.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <numeric>

#include "gnnsteal/mlp.hpp"
#include "gnnsteal/response_loss.hpp"

namespace gnnsteal {

const char* to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::I1: return "I.1";
    case Scenario::I2: return "I.2";
    case Scenario::I3: return "I.3";
    case Scenario::II1: return "II.1";
    case Scenario::II2: return "II.2";
    case Scenario::II3: return "II.3";
  }
  return "?";
}

Scenario parse_scenario(std::string_view text) {
  std::string key;
  for (char c : text)
    if (c != '.' && c != ' ') key.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  for (Scenario s : kAllScenarios) {
    std::string name;
    for (const char* p = to_string(s); *p; ++p)
      if (*p != '.') name.push_back(*p);
    if (key == name) return s;
  }
  throw InvalidArgument("unknown scenario '" + std::string(text) + "' (expected I.1, I.2, I.3, II.1, II.2 or II.3)");
}

ResponseType scenario_response(Scenario scenario) {
  switch (scenario) {
    case Scenario::I1:
    case Scenario::II1: return ResponseType::embedding;
    case Scenario::I2:
    case Scenario::II2: return ResponseType::prediction;
    case Scenario::I3:
    case Scenario::II3: return ResponseType::projection;
  }
  return ResponseType::embedding;
}

bool learns_structure(Scenario scenario) {
  return scenario == Scenario::II1 || scenario == Scenario::II2 || scenario == Scenario::II3;
}

Scenario make_scenario(bool learn_structure, ResponseType response) {
  for (Scenario s : kAllScenarios)
    if (learns_structure(s) == learn_structure && scenario_response(s) == response) return s;
  return Scenario::I1;
}

void AttackConfig::validate() const {
  if (surrogate == LayerKind::dense) throw InvalidArgument("surrogate kind must be sage, gat or gin");
  if (encoder_hidden < 1 || classifier_hidden < 1) throw InvalidArgument("hidden widths must be >= 1");
  encoder_train.validate();
  classifier_train.validate();
  if (learns_structure(scenario)) structure.validate();
  if (query_nodes && *query_nodes == 0) throw InvalidArgument("query node count must be >= 1");
}

TrainedModel train_encoder(const Graph& query_graph, const QueryResponse& response, const AttackConfig& config) {
  const std::size_t m = response.dim();
  if (m < 1) throw InvalidArgument("train_encoder: response has no columns");
  if (static_cast<std::size_t>(response.matrix.rows()) != response.order.size()) {
    throw InvalidArgument("train_encoder: response has " + std::to_string(response.matrix.rows()) + " rows for " +
                          std::to_string(response.order.size()) + " nodes");
  }
  constexpr std::size_t kNoRow = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> row_of(query_graph.num_nodes(), kNoRow);
  std::vector<NodeId> nodes;
  for (std::size_t i = 0; i < response.order.size(); ++i) {
    const NodeId v = response.order[i];
    if (v >= query_graph.num_nodes()) throw InvalidArgument("train_encoder: response row for unknown node " + std::to_string(v));
    if (row_of[v] == kNoRow) nodes.push_back(v);
    row_of[v] = i;
  }

  TrainedModel encoder = build_model(
      encoder_config(config.surrogate, query_graph.feature_dim(), m, config.encoder_hidden), derive_seed(config.seed, {0xe1}));
  TrainConfig tc = config.encoder_train;
  tc.seed = derive_seed(config.seed, {0xe2});
  tc.validate();
  const BatchLoss loss = [&](const Matrix& output, std::span<const NodeId> batch, Matrix& d_output) {
    Matrix target(static_cast<Eigen::Index>(batch.size()), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < batch.size(); ++i)
      target.row(static_cast<Eigen::Index>(i)) = response.matrix.row(static_cast<Eigen::Index>(row_of[batch[i]]));
    LossValue l = response_loss(output, target);
    d_output = std::move(l.grad);
    return l.value;
  };
  Adam optimizer(AdamConfig{.lr = tc.lr});
  for (std::size_t epoch = 0; epoch < tc.epochs; ++epoch) {
    const double value = train_epoch(encoder, optimizer, query_graph, nodes, tc, epoch, loss);
    encoder.meta.trace.push_back({epoch, value, 0.0, 0.0});
  }
  encoder.meta.epochs_run = tc.epochs;
  encoder.meta.best_epoch = tc.epochs == 0 ? 0 : tc.epochs - 1;
  encoder.meta.seed = tc.seed;
  return encoder;
}

Matrix surrogate_features(const TrainedModel& encoder, const Graph& graph, std::span<const NodeId> nodes) {
  return forward(encoder, graph, nodes, Head::output);
}

TrainedModel train_classifier(const TrainedModel& encoder, const Graph& query_graph, const AttackConfig& config) {
  const int classes = query_graph.num_classes();
  if (classes < 1) throw InvalidArgument("train_classifier: query graph has no classes");
  std::vector<NodeId> nodes(query_graph.num_nodes());
  std::iota(nodes.begin(), nodes.end(), NodeId{0});
  const Matrix features = surrogate_features(encoder, query_graph, nodes);
  TrainedModel classifier = build_model(
      mlp_config(encoder.config.output_size(), config.classifier_hidden, static_cast<std::size_t>(classes)),
      derive_seed(config.seed, {0xc1}));
  TrainConfig tc = config.classifier_train;
  tc.seed = derive_seed(config.seed, {0xc2});
  return train_mlp(std::move(classifier), features, query_graph.labels(), classes, tc);
}

Matrix surrogate_posteriors(const SurrogateModel& surrogate, const Graph& graph, std::span<const NodeId> nodes) {
  return mlp_forward(surrogate.classifier, surrogate_features(surrogate.encoder, graph, nodes), Head::posterior);
}

AttackResult run_attack(const AttackConfig& config, QueryOracle& oracle, const Graph& query_graph) {
  config.validate();
  const std::size_t n = query_graph.num_nodes();
  if (n == 0) throw InvalidArgument("run_attack: empty query graph");
  if (!learns_structure(config.scenario) && query_graph.num_edges() == 0) {
    throw InvalidArgument(std::string("scenario ") + to_string(config.scenario) +
                          " needs the query graph's edges; use a Type II scenario for features only");
  }

  AttackResult result;
  result.sampled.resize(n);
  std::iota(result.sampled.begin(), result.sampled.end(), NodeId{0});
  if (config.query_nodes) {
    if (*config.query_nodes > n) {
      throw InvalidArgument("requested " + std::to_string(*config.query_nodes) + " query nodes, only " +
                            std::to_string(n) + " available");
    }
    Rng rng(derive_seed(config.seed, {0x5e1}));
    std::shuffle(result.sampled.begin(), result.sampled.end(), rng);
    result.sampled.resize(*config.query_nodes);
    std::sort(result.sampled.begin(), result.sampled.end());
  }
  Graph graph = config.query_nodes ? query_graph.induced(result.sampled) : query_graph;

  if (learns_structure(config.scenario)) {
    // Local only: the oracle is not touched until the graph is built.
    result.structure = learn_structure(graph.features(), graph.labels(), graph.num_classes(), config.structure,
                                       derive_seed(config.seed, {0x57}));
    graph = graph.with_edges(result.structure->edges);
  }

  std::vector<NodeId> nodes(graph.num_nodes());
  std::iota(nodes.begin(), nodes.end(), NodeId{0});
  QueryResponse response;
  try {
    response = oracle.respond(graph, nodes);
  } catch (const BudgetExceeded& e) {
    throw AttackFailed(std::string("oracle refused the query: ") + e.what(), result.ledger, true);
  } catch (const RemoteError& e) {
    throw AttackFailed(std::string("oracle error: ") + e.what(), result.ledger, false);
  }
  result.ledger.requests = 1;
  result.ledger.distinct_nodes = distinct_query_nodes(graph, nodes);
  if (response.type != scenario_response(config.scenario)) {
    throw AttackFailed(std::string("oracle answers ") + to_string(response.type) + " but scenario " +
                           to_string(config.scenario) + " expects " + to_string(scenario_response(config.scenario)),
                       result.ledger, false);
  }

  result.surrogate.encoder = train_encoder(graph, response, config);
  result.surrogate.classifier = train_classifier(result.surrogate.encoder, graph, config);
  const OracleMeta meta = oracle.meta();
  result.surrogate.provenance = {
      {"scenario", to_string(config.scenario)},
      {"surrogate", to_string(config.surrogate)},
      {"response_type", to_string(response.type)},
      {"response_dim", response.dim()},
      {"query_nodes", result.ledger.distinct_nodes},
      {"requests", result.ledger.requests},
      {"learned_edges", result.structure ? nlohmann::json(result.structure->edges.size()) : nlohmann::json(nullptr)},
      {"oracle_classes", meta.num_classes},
      {"seed", config.seed},
  };
  result.query_graph = std::move(graph);
  return result;
}

}  // namespace gnnsteal
