#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gnnsteal/errors.hpp"
#include "gnnsteal/oracle.hpp"
#include "gnnsteal/structure.hpp"
#include "gnnsteal/train.hpp"

namespace gnnsteal {

/// Type I: the adversary knows the query graph's edges. Type II: features only.
/// Within a type, .1 = embedding, .2 = prediction, .3 = projection responses.
enum class Scenario { I1, I2, I3, II1, II2, II3 };

inline constexpr Scenario kAllScenarios[] = {Scenario::I1, Scenario::I2, Scenario::I3,
                                             Scenario::II1, Scenario::II2, Scenario::II3};

const char* to_string(Scenario scenario);  // "I.1" ... "II.3"
/// Accepts "I.1" style names (also "i1", "II1"); throws InvalidArgument otherwise.
Scenario parse_scenario(std::string_view text);
ResponseType scenario_response(Scenario scenario);
bool learns_structure(Scenario scenario);
Scenario make_scenario(bool learn_structure, ResponseType response);

struct AttackConfig {
  Scenario scenario = Scenario::I1;
  LayerKind surrogate = LayerKind::sage;
  std::size_t encoder_hidden = 256;
  std::size_t classifier_hidden = 100;
  TrainConfig encoder_train{.epochs = 200};
  TrainConfig classifier_train{.epochs = 300};
  StructureLearnConfig structure;  // used by II.*
  /// Query only this many nodes of the query graph (uniform sample); nullopt = all.
  std::optional<std::size_t> query_nodes;
  std::uint64_t seed = 0;

  void validate() const;
};

struct QueryLedger {
  std::size_t requests = 0;
  std::size_t distinct_nodes = 0;
};

/// Encoder F regressing the oracle response, then MLP classifier O on F's frozen output.
struct SurrogateModel {
  TrainedModel encoder;
  TrainedModel classifier;
  nlohmann::json provenance;
};

struct AttackResult {
  SurrogateModel surrogate;
  QueryLedger ledger;
  Graph query_graph;  // what was sent to the oracle (learned edges for II.*)
  std::vector<NodeId> sampled;  // ids in the input query graph that were used
  std::optional<LearnedStructure> structure;
};

/// The attack stopped after the oracle refused or failed; carries what had been spent.
class AttackFailed : public Error {
 public:
  AttackFailed(const std::string& message, QueryLedger ledger, bool budget_refused)
      : Error(message), ledger_(ledger), budget_refused_(budget_refused) {}
  const QueryLedger& ledger() const { return ledger_; }
  bool budget_refused() const { return budget_refused_; }

 private:
  QueryLedger ledger_;
  bool budget_refused_;
};

/// Trains F to minimise response_loss against `response` (row i belongs to response.order[i]).
/// The output width is response.dim() whatever the response type.
TrainedModel train_encoder(const Graph& query_graph, const QueryResponse& response, const AttackConfig& config);

/// Trains O on F(v) against the query labels; F is only read.
TrainedModel train_classifier(const TrainedModel& encoder, const Graph& query_graph, const AttackConfig& config);

/// F's output for `nodes`, the classifier's input.
Matrix surrogate_features(const TrainedModel& encoder, const Graph& graph, std::span<const NodeId> nodes);
/// O(F(v)) as class posteriors.
Matrix surrogate_posteriors(const SurrogateModel& surrogate, const Graph& graph, std::span<const NodeId> nodes);

/// Runs one scenario: optional structure learning (no oracle access), one oracle request for
/// all query nodes, then train_encoder and train_classifier. `query_graph` supplies features
/// and labels, and edges for Type I. Throws AttackFailed if the oracle refuses.
AttackResult run_attack(const AttackConfig& config, QueryOracle& oracle, const Graph& query_graph);

}  // namespace gnnsteal
