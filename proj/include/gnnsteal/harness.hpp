#pragma once

#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gnnsteal/attack.hpp"
#include "gnnsteal/graph.hpp"
#include "gnnsteal/metrics.hpp"
#include "gnnsteal/oracle.hpp"
#include "gnnsteal/train.hpp"

namespace gnnsteal {

struct DatasetInput {
  std::string name;
  Graph graph;
};

/// Everything a cell needs besides its (target, surrogate, response, type) coordinates.
/// Per-run seeds are derived from the run seed; the seed fields of the templates are ignored.
struct ExperimentSettings {
  SplitSpec split;
  TrainConfig target_train;
  std::size_t embedding_size = 256;
  AttackConfig attack;  // scenario and surrogate are set per cell
  OracleConfig oracle;  // response_type is set per cell; budget is left unlimited
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  bool record_timing = false;  // wall_seconds stays empty otherwise, keeping CSVs reproducible

  void validate() const;
};

struct CellSpec {
  LayerKind target = LayerKind::sage;
  LayerKind surrogate = LayerKind::sage;
  ResponseType response = ResponseType::embedding;
  bool learn_structure = false;  // Type II

  Scenario scenario() const { return make_scenario(learn_structure, response); }
};

inline constexpr double kNoValue = std::numeric_limits<double>::quiet_NaN();

/// One attack run. `axis`/`value` are set for sweep points; `error` for failed runs.
struct RunRecord {
  std::string dataset;
  std::string scenario;
  std::string response;
  std::string target_kind;
  std::string surrogate_kind;
  std::uint64_t seed = 0;
  double target_acc = kNoValue;
  double surrogate_acc = kNoValue;
  double fidelity = kNoValue;
  std::size_t queries_used = 0;
  double wall_seconds = kNoValue;
  std::string axis;
  double value = kNoValue;
  std::string error;

  bool ok() const { return error.empty(); }
};

struct AggregateRecord {
  std::string dataset, scenario, response, target_kind, surrogate_kind;
  std::string axis;
  double value = kNoValue;
  std::size_t failures = 0;
  Summary target_acc;
  Summary accuracy;
  Summary fidelity;
  double pearson_r = kNoValue;  // of the target kind, pooled (grid rows only)
};

/// Pearson r between per-cell mean accuracy and mean fidelity. dataset "*" pools datasets.
struct PearsonRecord {
  std::string target_kind;
  std::string dataset;
  std::size_t cells = 0;
  double r = kNoValue;  // NaN when undefined (fewer than 2 cells or zero variance)
};

struct MetricsReport {
  std::vector<RunRecord> records;
  std::vector<AggregateRecord> aggregates;
  std::vector<PearsonRecord> pearson;

  bool partial() const;
};

/// Groups records by cell (and sweep point) in first-seen order and fills aggregates and pearson.
MetricsReport build_report(std::vector<RunRecord> records);

/// Accuracy of argmax(scores) over the labelled rows; fidelity over all rows.
double labelled_accuracy(const Matrix& scores, std::span<const int> labels);

/// Per-run derivations shared by the grid and the command line, so a command-line run with
/// seed s reproduces the grid run with seed s.
InductiveSplit seeded_split(const Graph& graph, SplitSpec spec, std::uint64_t run_seed);
TrainedModel seeded_target(const Graph& train, LayerKind kind, std::size_t embedding_size, TrainConfig config,
                           std::uint64_t run_seed);
OracleConfig seeded_oracle(OracleConfig base, ResponseType response, std::uint64_t run_seed);
AttackConfig seeded_attack(AttackConfig base, const CellSpec& cell, std::uint64_t run_seed);

struct Scores {
  double target_acc = kNoValue;
  double surrogate_acc = kNoValue;
  double fidelity = kNoValue;
};
Scores score_surrogate(const TrainedModel& target, const SurrogateModel& surrogate, const Graph& test);

/// Where a Type II run's query edges come from: the structure learner, a plain cosine kNN
/// graph (k = structure.initial_k), or a random graph with as many edges as that kNN graph.
enum class QueryStructure { learned, knn, random };
const char* to_string(QueryStructure s);

/// Runs cells against targets trained on per-seed splits. Targets and splits are shared
/// between cells with the same dataset, target kind and seed.
class Experiment {
 public:
  Experiment(std::vector<DatasetInput> datasets, ExperimentSettings settings);

  /// One run. Failures are caught and returned as a record with `error` set.
  RunRecord run(const std::string& dataset, const CellSpec& cell, std::uint64_t seed);
  /// Same, with the attack and oracle settings overridden.
  RunRecord run(const std::string& dataset, const CellSpec& cell, std::uint64_t seed, const AttackConfig& attack,
                const OracleConfig& oracle);

  /// A Type II cell with the query structure taken from `structure` (learned = run()).
  RunRecord run(const std::string& dataset, const CellSpec& cell, std::uint64_t seed, QueryStructure structure);

  const ExperimentSettings& settings() const { return settings_; }
  const Graph& dataset(const std::string& name) const;
  std::vector<std::string> dataset_names() const;

  struct Prepared {
    InductiveSplit split;
    TrainedModel target;
  };
  const Prepared& prepared(const std::string& dataset, LayerKind target, std::uint64_t seed);

 private:
  RunRecord run_impl(const std::string& dataset, const CellSpec& cell, std::uint64_t seed, const AttackConfig& attack,
                     const OracleConfig& oracle, QueryStructure structure);

  std::vector<DatasetInput> datasets_;
  ExperimentSettings settings_;
  struct Entry {
    std::string dataset;
    LayerKind target;
    std::uint64_t seed;
    Prepared value;
  };
  std::deque<Entry> cache_;  // stable references
};

struct GridSpec {
  std::vector<LayerKind> targets{LayerKind::gin, LayerKind::gat, LayerKind::sage};
  std::vector<LayerKind> surrogates{LayerKind::gin, LayerKind::gat, LayerKind::sage};
  std::vector<ResponseType> responses{ResponseType::embedding, ResponseType::prediction, ResponseType::projection};
  bool learn_structure = false;
};

/// Every dataset x target x surrogate x response cell, once per settings seed.
MetricsReport run_grid(Experiment& experiment, const GridSpec& grid);

/// Dataset fractions (of all nodes) to query; each must be in (0, split.query_fraction].
std::vector<RunRecord> budget_sweep(Experiment& experiment, const std::string& dataset, const CellSpec& cell,
                                    const std::vector<double>& fractions);
std::vector<RunRecord> defense_sweep(Experiment& experiment, const std::string& dataset, const CellSpec& cell,
                                     const std::vector<double>& sigmas);

/// The three query structures for one Type II cell, every settings seed; axis "structure",
/// value 0 learned, 1 knn, 2 random.
std::vector<RunRecord> structure_comparison(Experiment& experiment, const std::string& dataset, CellSpec cell);

enum class HyperAxis { hidden, epochs, batch };
const char* to_string(HyperAxis axis);
HyperAxis parse_hyper_axis(std::string_view text);

/// Varies the surrogate encoder's hidden width, training epochs or batch size.
std::vector<RunRecord> hyper_sweep(Experiment& experiment, const std::string& dataset, const CellSpec& cell,
                                   HyperAxis axis, const std::vector<double>& values);

}  // namespace gnnsteal
