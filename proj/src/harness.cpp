#include "gnnsteal/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <tuple>

#include "gnnsteal/loss.hpp"
#include "gnnsteal/random.hpp"
#include "gnnsteal/structure.hpp"

namespace gnnsteal {

namespace {

std::vector<NodeId> iota_nodes(std::size_t n) {
  std::vector<NodeId> v(n);
  std::iota(v.begin(), v.end(), NodeId{0});
  return v;
}

void require_values(const std::vector<double>& values, const char* what) {
  if (values.empty()) throw InvalidArgument(std::string(what) + ": no values given");
}

std::size_t positive_integer(double v, const char* axis) {
  if (!(v >= 1.0) || v != std::floor(v)) {
    throw InvalidArgument(std::string("sweep axis ") + axis + " needs positive integers, got " + std::to_string(v));
  }
  return static_cast<std::size_t>(v);
}

std::string value_key(double v) { return std::isnan(v) ? std::string() : std::to_string(v); }

}  // namespace

void ExperimentSettings::validate() const {
  split.validate();
  target_train.validate();
  oracle.validate();
  if (embedding_size < 1) throw InvalidArgument("embedding size must be >= 1");
  if (seeds.empty()) throw InvalidArgument("at least one run seed is required");
}

InductiveSplit seeded_split(const Graph& graph, SplitSpec spec, std::uint64_t run_seed) {
  spec.seed = derive_seed(run_seed, {0x5b});
  return split_inductive(graph, spec);
}

TrainedModel seeded_target(const Graph& train, LayerKind kind, std::size_t embedding_size, TrainConfig config,
                           std::uint64_t run_seed) {
  const auto k = static_cast<std::uint64_t>(kind);
  config.seed = derive_seed(run_seed, {0x7b, k});
  const ModelConfig mc =
      target_config(kind, train.feature_dim(), static_cast<std::size_t>(train.num_classes()), embedding_size);
  return train_model(build_model(mc, derive_seed(run_seed, {0x7a, k})), train, config);
}

OracleConfig seeded_oracle(OracleConfig base, ResponseType response, std::uint64_t run_seed) {
  base.response_type = response;
  base.budget.reset();
  base.noise_seed = derive_seed(run_seed, {0x0c});
  base.tsne.seed = derive_seed(run_seed, {0x75});
  return base;
}

AttackConfig seeded_attack(AttackConfig base, const CellSpec& cell, std::uint64_t run_seed) {
  base.scenario = cell.scenario();
  base.surrogate = cell.surrogate;
  base.seed = derive_seed(run_seed, {0xa7});
  return base;
}

Scores score_surrogate(const TrainedModel& target, const SurrogateModel& surrogate, const Graph& test) {
  const std::vector<NodeId> nodes = iota_nodes(test.num_nodes());
  const Matrix target_scores = forward(target, test, nodes, Head::output);
  const Matrix surrogate_scores = surrogate_posteriors(surrogate, test, nodes);
  return {labelled_accuracy(target_scores, test.labels()), labelled_accuracy(surrogate_scores, test.labels()),
          fidelity(surrogate_scores, target_scores)};
}

const char* to_string(QueryStructure s) {
  switch (s) {
    case QueryStructure::learned: return "learned";
    case QueryStructure::knn: return "knn";
    case QueryStructure::random: return "random";
  }
  return "?";
}

bool MetricsReport::partial() const {
  return std::any_of(records.begin(), records.end(), [](const RunRecord& r) { return !r.ok(); });
}

double labelled_accuracy(const Matrix& scores, std::span<const int> labels) {
  const std::vector<int> pred = argmax_rows(scores);
  std::vector<int> p, y;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == kUnknownLabel) continue;
    p.push_back(pred[i]);
    y.push_back(labels[i]);
  }
  return accuracy(p, y);
}

MetricsReport build_report(std::vector<RunRecord> records) {
  MetricsReport report;
  report.records = std::move(records);

  using Key = std::tuple<std::string, std::string, std::string, std::string, std::string, std::string, std::string>;
  std::map<Key, std::size_t> index;
  std::vector<std::vector<const RunRecord*>> groups;
  for (const RunRecord& r : report.records) {
    const Key key{r.dataset, r.scenario, r.response, r.target_kind, r.surrogate_kind, r.axis, value_key(r.value)};
    auto [it, fresh] = index.emplace(key, groups.size());
    if (fresh) {
      groups.emplace_back();
      AggregateRecord a;
      a.dataset = r.dataset;
      a.scenario = r.scenario;
      a.response = r.response;
      a.target_kind = r.target_kind;
      a.surrogate_kind = r.surrogate_kind;
      a.axis = r.axis;
      a.value = r.value;
      report.aggregates.push_back(a);
    }
    groups[it->second].push_back(&r);
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::vector<double> t, acc, fid;
    for (const RunRecord* r : groups[g]) {
      if (!r->ok()) {
        ++report.aggregates[g].failures;
        continue;
      }
      t.push_back(r->target_acc);
      acc.push_back(r->surrogate_acc);
      fid.push_back(r->fidelity);
    }
    report.aggregates[g].target_acc = summarize(t);
    report.aggregates[g].accuracy = summarize(acc);
    report.aggregates[g].fidelity = summarize(fid);
  }

  // Pearson over grid cells, per target kind: pooled, then per dataset.
  std::vector<std::string> kinds, datasets;
  for (const AggregateRecord& a : report.aggregates) {
    if (!a.axis.empty() || a.accuracy.count == 0) continue;
    if (std::find(kinds.begin(), kinds.end(), a.target_kind) == kinds.end()) kinds.push_back(a.target_kind);
    if (std::find(datasets.begin(), datasets.end(), a.dataset) == datasets.end()) datasets.push_back(a.dataset);
  }
  auto correlate = [&](const std::string& kind, const std::string& dataset) {
    PearsonRecord p{kind, dataset, 0, kNoValue};
    std::vector<double> xs, ys;
    for (const AggregateRecord& a : report.aggregates) {
      if (!a.axis.empty() || a.accuracy.count == 0 || a.target_kind != kind) continue;
      if (dataset != "*" && a.dataset != dataset) continue;
      xs.push_back(a.accuracy.mean);
      ys.push_back(a.fidelity.mean);
    }
    p.cells = xs.size();
    try {
      p.r = pearson(xs, ys);
    } catch (const InvalidArgument&) {
      p.r = kNoValue;
    }
    return p;
  };
  for (const std::string& kind : kinds) {
    report.pearson.push_back(correlate(kind, "*"));
    for (const std::string& d : datasets) report.pearson.push_back(correlate(kind, d));
  }
  for (AggregateRecord& a : report.aggregates) {
    if (!a.axis.empty()) continue;
    for (const PearsonRecord& p : report.pearson)
      if (p.dataset == "*" && p.target_kind == a.target_kind) a.pearson_r = p.r;
  }
  return report;
}

Experiment::Experiment(std::vector<DatasetInput> datasets, ExperimentSettings settings)
    : datasets_(std::move(datasets)), settings_(std::move(settings)) {
  settings_.validate();
  if (datasets_.empty()) throw InvalidArgument("experiment needs at least one dataset");
}

std::vector<std::string> Experiment::dataset_names() const {
  std::vector<std::string> out;
  for (const DatasetInput& d : datasets_) out.push_back(d.name);
  return out;
}

const Graph& Experiment::dataset(const std::string& name) const {
  for (const DatasetInput& d : datasets_)
    if (d.name == name) return d.graph;
  throw InvalidArgument("unknown dataset '" + name + "'");
}

const Experiment::Prepared& Experiment::prepared(const std::string& dataset_name, LayerKind target, std::uint64_t seed) {
  for (const Entry& e : cache_)
    if (e.dataset == dataset_name && e.target == target && e.seed == seed) return e.value;
  const Graph& graph = dataset(dataset_name);
  Prepared p;
  p.split = seeded_split(graph, settings_.split, seed);
  p.target = seeded_target(p.split.train, target, settings_.embedding_size, settings_.target_train, seed);
  cache_.push_back({dataset_name, target, seed, std::move(p)});
  return cache_.back().value;
}

RunRecord Experiment::run(const std::string& dataset_name, const CellSpec& cell, std::uint64_t seed) {
  return run(dataset_name, cell, seed, settings_.attack, settings_.oracle);
}

RunRecord Experiment::run(const std::string& dataset_name, const CellSpec& cell, std::uint64_t seed,
                          const AttackConfig& attack, const OracleConfig& oracle) {
  return run_impl(dataset_name, cell, seed, attack, oracle, QueryStructure::learned);
}

RunRecord Experiment::run(const std::string& dataset_name, const CellSpec& cell, std::uint64_t seed,
                          QueryStructure structure) {
  if (!cell.learn_structure) throw InvalidArgument("query structure baselines apply to Type II cells only");
  return run_impl(dataset_name, cell, seed, settings_.attack, settings_.oracle, structure);
}

RunRecord Experiment::run_impl(const std::string& dataset_name, const CellSpec& cell, std::uint64_t seed,
                               const AttackConfig& attack, const OracleConfig& oracle, QueryStructure structure) {
  dataset(dataset_name);  // unknown names are caller errors, not cell failures
  RunRecord rec;
  rec.dataset = dataset_name;
  rec.scenario = to_string(cell.scenario());
  rec.response = to_string(cell.response);
  rec.target_kind = to_string(cell.target);
  rec.surrogate_kind = to_string(cell.surrogate);
  rec.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    const Prepared& p = prepared(dataset_name, cell.target, seed);
    Oracle target_oracle(p.target, seeded_oracle(oracle, cell.response, seed));
    AttackConfig ac = seeded_attack(attack, cell, seed);
    const Graph& query = p.split.query;
    Graph input = cell.learn_structure ? query.with_edges({}) : query;
    if (cell.learn_structure && structure != QueryStructure::learned) {
      // The baseline graph stands in for the learner; the attack then runs as Type I on it.
      std::vector<Edge> edges = knn_baseline(query.features(), attack.structure.initial_k);
      if (structure == QueryStructure::random) {
        edges = random_baseline(query.num_nodes(), edges.size(), derive_seed(seed, {0x4a}));
      }
      input = query.with_edges(std::move(edges));
      ac.scenario = make_scenario(false, cell.response);
    }
    const AttackResult result = run_attack(ac, target_oracle, input);
    const Scores scores = score_surrogate(p.target, result.surrogate, p.split.test);
    rec.target_acc = scores.target_acc;
    rec.surrogate_acc = scores.surrogate_acc;
    rec.fidelity = scores.fidelity;
    rec.queries_used = result.ledger.distinct_nodes;
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  if (settings_.record_timing) {
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return rec;
}

std::vector<RunRecord> structure_comparison(Experiment& experiment, const std::string& dataset, CellSpec cell) {
  cell.learn_structure = true;
  std::vector<RunRecord> out;
  for (QueryStructure s : {QueryStructure::learned, QueryStructure::knn, QueryStructure::random}) {
    for (std::uint64_t seed : experiment.settings().seeds) {
      RunRecord r = experiment.run(dataset, cell, seed, s);
      r.axis = "structure";
      r.value = static_cast<double>(s);
      out.push_back(std::move(r));
    }
  }
  return out;
}

MetricsReport run_grid(Experiment& experiment, const GridSpec& grid) {
  std::vector<RunRecord> records;
  for (const std::string& dataset : experiment.dataset_names())
    for (LayerKind target : grid.targets)
      for (ResponseType response : grid.responses)
        for (LayerKind surrogate : grid.surrogates)
          for (std::uint64_t seed : experiment.settings().seeds)
            records.push_back(experiment.run(dataset, {target, surrogate, response, grid.learn_structure}, seed));
  return build_report(std::move(records));
}

std::vector<RunRecord> budget_sweep(Experiment& experiment, const std::string& dataset, const CellSpec& cell,
                                    const std::vector<double>& fractions) {
  require_values(fractions, "budget sweep");
  const double limit = experiment.settings().split.query_fraction;
  for (double f : fractions) {
    if (!(f > 0.0) || f > limit + 1e-12) {
      throw InvalidArgument("budget fraction " + std::to_string(f) + " outside (0, " + std::to_string(limit) +
                            "], the query share of the dataset");
    }
  }
  const double total = static_cast<double>(experiment.dataset(dataset).num_nodes());
  std::vector<RunRecord> out;
  for (double f : fractions) {
    AttackConfig attack = experiment.settings().attack;
    attack.query_nodes = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(f * total)));
    for (std::uint64_t seed : experiment.settings().seeds) {
      RunRecord r = experiment.run(dataset, cell, seed, attack, experiment.settings().oracle);
      r.axis = "budget";
      r.value = f;
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<RunRecord> defense_sweep(Experiment& experiment, const std::string& dataset, const CellSpec& cell,
                                     const std::vector<double>& sigmas) {
  require_values(sigmas, "defense sweep");
  for (double s : sigmas)
    if (!(s >= 0.0)) throw InvalidArgument("noise sigma must be >= 0, got " + std::to_string(s));
  std::vector<RunRecord> out;
  for (double sigma : sigmas) {
    OracleConfig oracle = experiment.settings().oracle;
    oracle.noise_sigma = sigma;
    for (std::uint64_t seed : experiment.settings().seeds) {
      RunRecord r = experiment.run(dataset, cell, seed, experiment.settings().attack, oracle);
      r.axis = "sigma";
      r.value = sigma;
      out.push_back(std::move(r));
    }
  }
  return out;
}

const char* to_string(HyperAxis axis) {
  switch (axis) {
    case HyperAxis::hidden: return "hidden";
    case HyperAxis::epochs: return "epochs";
    case HyperAxis::batch: return "batch";
  }
  return "?";
}

HyperAxis parse_hyper_axis(std::string_view text) {
  if (text == "hidden") return HyperAxis::hidden;
  if (text == "epochs") return HyperAxis::epochs;
  if (text == "batch") return HyperAxis::batch;
  throw InvalidArgument("unknown sweep axis '" + std::string(text) + "' (expected hidden, epochs or batch)");
}

std::vector<RunRecord> hyper_sweep(Experiment& experiment, const std::string& dataset, const CellSpec& cell,
                                   HyperAxis axis, const std::vector<double>& values) {
  require_values(values, "hyperparameter sweep");
  for (double v : values) positive_integer(v, to_string(axis));
  std::vector<RunRecord> out;
  for (double v : values) {
    AttackConfig attack = experiment.settings().attack;
    const std::size_t n = positive_integer(v, to_string(axis));
    switch (axis) {
      case HyperAxis::hidden: attack.encoder_hidden = n; break;
      case HyperAxis::epochs: attack.encoder_train.epochs = n; break;
      case HyperAxis::batch: attack.encoder_train.batch_size = n; break;
    }
    for (std::uint64_t seed : experiment.settings().seeds) {
      RunRecord r = experiment.run(dataset, cell, seed, attack, experiment.settings().oracle);
      r.axis = to_string(axis);
      r.value = v;
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace gnnsteal
