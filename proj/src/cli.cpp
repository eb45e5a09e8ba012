#include "gnnsteal/cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <thread>

#include "gnnsteal/checkpoint.hpp"
#include "gnnsteal/dataset.hpp"
#include "gnnsteal/errors.hpp"
#include "gnnsteal/random.hpp"
#include "gnnsteal/report.hpp"
#include "gnnsteal/run_config.hpp"
#include "gnnsteal/server.hpp"
#include "gnnsteal/structure.hpp"

namespace gnnsteal::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop = true; }

struct Globals {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  std::string data_root;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* data_root_opt = nullptr;
};

RunConfig load_config(const Globals& g) {
  RunConfig cfg = g.config.empty() ? RunConfig{} : load_run_config(g.config);
  if (g.seed_opt->count()) cfg.seed = g.seed;
  if (g.out_opt->count()) cfg.out = g.out;
  if (g.data_root_opt->count()) cfg.data_root = g.data_root;
  return cfg;
}

Graph load_graph(const std::string& spec, const RunConfig& cfg) {
  const fs::path dir = resolve_dataset(spec, cfg.data_root);
  return load_dataset(dir, spec);
}

std::string dataset_arg(const std::string& flag, const RunConfig& cfg) {
  if (!flag.empty()) return flag;
  if (!cfg.datasets.empty()) return cfg.datasets.front();
  throw ConfigError("no dataset given (--dataset or \"datasets\" in the config)");
}

void ensure_out(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec || !fs::is_directory(cfg.out)) throw Error("cannot create output directory " + cfg.out.string());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
  if (!f.flush()) throw Error("failed writing " + path.string());
}

std::string hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ConfigError("bad value '" + item + "' in --values");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("--values is empty");
  return out;
}

// Options shared by commands that pick a grid cell.
struct CellFlags {
  std::string kind, surrogate, scenario, response;
  void add(CLI::App* cmd, bool with_scenario, bool with_kind = true) {
    if (with_kind) cmd->add_option("--kind", kind, "Target architecture: gin, gat or sage");
    cmd->add_option("--surrogate", surrogate, "Surrogate architecture: gin, gat or sage");
    if (with_scenario) {
      cmd->add_option("--scenario", scenario, "I.1..I.3 (edges known) or II.1..II.3 (edges learned)");
      cmd->add_option("--response", response, "prediction, embedding or projection");
    }
  }
  void apply(RunConfig& cfg) const {
    try {
      if (!kind.empty()) cfg.cell.target = parse_layer_kind(kind);
      if (!surrogate.empty()) cfg.cell.surrogate = parse_layer_kind(surrogate);
      if (!scenario.empty()) {
        const Scenario s = parse_scenario(scenario);
        if (!response.empty() && parse_response_type(response) != scenario_response(s)) {
          throw ConfigError("--scenario " + scenario + " contradicts --response " + response);
        }
        cfg.cell.response = scenario_response(s);
        cfg.cell.learn_structure = learns_structure(s);
      } else if (!response.empty()) {
        cfg.cell.response = parse_response_type(response);
      }
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }
};

std::string split_manifest(const Graph& graph, const RunConfig& cfg) {
  SplitSpec spec = cfg.settings.split;
  spec.seed = derive_seed(cfg.seed, {0x5b});
  const SplitAssignment a = assign_split(graph.num_nodes(), spec);
  const json j = {{"run_seed", cfg.seed},
                  {"split_seed", spec.seed},
                  {"target_train_fraction", spec.target_train_fraction},
                  {"query_fraction", spec.query_fraction},
                  {"test_fraction", spec.test_fraction},
                  {"train", a.train},
                  {"query", a.query},
                  {"test", a.test}};
  return j.dump(1) + "\n";
}

int cmd_train_target(const Globals& g, const std::string& dataset_flag, const CellFlags& cell, std::ostream& out) {
  RunConfig cfg = load_config(g);
  cell.apply(cfg);
  const std::string name = dataset_arg(dataset_flag, cfg);
  const Graph graph = load_graph(name, cfg);
  ensure_out(cfg);
  const InductiveSplit split = seeded_split(graph, cfg.settings.split, cfg.seed);
  Checkpoint ckpt;
  ckpt.model = seeded_target(split.train, cfg.cell.target, cfg.settings.embedding_size, cfg.settings.target_train, cfg.seed);
  const std::vector<NodeId> nodes = [&] {
    std::vector<NodeId> v(split.test.num_nodes());
    std::iota(v.begin(), v.end(), NodeId{0});
    return v;
  }();
  const double acc = labelled_accuracy(forward(ckpt.model, split.test, nodes, Head::output), split.test.labels());
  ckpt.provenance = {{"role", "target"},
                     {"dataset", name},
                     {"kind", to_string(cfg.cell.target)},
                     {"seed", cfg.seed},
                     {"test_accuracy", acc},
                     {"config", run_config_to_json(cfg)}};
  // Paths stay out so the same seed gives the same file wherever it is written.
  ckpt.provenance["config"].erase("out");
  ckpt.provenance["config"].erase("data_root");
  const fs::path file = cfg.out / "target.json";
  save_checkpoint(ckpt, file);
  write_text(cfg.out / "split.json", split_manifest(graph, cfg));
  char line[160];
  std::snprintf(line, sizeof line, "test_accuracy %.6f\nparameter_hash %s\n", acc, hex(parameter_hash(ckpt.model)).c_str());
  out << line << "checkpoint " << file.string() << "\n";
  return kExitOk;
}

struct ServeFlags {
  std::string checkpoint, response, host, port_file;
  int port = 0;
  double sigma = 0;
  std::size_t budget = 0, threads = 4;
  CLI::Option *port_opt = nullptr, *sigma_opt = nullptr, *budget_opt = nullptr, *host_opt = nullptr,
              *threads_opt = nullptr;
};

int cmd_serve(const Globals& g, const ServeFlags& f, std::ostream& out) {
  RunConfig cfg = load_config(g);
  if (!f.response.empty()) {
    try {
      cfg.cell.response = parse_response_type(f.response);
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }
  if (f.port_opt->count()) cfg.server.port = f.port;
  if (f.host_opt->count()) cfg.server.host = f.host;
  if (f.threads_opt->count()) cfg.server.threads = f.threads;
  if (f.sigma_opt->count()) cfg.settings.oracle.noise_sigma = f.sigma;
  if (f.budget_opt->count()) cfg.settings.oracle.budget = f.budget;
  cfg.validate();

  const Checkpoint ckpt = load_checkpoint(f.checkpoint);
  OracleConfig oc = seeded_oracle(cfg.settings.oracle, cfg.cell.response, cfg.seed);
  oc.budget = cfg.settings.oracle.budget;
  Oracle oracle(ckpt.model, oc);
  OracleServer server(oracle, cfg.server);
  server.start();
  if (!f.port_file.empty()) write_text(f.port_file, std::to_string(server.port()) + "\n");
  out << "serving " << to_string(cfg.cell.response) << " on " << cfg.server.host << ":" << server.port() << std::endl;

  g_stop = false;
  auto old_int = std::signal(SIGINT, on_signal);
  auto old_term = std::signal(SIGTERM, on_signal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(50));
  std::signal(SIGINT, old_int);
  std::signal(SIGTERM, old_term);
  server.stop();
  out << "stopped" << std::endl;
  return kExitOk;
}

struct AttackFlags {
  std::string dataset, checkpoint, target, query;
  std::size_t query_nodes = 0, budget = 0;
  CLI::Option *query_nodes_opt = nullptr, *budget_opt = nullptr;
};

int cmd_attack(const Globals& g, const AttackFlags& f, const CellFlags& cell, std::ostream& out) {
  RunConfig cfg = load_config(g);
  cell.apply(cfg);
  if (f.query_nodes_opt->count()) cfg.settings.attack.query_nodes = f.query_nodes;
  if (f.budget_opt->count()) cfg.settings.oracle.budget = f.budget;
  if (f.checkpoint.empty() && f.target.empty()) throw ConfigError("attack needs --target ADDRESS or --checkpoint FILE");
  if (f.target.empty() == false && f.budget_opt->count()) throw ConfigError("--budget applies to the in-process oracle only");

  std::optional<Checkpoint> target;
  if (!f.checkpoint.empty()) target = load_checkpoint(f.checkpoint);

  std::string name;
  std::optional<InductiveSplit> split;
  if (!f.dataset.empty() || !cfg.datasets.empty() || f.query.empty()) {
    name = dataset_arg(f.dataset, cfg);
    split = seeded_split(load_graph(name, cfg), cfg.settings.split, cfg.seed);
  }
  Graph query = f.query.empty() ? split->query : load_dataset(f.query);
  if (cfg.cell.learn_structure) query = query.with_edges({});
  ensure_out(cfg);

  std::unique_ptr<QueryOracle> oracle;
  if (!f.target.empty()) {
    const auto [host, port] = parse_address(f.target);
    oracle = std::make_unique<RemoteOracle>(host, port);
  } else {
    OracleConfig oc = seeded_oracle(cfg.settings.oracle, cfg.cell.response, cfg.seed);
    oc.budget = cfg.settings.oracle.budget;
    oracle = std::make_unique<Oracle>(target->model, oc);
  }

  const AttackConfig ac = seeded_attack(cfg.settings.attack, cfg.cell, cfg.seed);
  AttackResult result = run_attack(ac, *oracle, query);

  Checkpoint surrogate{result.surrogate.encoder, result.surrogate.classifier, result.surrogate.provenance};
  surrogate.provenance["run_seed"] = cfg.seed;
  surrogate.provenance["transport"] = f.target.empty() ? "in-process" : "http";
  save_checkpoint(surrogate, cfg.out / "surrogate.json");
  if (result.structure) save_edges(result.structure->edges, cfg.out / "learned_edges.csv");

  RunRecord rec;
  rec.dataset = name.empty() ? fs::path(f.query).filename().string() : name;
  rec.scenario = to_string(ac.scenario);
  rec.response = to_string(cfg.cell.response);
  rec.target_kind = target ? to_string(target->model.config.kind) : "";
  rec.surrogate_kind = to_string(cfg.cell.surrogate);
  rec.seed = cfg.seed;
  rec.queries_used = result.ledger.distinct_nodes;
  if (target && split) {
    const Scores s = score_surrogate(target->model, result.surrogate, split->test);
    rec.target_acc = s.target_acc;
    rec.surrogate_acc = s.surrogate_acc;
    rec.fidelity = s.fidelity;
  }
  emit_report(build_report({rec}), cfg.out);
  std::ifstream results(cfg.out / "results.csv");
  out << results.rdbuf();
  return kExitOk;
}

double homophily(std::span<const Edge> edges, const Graph& g) {
  std::size_t same = 0, counted = 0;
  for (const Edge& e : edges) {
    const int a = g.labels()[e.u], b = g.labels()[e.v];
    if (a == kUnknownLabel || b == kUnknownLabel) continue;
    ++counted;
    same += a == b;
  }
  return counted ? static_cast<double>(same) / static_cast<double>(counted) : kNoValue;
}

int cmd_reconstruct(const Globals& g, const std::string& dataset_flag, const std::string& query_dir, std::ostream& out) {
  RunConfig cfg = load_config(g);
  Graph query;
  if (!query_dir.empty()) {
    query = load_dataset(query_dir);
  } else {
    const std::string name = dataset_arg(dataset_flag, cfg);
    query = seeded_split(load_graph(name, cfg), cfg.settings.split, cfg.seed).query;
  }
  ensure_out(cfg);
  const StructureLearnConfig& sl = cfg.settings.attack.structure;
  const LearnedStructure learned =
      learn_structure(query.features(), query.labels(), query.num_classes(), sl, derive_seed(cfg.seed, {0x57}));
  const std::vector<Edge> knn = knn_baseline(query.features(), sl.initial_k);
  const std::vector<Edge> rnd = random_baseline(query.num_nodes(), knn.size(), derive_seed(cfg.seed, {0x4a}));
  save_edges(learned.edges, cfg.out / "learned_edges.csv");
  save_edges(knn, cfg.out / "knn_edges.csv");
  save_edges(rnd, cfg.out / "random_edges.csv");

  std::string trace = "iteration,task_loss,regularization,joint_loss,changed_fraction,learned_edges\n";
  for (const StructureIteration& it : learned.trace) {
    char line[200];
    std::snprintf(line, sizeof line, "%zu,%.6f,%.6f,%.6f,%.6f,%zu\n", it.iteration, it.task_loss, it.regularization,
                  it.joint_loss, it.changed_fraction, it.learned_edges);
    trace += line;
  }
  write_text(cfg.out / "structure_trace.csv", trace);

  out << "graph,edges,homophily\n";
  auto row = [&](const char* label, std::span<const Edge> edges) {
    char line[120];
    std::snprintf(line, sizeof line, "%s,%zu,%.6f\n", label, edges.size(), homophily(edges, query));
    out << line;
  };
  row("learned", learned.edges);
  row("knn", knn);
  row("random", rnd);
  if (query.num_edges() > 0) row("true", query.edges());
  return kExitOk;
}

std::vector<DatasetInput> load_datasets(const std::vector<std::string>& flags, const RunConfig& cfg) {
  const std::vector<std::string>& names = flags.empty() ? cfg.datasets : flags;
  if (names.empty()) throw ConfigError("no datasets given (--dataset or \"datasets\" in the config)");
  std::vector<DatasetInput> out;
  for (const std::string& n : names) out.push_back({n, load_graph(n, cfg)});
  return out;
}

// Partial reports are still written; the exit code says runs failed.
int finish_report(const MetricsReport& report, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto files = emit_report(report, cfg.out);
  std::size_t failed = 0;
  for (const RunRecord& r : report.records) failed += !r.ok();
  out << "runs " << report.records.size() << " failed " << failed << "\n";
  for (const fs::path& p : files) out << "wrote " << p.string() << "\n";
  if (failed) {
    err << "partial report: " << failed << " run(s) failed, see failures.csv\n";
    return kExitRuntime;
  }
  return kExitOk;
}

struct GridFlags {
  std::vector<std::string> datasets;
  bool learn_structure = false;
  std::size_t repetitions = 0;
  CLI::Option* reps_opt = nullptr;
};

void apply_repetitions(const GridFlags& f, RunConfig& cfg) {
  if (!f.reps_opt->count()) return;
  if (f.repetitions < 1) throw ConfigError("--repetitions must be >= 1");
  cfg.settings.seeds.resize(f.repetitions);
  std::iota(cfg.settings.seeds.begin(), cfg.settings.seeds.end(), std::uint64_t{0});
}

int cmd_grid(const Globals& g, const GridFlags& f, std::ostream& out, std::ostream& err) {
  RunConfig cfg = load_config(g);
  if (f.learn_structure) cfg.grid.learn_structure = true;
  apply_repetitions(f, cfg);
  cfg.validate();
  Experiment experiment(load_datasets(f.datasets, cfg), cfg.settings);
  return finish_report(run_grid(experiment, cfg.grid), cfg, out, err);
}

struct SweepFlags {
  GridFlags grid;
  std::string axis, values;
};

int cmd_sweep(const Globals& g, const SweepFlags& f, const CellFlags& cell, std::ostream& out, std::ostream& err) {
  RunConfig cfg = load_config(g);
  cell.apply(cfg);
  apply_repetitions(f.grid, cfg);
  if (!f.axis.empty()) cfg.sweep.axis = f.axis;
  if (!f.values.empty()) cfg.sweep.values = parse_values(f.values);
  cfg.validate();
  std::vector<DatasetInput> data = load_datasets(f.grid.datasets, cfg);
  if (data.size() != 1) throw ConfigError("sweep takes exactly one dataset");
  const std::string name = data.front().name;
  Experiment experiment(std::move(data), cfg.settings);

  std::vector<RunRecord> records;
  const std::string& axis = cfg.sweep.axis;
  try {
    if (axis == "budget") {
      records = budget_sweep(experiment, name, cfg.cell, cfg.sweep.values);
    } else if (axis == "sigma") {
      records = defense_sweep(experiment, name, cfg.cell, cfg.sweep.values);
    } else if (axis == "structure") {
      records = structure_comparison(experiment, name, cfg.cell);
    } else {
      records = hyper_sweep(experiment, name, cfg.cell, parse_hyper_axis(axis), cfg.sweep.values);
    }
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return finish_report(build_report(std::move(records)), cfg, out, err);
}

int cmd_report(const Globals& g, const std::string& in_dir, std::ostream& out, std::ostream& err) {
  RunConfig cfg = load_config(g);
  finish_report(load_report(in_dir), cfg, out, err);
  return kExitOk;  // failures were recorded by an earlier run, not by this one
}

struct SynthFlags {
  std::size_t nodes = 600, dim = 16;
  int classes = 3;
  double intra = 0.05, inter = 0.005;
};

int cmd_synth(const Globals& g, const SynthFlags& f, std::ostream& out) {
  RunConfig cfg = load_config(g);
  if (f.nodes < 2 || f.classes < 2 || f.dim < 1) throw ConfigError("synth-dataset needs nodes >= 2, classes >= 2, dim >= 1");
  const Graph graph = synth_graph(f.nodes, f.classes, f.intra, f.inter, f.dim, cfg.seed);
  save_dataset(graph, cfg.out);
  out << "wrote " << graph.num_nodes() << " nodes, " << graph.num_edges() << " edges to " << cfg.out.string() << "\n";
  return kExitOk;
}

}  // namespace

void request_stop() { g_stop = true; }

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Model extraction attacks against inductive graph neural networks"};
  app.name("gnnsteal");
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "JSON run configuration")->check(CLI::ExistingFile);
  g.seed_opt = app.add_option("--seed", g.seed, "Run seed (overrides the config)");
  g.out_opt = app.add_option("--out", g.out, "Output directory (overrides the config)");
  g.data_root_opt = app.add_option("--data-root", g.data_root, "Directory holding dataset directories");

  std::string dataset, query_dir, in_dir;
  CellFlags cell;

  auto* train = app.add_subcommand("train-target", "Train a target model on the target partition of a seeded split");
  train->add_option("--dataset", dataset, "Dataset directory or name under --data-root");
  cell.add(train, false);

  ServeFlags sf;
  auto* serve = app.add_subcommand("serve", "Serve a target checkpoint over HTTP until interrupted");
  serve->add_option("--checkpoint", sf.checkpoint, "Target checkpoint")->required()->check(CLI::ExistingFile);
  serve->add_option("--response", sf.response, "prediction, embedding or projection");
  sf.host_opt = serve->add_option("--host", sf.host, "Bind address");
  sf.port_opt = serve->add_option("--port", sf.port, "Port (0 picks a free one)");
  sf.sigma_opt = serve->add_option("--sigma", sf.sigma, "Gaussian noise on every response");
  sf.budget_opt = serve->add_option("--budget", sf.budget, "Distinct query nodes allowed");
  sf.threads_opt = serve->add_option("--threads", sf.threads, "Worker threads");
  serve->add_option("--port-file", sf.port_file, "Write the bound port to this file once listening");

  AttackFlags af;
  auto* attack = app.add_subcommand("attack", "Steal a surrogate from a served or in-process target");
  attack->add_option("--dataset", af.dataset, "Dataset; its seeded query partition is the query graph");
  attack->add_option("--checkpoint", af.checkpoint, "Target checkpoint: in-process oracle, and scoring")
      ->check(CLI::ExistingFile);
  attack->add_option("--target", af.target, "host:port of a served oracle");
  attack->add_option("--query", af.query, "Dataset directory used as the query graph instead");
  af.query_nodes_opt = attack->add_option("--query-nodes", af.query_nodes, "Sample this many query nodes");
  af.budget_opt = attack->add_option("--budget", af.budget, "Budget of the in-process oracle");
  cell.add(attack, true, false);

  auto* reconstruct = app.add_subcommand("reconstruct-graph", "Learn a query graph structure and compare baselines");
  reconstruct->add_option("--dataset", dataset, "Dataset; its seeded query partition is reconstructed");
  reconstruct->add_option("--query", query_dir, "Dataset directory to reconstruct instead");

  GridFlags gf;
  auto* grid = app.add_subcommand("grid", "Run the target x surrogate x response grid and write a report");
  grid->add_option("--dataset", gf.datasets, "Dataset (repeatable; overrides the config list)");
  grid->add_flag("--learn-structure", gf.learn_structure, "Type II grid");
  gf.reps_opt = grid->add_option("--repetitions", gf.repetitions, "Use seeds 0..N-1");

  SweepFlags swf;
  auto* sweep = app.add_subcommand("sweep", "Sweep budget, sigma, structure, hidden, epochs or batch for one cell");
  sweep->add_option("--dataset", swf.grid.datasets, "Dataset");
  sweep->add_option("--axis", swf.axis, "budget, sigma, structure, hidden, epochs or batch");
  sweep->add_option("--values", swf.values, "Comma-separated values");
  swf.grid.reps_opt = sweep->add_option("--repetitions", swf.grid.repetitions, "Use seeds 0..N-1");
  cell.add(sweep, true);

  auto* report = app.add_subcommand("report", "Rebuild aggregates and plots from a results directory");
  report->add_option("--in", in_dir, "Directory with results.csv")->required()->check(CLI::ExistingDirectory);

  SynthFlags syn;
  auto* synth = app.add_subcommand("synth-dataset", "Write a stochastic block model dataset");
  synth->add_option("--nodes", syn.nodes, "Node count");
  synth->add_option("--classes", syn.classes, "Class count");
  synth->add_option("--dim", syn.dim, "Feature width");
  synth->add_option("--intra", syn.intra, "Edge probability within a class");
  synth->add_option("--inter", syn.inter, "Edge probability across classes");

  for (CLI::App* sub : app.get_subcommands({})) {
    sub->fallthrough();
    sub->footer(
        "Global options (before or after the command):\n"
        "  --config FILE     JSON run configuration; flags win over it\n"
        "  --seed N          run seed\n"
        "  --out DIR         output directory; nothing is written elsewhere\n"
        "  --data-root DIR   directory holding dataset directories\n"
        "Exit codes: 0 ok, 2 configuration error, 3 runtime failure, 4 budget refusal");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitConfig;
  }

  try {
    if (*train) return cmd_train_target(g, dataset, cell, out);
    if (*serve) return cmd_serve(g, sf, out);
    if (*attack) return cmd_attack(g, af, cell, out);
    if (*reconstruct) return cmd_reconstruct(g, dataset, query_dir, out);
    if (*grid) return cmd_grid(g, gf, out, err);
    if (*sweep) return cmd_sweep(g, swf, cell, out, err);
    if (*report) return cmd_report(g, in_dir, out, err);
    if (*synth) return cmd_synth(g, syn, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const LoadError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const BudgetExceeded& e) {
    err << "budget refused: " << e.what() << "\n";
    return kExitBudget;
  } catch (const AttackFailed& e) {
    err << (e.budget_refused() ? "budget refused: " : "attack failed: ") << e.what() << "\n";
    return e.budget_refused() ? kExitBudget : kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace gnnsteal::cli
