#include "gnnsteal/run_config.hpp"

#include <fstream>
#include <set>
#include <type_traits>

#include "gnnsteal/errors.hpp"

namespace gnnsteal {

using nlohmann::json;

namespace {

// Reads an object's keys once each and rejects whatever was left unread.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  template <class T>
  void read(const char* key, T& out) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    const json& v = j_.at(key);
    try {
      if constexpr (std::is_same_v<T, int>) {
        if (!v.is_number_integer()) throw ConfigError(at(key) + " must be an integer");
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!v.is_number_unsigned()) throw ConfigError(at(key) + " must be a non-negative integer");
      } else if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw ConfigError(at(key) + " must be a number");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError(at(key) + " must be true or false");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError(at(key) + " must be a string");
      }
      out = v.get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(at(key) + ": " + e.what());
    }
  }

  std::string text(const char* key, const std::string& fallback) {
    std::string s = fallback;
    read(key, s);
    return s;
  }

  Section child(const char* key) {
    seen_.insert(key);
    return Section(j_.at(key), at(key));
  }

  const json& raw(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string at(const char* key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string where() const { return path_.empty() ? "configuration" : path_; }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown key " + (path_.empty() ? key : path_ + "." + key));
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class T, class Parse>
std::vector<T> list(Section& s, const char* key, Parse parse) {
  const json& v = s.raw(key);
  if (!v.is_array()) throw ConfigError(s.at(key) + " must be an array");
  std::vector<T> out;
  for (const json& item : v) {
    try {
      out.push_back(parse(item));
    } catch (const json::exception&) {
      throw ConfigError(s.at(key) + " has an element of the wrong type: " + item.dump());
    } catch (const InvalidArgument& e) {
      throw ConfigError(s.at(key) + ": " + e.what());
    }
  }
  return out;
}

template <class Fn>
auto wrap(const std::string& key, Fn fn) {
  try {
    return fn();
  } catch (const InvalidArgument& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

void read_train(Section s, TrainConfig& t) {
  s.read("epochs", t.epochs);
  s.read("batch_size", t.batch_size);
  s.read("lr", t.lr);
  s.read("val_fraction", t.val_fraction);
  s.finish();
}

json train_json(const TrainConfig& t) {
  return {{"epochs", t.epochs}, {"batch_size", t.batch_size}, {"lr", t.lr}, {"val_fraction", t.val_fraction}};
}

}  // namespace

void RunConfig::validate() const {
  try {
    settings.validate();
    settings.attack.validate();
    if (grid.targets.empty() || grid.surrogates.empty() || grid.responses.empty()) {
      throw InvalidArgument("grid lists must not be empty");
    }
    if (sweep.values.empty()) throw InvalidArgument("sweep.values must not be empty");
    static const std::set<std::string> axes{"budget", "sigma", "structure", "hidden", "epochs", "batch"};
    if (!axes.count(sweep.axis)) {
      throw InvalidArgument("unknown sweep axis '" + sweep.axis +
                            "' (expected budget, sigma, structure, hidden, epochs or batch)");
    }
    if (server.port < 0 || server.port > 65535) throw InvalidArgument("serve.port must be in 0..65535");
    if (server.threads < 1) throw InvalidArgument("serve.threads must be >= 1");
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

RunConfig parse_run_config(const json& doc) {
  RunConfig c;
  Section top(doc, "");
  top.read("seed", c.seed);
  c.out = top.text("out", c.out.string());
  c.data_root = top.text("data_root", c.data_root.string());
  if (top.has("datasets")) c.datasets = list<std::string>(top, "datasets", [](const json& j) { return j.get<std::string>(); });

  ExperimentSettings& st = c.settings;
  if (top.has("split")) {
    Section s = top.child("split");
    s.read("target_train_fraction", st.split.target_train_fraction);
    s.read("query_fraction", st.split.query_fraction);
    s.read("test_fraction", st.split.test_fraction);
    s.finish();
  }
  if (top.has("target")) {
    Section s = top.child("target");
    if (s.has("kind")) c.cell.target = wrap("target.kind", [&] { return parse_layer_kind(s.text("kind", "")); });
    s.read("embedding_size", st.embedding_size);
    if (s.has("train")) read_train(s.child("train"), st.target_train);
    s.finish();
  }
  bool response_given = false;
  if (top.has("oracle")) {
    Section s = top.child("oracle");
    if (s.has("response")) {
      c.cell.response = wrap("oracle.response", [&] { return parse_response_type(s.text("response", "")); });
      response_given = true;
    }
    s.read("sigma", st.oracle.noise_sigma);
    if (s.has("budget")) {
      std::size_t b = 0;
      s.read("budget", b);
      st.oracle.budget = b;
    }
    if (s.has("tsne")) {
      Section t = s.child("tsne");
      t.read("perplexity", st.oracle.tsne.perplexity);
      t.read("iterations", st.oracle.tsne.iterations);
      t.read("early_exaggeration", st.oracle.tsne.early_exaggeration);
      t.read("exaggeration_iterations", st.oracle.tsne.exaggeration_iterations);
      t.read("learning_rate", st.oracle.tsne.learning_rate);
      t.finish();
    }
    s.finish();
  }
  if (top.has("attack")) {
    Section s = top.child("attack");
    if (s.has("scenario")) {
      const Scenario sc = wrap("attack.scenario", [&] { return parse_scenario(s.text("scenario", "")); });
      if (response_given && scenario_response(sc) != c.cell.response) {
        throw ConfigError("attack.scenario " + std::string(to_string(sc)) + " contradicts oracle.response " +
                          to_string(c.cell.response));
      }
      c.cell.response = scenario_response(sc);
      c.cell.learn_structure = learns_structure(sc);
    }
    if (s.has("surrogate")) c.cell.surrogate = wrap("attack.surrogate", [&] { return parse_layer_kind(s.text("surrogate", "")); });
    s.read("encoder_hidden", st.attack.encoder_hidden);
    s.read("classifier_hidden", st.attack.classifier_hidden);
    if (s.has("encoder_train")) read_train(s.child("encoder_train"), st.attack.encoder_train);
    if (s.has("classifier_train")) read_train(s.child("classifier_train"), st.attack.classifier_train);
    if (s.has("query_nodes")) {
      std::size_t q = 0;
      s.read("query_nodes", q);
      st.attack.query_nodes = q;
    }
    s.finish();
  }
  if (top.has("structure")) {
    Section s = top.child("structure");
    StructureLearnConfig& sl = st.attack.structure;
    s.read("heads", sl.heads);
    s.read("initial_k", sl.initial_k);
    s.read("edge_cutoff", sl.edge_cutoff);
    s.read("smoothness", sl.regularizer.smoothness);
    s.read("connectivity", sl.regularizer.connectivity);
    s.read("sparsity", sl.regularizer.sparsity);
    s.read("mix", sl.mix);
    s.read("max_iterations", sl.max_iterations);
    s.read("stop_fraction", sl.stop_fraction);
    s.read("hidden", sl.hidden);
    s.read("inner_epochs", sl.inner_epochs);
    s.read("inner_lr", sl.inner_lr);
    s.read("head_steps", sl.head_steps);
    s.read("head_lr", sl.head_lr);
    s.finish();
  }
  if (top.has("grid")) {
    Section s = top.child("grid");
    auto kind = [](const json& j) { return parse_layer_kind(j.get<std::string>()); };
    if (s.has("targets")) c.grid.targets = list<LayerKind>(s, "targets", kind);
    if (s.has("surrogates")) c.grid.surrogates = list<LayerKind>(s, "surrogates", kind);
    if (s.has("responses")) {
      c.grid.responses = list<ResponseType>(s, "responses", [](const json& j) { return parse_response_type(j.get<std::string>()); });
    }
    s.read("learn_structure", c.grid.learn_structure);
    if (s.has("seeds")) {
      st.seeds = list<std::uint64_t>(s, "seeds", [](const json& j) {
        if (!j.is_number_unsigned()) throw InvalidArgument("seeds must be non-negative integers");
        return j.get<std::uint64_t>();
      });
    }
    s.read("record_timing", st.record_timing);
    s.finish();
  }
  if (top.has("sweep")) {
    Section s = top.child("sweep");
    s.read("axis", c.sweep.axis);
    if (s.has("values")) {
      c.sweep.values = list<double>(s, "values", [](const json& j) {
        if (!j.is_number()) throw InvalidArgument("values must be numbers");
        return j.get<double>();
      });
    }
    s.finish();
  }
  if (top.has("serve")) {
    Section s = top.child("serve");
    s.read("host", c.server.host);
    s.read("port", c.server.port);
    s.read("threads", c.server.threads);
    s.read("max_body_bytes", c.server.max_body_bytes);
    s.finish();
  }
  top.finish();
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
  return parse_run_config(doc);
}

json run_config_to_json(const RunConfig& c) {
  const ExperimentSettings& st = c.settings;
  const StructureLearnConfig& sl = st.attack.structure;
  json targets = json::array(), surrogates = json::array(), responses = json::array();
  for (LayerKind k : c.grid.targets) targets.push_back(to_string(k));
  for (LayerKind k : c.grid.surrogates) surrogates.push_back(to_string(k));
  for (ResponseType r : c.grid.responses) responses.push_back(to_string(r));
  json oracle = {{"response", to_string(c.cell.response)},
                 {"sigma", st.oracle.noise_sigma},
                 {"tsne",
                  {{"perplexity", st.oracle.tsne.perplexity},
                   {"iterations", st.oracle.tsne.iterations},
                   {"early_exaggeration", st.oracle.tsne.early_exaggeration},
                   {"exaggeration_iterations", st.oracle.tsne.exaggeration_iterations},
                   {"learning_rate", st.oracle.tsne.learning_rate}}}};
  if (st.oracle.budget) oracle["budget"] = *st.oracle.budget;
  json attack = {{"scenario", to_string(c.cell.scenario())},
                 {"surrogate", to_string(c.cell.surrogate)},
                 {"encoder_hidden", st.attack.encoder_hidden},
                 {"classifier_hidden", st.attack.classifier_hidden},
                 {"encoder_train", train_json(st.attack.encoder_train)},
                 {"classifier_train", train_json(st.attack.classifier_train)}};
  if (st.attack.query_nodes) attack["query_nodes"] = *st.attack.query_nodes;
  return {
      {"seed", c.seed},
      {"out", c.out.string()},
      {"data_root", c.data_root.string()},
      {"datasets", c.datasets},
      {"split",
       {{"target_train_fraction", st.split.target_train_fraction},
        {"query_fraction", st.split.query_fraction},
        {"test_fraction", st.split.test_fraction}}},
      {"target", {{"kind", to_string(c.cell.target)}, {"embedding_size", st.embedding_size}, {"train", train_json(st.target_train)}}},
      {"oracle", oracle},
      {"attack", attack},
      {"structure",
       {{"heads", sl.heads},
        {"initial_k", sl.initial_k},
        {"edge_cutoff", sl.edge_cutoff},
        {"smoothness", sl.regularizer.smoothness},
        {"connectivity", sl.regularizer.connectivity},
        {"sparsity", sl.regularizer.sparsity},
        {"mix", sl.mix},
        {"max_iterations", sl.max_iterations},
        {"stop_fraction", sl.stop_fraction},
        {"hidden", sl.hidden},
        {"inner_epochs", sl.inner_epochs},
        {"inner_lr", sl.inner_lr},
        {"head_steps", sl.head_steps},
        {"head_lr", sl.head_lr}}},
      {"grid",
       {{"targets", targets},
        {"surrogates", surrogates},
        {"responses", responses},
        {"learn_structure", c.grid.learn_structure},
        {"seeds", st.seeds},
        {"record_timing", st.record_timing}}},
      {"sweep", {{"axis", c.sweep.axis}, {"values", c.sweep.values}}},
      {"serve",
       {{"host", c.server.host}, {"port", c.server.port}, {"threads", c.server.threads}, {"max_body_bytes", c.server.max_body_bytes}}},
  };
}

}  // namespace gnnsteal
