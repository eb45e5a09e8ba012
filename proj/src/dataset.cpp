#include "gnnsteal/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string_view>

#include <nlohmann/json.hpp>

#include "gnnsteal/errors.hpp"

namespace gnnsteal {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool skip_line(std::string_view line) { return line.empty() || line.front() == '#'; }

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

struct CsvCursor {
  std::string file;
  std::size_t line = 0;

  [[noreturn]] void fail(LoadErrorKind kind, const std::string& detail) const {
    throw LoadError(kind, file, line, detail);
  }

  long long parse_int(std::string_view field) const {
    long long value = 0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc{} || ptr != end) fail(LoadErrorKind::bad_number, "expected integer, got '" + std::string(field) + "'");
    return value;
  }

  double parse_double(std::string_view field) const {
    double value = 0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc{} || ptr != end) fail(LoadErrorKind::bad_number, "expected number, got '" + std::string(field) + "'");
    return value;
  }

  NodeId parse_node(std::string_view field, std::size_t n) const {
    const long long id = parse_int(field);
    if (id < 0 || static_cast<unsigned long long>(id) >= n) {
      fail(LoadErrorKind::node_out_of_range, "node " + std::to_string(id) + " not in 0.." + std::to_string(n - 1));
    }
    return static_cast<NodeId>(id);
  }
};

std::ifstream open_or_throw(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(LoadErrorKind::missing_file, path.string(), 0, "cannot open");
  return in;
}

template <typename Fn>
void for_each_line(const fs::path& path, Fn&& fn) {
  std::ifstream in = open_or_throw(path);
  CsvCursor cursor{path.string(), 0};
  std::string raw;
  while (std::getline(in, raw)) {
    ++cursor.line;
    const std::string_view line = trim(raw);
    if (skip_line(line)) continue;
    fn(cursor, split_csv(line));
  }
}

}  // namespace

Graph load_dataset(const fs::path& dir, const std::string& name) {
  const fs::path meta_path = dir / "meta.json";
  nlohmann::json meta;
  {
    std::ifstream in = open_or_throw(meta_path);
    try {
      in >> meta;
    } catch (const nlohmann::json::exception& e) {
      throw LoadError(LoadErrorKind::malformed, meta_path.string(), 0, e.what());
    }
  }
  std::size_t n = 0, d = 0;
  int classes = 0;
  std::string meta_name;
  try {
    n = meta.at("n").get<std::size_t>();
    d = meta.at("d").get<std::size_t>();
    classes = meta.at("num_classes").get<int>();
    meta_name = meta.value("name", dir.filename().string());
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(LoadErrorKind::malformed, meta_path.string(), 0, e.what());
  }

  Matrix features = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::vector<bool> has_features(n, false);
  for_each_line(dir / "features.csv", [&](const CsvCursor& c, const std::vector<std::string_view>& f) {
    if (f.size() != d + 1) {
      c.fail(LoadErrorKind::malformed, "expected " + std::to_string(d + 1) + " fields, got " + std::to_string(f.size()));
    }
    const NodeId id = c.parse_node(f[0], n);
    for (std::size_t j = 0; j < d; ++j) {
      features(static_cast<Eigen::Index>(id), static_cast<Eigen::Index>(j)) = c.parse_double(f[j + 1]);
    }
    has_features[id] = true;
  });
  if (const auto missing = std::find(has_features.begin(), has_features.end(), false); missing != has_features.end()) {
    throw LoadError(LoadErrorKind::malformed, (dir / "features.csv").string(), 0,
                    "no feature row for node " + std::to_string(missing - has_features.begin()));
  }

  std::vector<int> labels(n, kUnknownLabel);
  for_each_line(dir / "labels.csv", [&](const CsvCursor& c, const std::vector<std::string_view>& f) {
    if (f.size() != 2) c.fail(LoadErrorKind::malformed, "expected node_id,label");
    const NodeId id = c.parse_node(f[0], n);
    const long long label = c.parse_int(f[1]);
    if (label < 0 || label >= classes) {
      c.fail(LoadErrorKind::label_out_of_range, "label " + std::to_string(label) + " not in 0.." + std::to_string(classes - 1));
    }
    labels[id] = static_cast<int>(label);
  });

  std::vector<Edge> edges;
  for_each_line(dir / "edges.csv", [&](const CsvCursor& c, const std::vector<std::string_view>& f) {
    if (f.size() != 2) c.fail(LoadErrorKind::malformed, "expected src,dst");
    edges.push_back({c.parse_node(f[0], n), c.parse_node(f[1], n)});
  });

  return Graph(std::move(features), std::move(edges), std::move(labels), classes,
               name.empty() ? meta_name : name);
}

void save_edges(std::span<const Edge> edges, const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  for (const Edge& e : edges) out << e.u << ',' << e.v << '\n';
}

void save_dataset(const Graph& graph, const fs::path& dir) {
  fs::create_directories(dir);
  nlohmann::json meta{{"n", graph.num_nodes()},
                      {"d", graph.feature_dim()},
                      {"num_classes", graph.num_classes()},
                      {"name", graph.name()}};
  {
    std::ofstream out(dir / "meta.json");
    if (!out) throw Error("cannot write " + (dir / "meta.json").string());
    out << meta.dump(2) << '\n';
  }
  {
    std::ofstream out(dir / "features.csv");
    char buf[32];
    for (Eigen::Index i = 0; i < graph.features().rows(); ++i) {
      out << i;
      for (Eigen::Index j = 0; j < graph.features().cols(); ++j) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), graph.features()(i, j));
        out << ',' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
      }
      out << '\n';
    }
  }
  {
    std::ofstream out(dir / "labels.csv");
    for (std::size_t i = 0; i < graph.num_nodes(); ++i) {
      if (graph.labels()[i] != kUnknownLabel) out << i << ',' << graph.labels()[i] << '\n';
    }
  }
  save_edges(graph.edges(), dir / "edges.csv");
}

fs::path resolve_dataset(const std::string& spec, const fs::path& data_root) {
  const fs::path direct(spec);
  if (fs::exists(direct / "meta.json")) return direct;
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return s;
  };
  if (fs::is_directory(data_root)) {
    for (const auto& entry : fs::directory_iterator(data_root)) {
      if (entry.is_directory() && lower(entry.path().filename().string()) == lower(spec) &&
          fs::exists(entry.path() / "meta.json")) {
        return entry.path();
      }
    }
  }
  throw LoadError(LoadErrorKind::missing_file, (data_root / spec / "meta.json").string(), 0,
                  "dataset '" + spec + "' not found");
}

}  // namespace gnnsteal
