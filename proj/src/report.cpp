#include "gnnsteal/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "gnnsteal/errors.hpp"
#include "gnnsteal/svg.hpp"

namespace gnnsteal {

namespace fs = std::filesystem;

namespace {

const char* const kResultColumns =
    "dataset,scenario,response,target_kind,surrogate_kind,seed,target_acc,surrogate_acc,fidelity,queries_used,"
    "wall_seconds";

std::string fixed(double v, int digits = 6) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string general(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string result_row(const RunRecord& r) {
  return csv_field(r.dataset) + ',' + csv_field(r.scenario) + ',' + csv_field(r.response) + ',' +
         csv_field(r.target_kind) + ',' + csv_field(r.surrogate_kind) + ',' + std::to_string(r.seed) + ',' +
         fixed(r.target_acc) + ',' + fixed(r.surrogate_acc) + ',' + fixed(r.fidelity) + ',' +
         std::to_string(r.queries_used) + ',' + fixed(r.wall_seconds, 3);
}

std::string cell_key(const AggregateRecord& a) {
  return csv_field(a.dataset) + ',' + csv_field(a.scenario) + ',' + csv_field(a.response) + ',' +
         csv_field(a.target_kind) + ',' + csv_field(a.surrogate_kind);
}

std::string stats(const AggregateRecord& a) {
  const bool any = a.accuracy.count > 0;
  return std::to_string(a.accuracy.count) + ',' + std::to_string(a.failures) + ',' +
         (any ? fixed(a.target_acc.mean) : "") + ',' + (any ? fixed(a.accuracy.mean) : "") + ',' +
         (any ? fixed(a.accuracy.std) : "") + ',' + (any ? fixed(a.fidelity.mean) : "") + ',' +
         (any ? fixed(a.fidelity.std) : "");
}

std::string file_token(const std::string& text) {
  std::string out;
  for (char c : text) out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  return out;
}

void write_file(const fs::path& path, const std::string& body, std::vector<fs::path>& written) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << body;
  out.close();
  if (!out) throw Error("failed writing " + path.string());
  written.push_back(path);
}

template <class T>
void add_unique(std::vector<T>& v, const T& x) {
  if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

double number(const std::string& s, const std::string& column) {
  if (s.empty()) return kNoValue;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw ConfigError("bad number '" + s + "' in column " + column);
  return v;
}

std::uint64_t integer(const std::string& s, const std::string& column) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size()) throw ConfigError("bad integer '" + s + "' in column " + column);
  return v;
}

using Table = std::vector<std::map<std::string, std::string>>;

Table read_table(const fs::path& path, const std::vector<std::string>& required) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const auto rows = parse_csv(buf.str());
  if (rows.empty()) throw ConfigError(path.string() + ": missing header");
  const auto& header = rows.front();
  for (const std::string& col : required) {
    if (std::find(header.begin(), header.end(), col) == header.end()) {
      throw ConfigError(path.string() + ": missing column " + col);
    }
  }
  Table table;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != header.size()) {
      throw ConfigError(path.string() + ": row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                        " fields, header has " + std::to_string(header.size()));
    }
    std::map<std::string, std::string> row;
    for (std::size_t c = 0; c < header.size(); ++c) row[header[c]] = rows[i][c];
    table.push_back(std::move(row));
  }
  return table;
}

RunRecord record_from(std::map<std::string, std::string>& row) {
  RunRecord r;
  r.dataset = row["dataset"];
  r.scenario = row["scenario"];
  r.response = row["response"];
  r.target_kind = row["target_kind"];
  r.surrogate_kind = row["surrogate_kind"];
  r.seed = integer(row["seed"], "seed");
  r.target_acc = number(row["target_acc"], "target_acc");
  r.surrogate_acc = number(row["surrogate_acc"], "surrogate_acc");
  r.fidelity = number(row["fidelity"], "fidelity");
  if (!row["queries_used"].empty()) r.queries_used = integer(row["queries_used"], "queries_used");
  r.wall_seconds = number(row["wall_seconds"], "wall_seconds");
  r.axis = row["axis"];
  r.value = number(row["value"], "value");
  r.error = row["error"];
  return r;
}

void emit_heatmaps(const MetricsReport& report, const fs::path& dir, std::vector<fs::path>& written) {
  std::vector<std::string> datasets, scenarios;
  for (const AggregateRecord& a : report.aggregates) {
    if (!a.axis.empty()) continue;
    add_unique(datasets, a.dataset);
    add_unique(scenarios, a.scenario + " " + a.response);
  }
  for (const std::string& dataset : datasets) {
    for (const std::string& sr : scenarios) {
      std::vector<std::string> targets, surrogates;
      for (const AggregateRecord& a : report.aggregates) {
        if (!a.axis.empty() || a.dataset != dataset || a.scenario + " " + a.response != sr) continue;
        add_unique(targets, a.target_kind);
        add_unique(surrogates, a.surrogate_kind);
      }
      if (targets.empty()) continue;
      Matrix acc = Matrix::Constant(static_cast<Eigen::Index>(targets.size()), static_cast<Eigen::Index>(surrogates.size()), kNoValue);
      Matrix fid = acc;
      for (const AggregateRecord& a : report.aggregates) {
        if (!a.axis.empty() || a.dataset != dataset || a.scenario + " " + a.response != sr || a.accuracy.count == 0) continue;
        const auto r = std::find(targets.begin(), targets.end(), a.target_kind) - targets.begin();
        const auto c = std::find(surrogates.begin(), surrogates.end(), a.surrogate_kind) - surrogates.begin();
        acc(r, c) = a.accuracy.mean;
        fid(r, c) = a.fidelity.mean;
      }
      for (int which = 0; which < 2; ++which) {
        const char* metric = which == 0 ? "accuracy" : "fidelity";
        const std::string title = dataset + " " + sr + " " + metric + " (rows: target, cols: surrogate)";
        write_file(dir / ("heatmap_" + file_token(dataset) + "_" + file_token(sr) + "_" + metric + ".svg"),
                   heatmap_svg(title, targets, surrogates, which == 0 ? acc : fid), written);
      }
    }
  }
}

void emit_curves(const MetricsReport& report, const fs::path& dir, std::vector<fs::path>& written) {
  // One chart per (axis, dataset, scenario, response); one accuracy and one fidelity series per model pair.
  std::vector<std::string> charts;
  for (const AggregateRecord& a : report.aggregates)
    if (!a.axis.empty()) add_unique(charts, a.axis + "|" + a.dataset + "|" + a.scenario + "|" + a.response);
  for (const std::string& chart : charts) {
    std::vector<std::string> pairs;
    std::string axis, title;
    for (const AggregateRecord& a : report.aggregates) {
      if (a.axis + "|" + a.dataset + "|" + a.scenario + "|" + a.response != chart) continue;
      add_unique(pairs, a.target_kind + "->" + a.surrogate_kind);
      axis = a.axis;
      title = a.dataset + " " + a.scenario + " " + a.response;
    }
    std::vector<SvgSeries> series;
    for (const std::string& pair : pairs) {
      SvgSeries acc{pair + " acc", {}, {}, {}}, fid{pair + " fid", {}, {}, {}};
      for (const AggregateRecord& a : report.aggregates) {
        if (a.axis + "|" + a.dataset + "|" + a.scenario + "|" + a.response != chart) continue;
        if (a.target_kind + "->" + a.surrogate_kind != pair || a.accuracy.count == 0) continue;
        acc.xs.push_back(a.value);
        acc.ys.push_back(a.accuracy.mean);
        acc.errors.push_back(a.accuracy.std);
        fid.xs.push_back(a.value);
        fid.ys.push_back(a.fidelity.mean);
        fid.errors.push_back(a.fidelity.std);
      }
      series.push_back(std::move(acc));
      series.push_back(std::move(fid));
    }
    std::string name = "curve_";
    for (char c : chart) name.push_back(c == '|' ? '_' : c);
    write_file(dir / (file_token(name) + ".svg"), line_chart_svg(title + " vs " + axis, axis, "mean +- std", series),
               written);
  }
}

}  // namespace

std::string csv_field(const std::string& raw) {
  if (raw.find_first_of(",\"\n\r") == std::string::npos) return raw;
  std::string out = "\"";
  for (char c : raw) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw ConfigError("CSV ends inside a quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<fs::path> emit_report(const MetricsReport& report, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw Error("cannot create output directory " + out_dir.string());

  std::vector<fs::path> written;
  std::string results = std::string(kResultColumns) + "\n";
  std::string curves = std::string("axis,value,") + kResultColumns + "\n";
  std::string failures = "dataset,scenario,response,target_kind,surrogate_kind,seed,axis,value,error\n";
  for (const RunRecord& r : report.records) {
    if (!r.ok()) {
      failures += csv_field(r.dataset) + ',' + csv_field(r.scenario) + ',' + csv_field(r.response) + ',' +
                  csv_field(r.target_kind) + ',' + csv_field(r.surrogate_kind) + ',' + std::to_string(r.seed) + ',' +
                  csv_field(r.axis) + ',' + general(r.value) + ',' + csv_field(r.error) + '\n';
    } else if (r.axis.empty()) {
      results += result_row(r) + '\n';
    } else {
      curves += csv_field(r.axis) + ',' + general(r.value) + ',' + result_row(r) + '\n';
    }
  }

  std::string aggregates =
      "dataset,scenario,response,target_kind,surrogate_kind,runs,failures,target_acc_mean,acc_mean,acc_std,fid_mean,"
      "fid_std,pearson_r\n";
  std::string curve_aggregates =
      "axis,value,dataset,scenario,response,target_kind,surrogate_kind,runs,failures,target_acc_mean,acc_mean,acc_std,"
      "fid_mean,fid_std\n";
  for (const AggregateRecord& a : report.aggregates) {
    if (a.axis.empty()) {
      aggregates += cell_key(a) + ',' + stats(a) + ',' + fixed(a.pearson_r) + '\n';
    } else {
      curve_aggregates += csv_field(a.axis) + ',' + general(a.value) + ',' + cell_key(a) + ',' + stats(a) + '\n';
    }
  }
  std::string pearson = "target_kind,dataset,cells,pearson_r\n";
  for (const PearsonRecord& p : report.pearson) {
    pearson += csv_field(p.target_kind) + ',' + csv_field(p.dataset) + ',' + std::to_string(p.cells) + ',' +
               fixed(p.r) + '\n';
  }

  write_file(out_dir / "results.csv", results, written);
  write_file(out_dir / "aggregates.csv", aggregates, written);
  write_file(out_dir / "curves.csv", curves, written);
  write_file(out_dir / "curve_aggregates.csv", curve_aggregates, written);
  write_file(out_dir / "pearson.csv", pearson, written);
  write_file(out_dir / "failures.csv", failures, written);
  emit_heatmaps(report, out_dir, written);
  emit_curves(report, out_dir, written);
  return written;
}

MetricsReport load_report(const fs::path& dir) {
  const std::vector<std::string> base{"dataset",     "scenario",      "response", "target_kind",
                                      "surrogate_kind", "seed"};
  std::vector<std::string> results_cols = base;
  for (const char* c : {"target_acc", "surrogate_acc", "fidelity", "queries_used", "wall_seconds"}) results_cols.push_back(c);

  std::vector<RunRecord> records;
  for (auto& row : read_table(dir / "results.csv", results_cols)) records.push_back(record_from(row));
  if (fs::exists(dir / "curves.csv")) {
    std::vector<std::string> cols = results_cols;
    cols.push_back("axis");
    cols.push_back("value");
    for (auto& row : read_table(dir / "curves.csv", cols)) records.push_back(record_from(row));
  }
  if (fs::exists(dir / "failures.csv")) {
    std::vector<std::string> cols = base;
    cols.push_back("error");
    for (auto& row : read_table(dir / "failures.csv", cols)) {
      RunRecord r = record_from(row);
      if (r.error.empty()) r.error = "failed";
      records.push_back(std::move(r));
    }
  }
  return build_report(std::move(records));
}

}  // namespace gnnsteal
