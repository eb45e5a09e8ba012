#include "gnnsteal/wire.hpp"

namespace gnnsteal {

namespace {

[[noreturn]] void bad_request(const std::string& message) { throw WireError(400, message); }

const nlohmann::json& field(const nlohmann::json& j, const char* name) {
  if (!j.is_object()) bad_request("request body must be a JSON object");
  const auto it = j.find(name);
  if (it == j.end()) bad_request(std::string("missing field '") + name + "'");
  return *it;
}

std::size_t index_value(const nlohmann::json& v, const char* what) {
  if (!v.is_number_integer() || v.get<long long>() < 0) bad_request(std::string(what) + " must be non-negative integers");
  return v.get<std::size_t>();
}

}  // namespace

nlohmann::json request_to_json(const Graph& query_graph, std::span<const NodeId> nodes, ResponseType type) {
  nlohmann::json features = nlohmann::json::array();
  const Matrix& x = query_graph.features();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    features.push_back(std::vector<double>(x.row(i).data(), x.row(i).data() + x.cols()));
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : query_graph.edges()) edges.push_back({e.u, e.v});
  return {{"response_type", to_string(type)},
          {"nodes", std::vector<NodeId>(nodes.begin(), nodes.end())},
          {"features", std::move(features)},
          {"edges", std::move(edges)}};
}

QueryRequest request_from_json(const nlohmann::json& j) {
  QueryRequest req;
  const auto& type = field(j, "response_type");
  if (!type.is_string()) bad_request("response_type must be a string");
  req.response_type = type.get<std::string>();
  try {
    parse_response_type(req.response_type);
  } catch (const InvalidArgument& e) {
    bad_request(e.what());
  }

  const auto& nodes = field(j, "nodes");
  if (!nodes.is_array() || nodes.empty()) bad_request("nodes must be a non-empty array");
  for (const auto& v : nodes) req.nodes.push_back(index_value(v, "nodes"));

  const auto& features = field(j, "features");
  if (!features.is_array() || features.empty()) bad_request("features must be a non-empty array of rows");
  const std::size_t d = features.front().is_array() ? features.front().size() : 0;
  if (d == 0) bad_request("feature rows must be non-empty arrays");
  Matrix x(static_cast<Eigen::Index>(features.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto& row = features[i];
    if (!row.is_array() || row.size() != d) bad_request("feature row " + std::to_string(i) + " has the wrong width");
    for (std::size_t k = 0; k < d; ++k) {
      if (!row[k].is_number()) bad_request("feature values must be numbers");
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k].get<double>();
    }
  }
  const std::size_t n = features.size();

  std::vector<Edge> edges;
  const auto& edge_list = field(j, "edges");
  if (!edge_list.is_array()) bad_request("edges must be an array of pairs");
  for (const auto& e : edge_list) {
    if (!e.is_array() || e.size() != 2) bad_request("edges must be an array of pairs");
    const std::size_t u = index_value(e[0], "edge endpoints");
    const std::size_t v = index_value(e[1], "edge endpoints");
    if (u >= n || v >= n) bad_request("edge endpoint out of range");
    edges.push_back({u, v});
  }
  for (NodeId v : req.nodes)
    if (v >= n) bad_request("node " + std::to_string(v) + " out of range (n=" + std::to_string(n) + ")");
  req.graph = Graph(std::move(x), std::move(edges), std::vector<int>(n, kUnknownLabel), 0, "query");
  return req;
}

nlohmann::json response_to_json(const QueryResponse& response) {
  nlohmann::json vectors = nlohmann::json::array();
  const Matrix& m = response.matrix;
  for (Eigen::Index i = 0; i < m.rows(); ++i) vectors.push_back(std::vector<double>(m.row(i).data(), m.row(i).data() + m.cols()));
  return {{"dim", response.dim()}, {"order", response.order}, {"vectors", std::move(vectors)}};
}

QueryResponse response_from_json(const nlohmann::json& j, ResponseType type) {
  try {
    QueryResponse r;
    r.type = type;
    const auto dim = j.at("dim").get<std::size_t>();
    r.order = j.at("order").get<std::vector<NodeId>>();
    const auto& vectors = j.at("vectors");
    if (vectors.size() != r.order.size()) throw Error("response rows do not match order");
    r.matrix.resize(static_cast<Eigen::Index>(vectors.size()), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      const auto row = vectors[i].get<std::vector<double>>();
      if (row.size() != dim) throw Error("response row has the wrong width");
      for (std::size_t k = 0; k < dim; ++k) r.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k];
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed oracle response: ") + e.what());
  }
}

nlohmann::json meta_to_json(const OracleMeta& meta) {
  nlohmann::json j = {{"num_classes", meta.num_classes},
                      {"embedding_size", meta.embedding_size},
                      {"response_type", to_string(meta.response_type)}};
  j["budget_remaining"] = meta.budget_remaining ? nlohmann::json(*meta.budget_remaining) : nlohmann::json(nullptr);
  return j;
}

OracleMeta meta_from_json(const nlohmann::json& j) {
  try {
    OracleMeta m;
    m.num_classes = j.at("num_classes").get<int>();
    m.embedding_size = j.at("embedding_size").get<std::size_t>();
    m.response_type = parse_response_type(j.at("response_type").get<std::string>());
    if (!j.at("budget_remaining").is_null()) m.budget_remaining = j.at("budget_remaining").get<std::size_t>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed oracle metadata: ") + e.what());
  }
}

nlohmann::json error_to_json(int code, const std::string& message) {
  return {{"error", {{"code", code}, {"message", message}}}};
}

}  // namespace gnnsteal
