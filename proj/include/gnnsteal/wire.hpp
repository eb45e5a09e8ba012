#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gnnsteal/errors.hpp"
#include "gnnsteal/graph.hpp"
#include "gnnsteal/oracle.hpp"

namespace gnnsteal {

/// Body of POST /query: the adversary's query graph and the nodes to answer.
struct QueryRequest {
  std::string response_type;
  std::vector<NodeId> nodes;
  Graph graph;  // features and edges; node ids are local to the request
};

/// Rejected request: maps to {"error":{"code","message"}} with `code` as the HTTP status.
class WireError : public Error {
 public:
  WireError(int code, const std::string& message) : Error(message), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

nlohmann::json request_to_json(const Graph& query_graph, std::span<const NodeId> nodes, ResponseType type);
/// Validates the schema; throws WireError(400) on any violation.
QueryRequest request_from_json(const nlohmann::json& j);

nlohmann::json response_to_json(const QueryResponse& response);
QueryResponse response_from_json(const nlohmann::json& j, ResponseType type);

nlohmann::json meta_to_json(const OracleMeta& meta);
OracleMeta meta_from_json(const nlohmann::json& j);

nlohmann::json error_to_json(int code, const std::string& message);

}  // namespace gnnsteal
