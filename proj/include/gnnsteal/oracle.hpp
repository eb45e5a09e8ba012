#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "gnnsteal/graph.hpp"
#include "gnnsteal/model.hpp"
#include "gnnsteal/tsne.hpp"

namespace gnnsteal {

enum class ResponseType { prediction, embedding, projection };

const char* to_string(ResponseType type);
/// Throws InvalidArgument for anything but "prediction", "embedding" or "projection".
ResponseType parse_response_type(std::string_view text);

/// Response matrix for the requested nodes; row i belongs to order[i].
struct QueryResponse {
  ResponseType type = ResponseType::prediction;
  Matrix matrix;
  std::vector<NodeId> order;

  std::size_t dim() const { return static_cast<std::size_t>(matrix.cols()); }
};

struct OracleConfig {
  ResponseType response_type = ResponseType::prediction;
  double noise_sigma = 0.0;
  std::optional<std::size_t> budget;  // distinct query nodes; nullopt = unlimited
  TsneConfig tsne;
  std::uint64_t noise_seed = 0;

  void validate() const;
};

struct OracleMeta {
  ResponseType response_type = ResponseType::prediction;
  int num_classes = 0;
  std::size_t embedding_size = 0;
  std::optional<std::size_t> budget_remaining;
};

/// What an adversary can reach: responses and metadata, nothing else.
class QueryOracle {
 public:
  virtual ~QueryOracle() = default;

  /// Responses for `nodes` of an adversary-supplied query graph. Throws BudgetExceeded
  /// (without charging) if the request would exceed the budget.
  virtual QueryResponse respond(const Graph& query_graph, std::span<const NodeId> nodes) = 0;
  virtual OracleMeta meta() const = 0;
};

/// In-process oracle around a target model. Safe for concurrent respond() calls: the model
/// is read-only and budget accounting is serialised.
///
/// A query node is identified by its feature row, so re-querying a node in a later request
/// (with any local id) costs nothing. Noise is redrawn per accepted request with seed
/// request_noise_seed(noise_seed, k) for the k-th accepted request.
class Oracle final : public QueryOracle {
 public:
  Oracle(TrainedModel target, OracleConfig config);

  QueryResponse respond(const Graph& query_graph, std::span<const NodeId> nodes) override;
  OracleMeta meta() const override;

 private:
  const TrainedModel target_;
  const OracleConfig config_;
  mutable std::mutex mutex_;
  std::unordered_set<std::uint64_t> seen_;
  std::uint64_t accepted_requests_ = 0;
};

/// R + N(0, sigma^2) entry-wise; sigma = 0 returns R unchanged.
Matrix add_noise(const Matrix& r, double sigma, std::uint64_t seed);

std::uint64_t request_noise_seed(std::uint64_t base, std::uint64_t request_index);

/// Identity used for budget accounting: a hash of the feature row's bytes.
std::uint64_t node_fingerprint(const Eigen::Ref<const RowVector>& features);

/// Number of distinct fingerprints among `nodes` of `graph`.
std::size_t distinct_query_nodes(const Graph& graph, std::span<const NodeId> nodes);

}  // namespace gnnsteal
