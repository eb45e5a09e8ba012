#include "gnnsteal/oracle.hpp"

#include <cstring>

#include "gnnsteal/errors.hpp"
#include "gnnsteal/random.hpp"

namespace gnnsteal {

const char* to_string(ResponseType type) {
  switch (type) {
    case ResponseType::prediction: return "prediction";
    case ResponseType::embedding: return "embedding";
    case ResponseType::projection: return "projection";
  }
  return "?";
}

ResponseType parse_response_type(std::string_view text) {
  if (text == "prediction") return ResponseType::prediction;
  if (text == "embedding") return ResponseType::embedding;
  if (text == "projection") return ResponseType::projection;
  throw InvalidArgument("unknown response_type '" + std::string(text) + "' (expected prediction, embedding, projection)");
}

void OracleConfig::validate() const {
  if (!(noise_sigma >= 0.0)) throw InvalidArgument("noise sigma must be >= 0");
  if (!(tsne.perplexity > 0.0)) throw InvalidArgument("t-SNE perplexity must be positive");
}

Matrix add_noise(const Matrix& r, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw InvalidArgument("noise sigma must be >= 0");
  if (sigma == 0.0) return r;
  Rng rng(derive_seed(seed, {0x4015e}));
  std::normal_distribution<double> noise(0.0, sigma);
  Matrix out = r;
  for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] += noise(rng);
  return out;
}

std::uint64_t request_noise_seed(std::uint64_t base, std::uint64_t request_index) {
  return derive_seed(base, {0x2e9, request_index});
}

std::uint64_t node_fingerprint(const Eigen::Ref<const RowVector>& features) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Eigen::Index j = 0; j < features.size(); ++j) {
    double v = features(j);
    if (v == 0.0) v = 0.0;  // fold -0.0 into +0.0
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    h = mix_seed(h ^ bits);
  }
  return h;
}

std::size_t distinct_query_nodes(const Graph& graph, std::span<const NodeId> nodes) {
  std::unordered_set<std::uint64_t> ids;
  for (NodeId v : nodes) ids.insert(node_fingerprint(graph.features().row(static_cast<Eigen::Index>(v))));
  return ids.size();
}

Oracle::Oracle(TrainedModel target, OracleConfig config) : target_(std::move(target)), config_(std::move(config)) {
  config_.validate();
}

OracleMeta Oracle::meta() const {
  OracleMeta m;
  m.response_type = config_.response_type;
  m.num_classes = static_cast<int>(target_.config.output_size());
  m.embedding_size = target_.config.embedding_size();
  std::lock_guard lock(mutex_);
  if (config_.budget) m.budget_remaining = *config_.budget - seen_.size();
  return m;
}

QueryResponse Oracle::respond(const Graph& query_graph, std::span<const NodeId> nodes) {
  if (nodes.empty()) throw InvalidArgument("query has no nodes");
  if (query_graph.feature_dim() != target_.config.widths.front()) {
    throw InvalidArgument("query features have width " + std::to_string(query_graph.feature_dim()) + ", oracle expects " +
                          std::to_string(target_.config.widths.front()));
  }
  for (NodeId v : nodes) {
    if (v >= query_graph.num_nodes()) {
      throw InvalidArgument("query node " + std::to_string(v) + " out of range (n=" +
                            std::to_string(query_graph.num_nodes()) + ")");
    }
  }
  if (config_.response_type == ResponseType::projection &&
      (nodes.size() < 4 || config_.tsne.perplexity >= static_cast<double>(nodes.size()))) {
    throw InvalidArgument("projection queries need more than perplexity (" + std::to_string(config_.tsne.perplexity) +
                          ") nodes, got " + std::to_string(nodes.size()));
  }

  std::vector<std::uint64_t> ids;
  ids.reserve(nodes.size());
  for (NodeId v : nodes) ids.push_back(node_fingerprint(query_graph.features().row(static_cast<Eigen::Index>(v))));

  std::uint64_t request_index = 0;
  {
    std::lock_guard lock(mutex_);
    std::unordered_set<std::uint64_t> fresh;
    for (std::uint64_t id : ids)
      if (!seen_.count(id)) fresh.insert(id);
    if (config_.budget) {
      const std::size_t remaining = *config_.budget - seen_.size();
      if (fresh.size() > remaining) throw BudgetExceeded(remaining, fresh.size());
    }
    seen_.insert(fresh.begin(), fresh.end());
    request_index = accepted_requests_++;
  }

  QueryResponse response;
  response.type = config_.response_type;
  response.order.assign(nodes.begin(), nodes.end());
  switch (config_.response_type) {
    case ResponseType::prediction:
      response.matrix = forward(target_, query_graph, nodes, Head::posterior);
      break;
    case ResponseType::embedding:
      response.matrix = forward(target_, query_graph, nodes, Head::embedding);
      break;
    case ResponseType::projection:
      response.matrix = tsne_project(forward(target_, query_graph, nodes, Head::embedding), config_.tsne);
      break;
  }
  if (config_.noise_sigma > 0.0) {
    response.matrix = add_noise(response.matrix, config_.noise_sigma, request_noise_seed(config_.noise_seed, request_index));
  }
  return response;
}

}  // namespace gnnsteal
