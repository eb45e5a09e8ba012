#pragma once

#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "gnnsteal/oracle.hpp"

namespace httplib {
class Server;
}

namespace gnnsteal {

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 0;                                  // 0 picks a free port
  std::size_t max_body_bytes = 256u << 20;       // larger requests get 413
  std::size_t threads = 4;
};

/// HTTP front end for an oracle: POST /query and GET /meta.
/// Errors are answered as {"error":{"code","message"}} with code = HTTP status:
/// 400 malformed request, 413 oversized, 429 budget refusal, 500 internal.
class OracleServer {
 public:
  OracleServer(QueryOracle& oracle, ServerConfig config = {});
  ~OracleServer();
  OracleServer(const OracleServer&) = delete;
  OracleServer& operator=(const OracleServer&) = delete;

  /// Binds the port (throws Error if it is taken) and serves on a background thread.
  void start();
  /// Binds and serves on the calling thread until stop() is called from elsewhere.
  void run();
  void stop();
  int port() const { return port_; }

 private:
  void bind();

  QueryOracle& oracle_;
  ServerConfig config_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

/// Client side of the wire protocol. Budget refusals surface as BudgetExceeded, other error
/// replies as RemoteError.
class RemoteOracle final : public QueryOracle {
 public:
  RemoteOracle(std::string host, int port);

  QueryResponse respond(const Graph& query_graph, std::span<const NodeId> nodes) override;
  OracleMeta meta() const override;

 private:
  std::string host_;
  int port_;
};

/// Parses "host:port" (host defaults to 127.0.0.1 when only a port is given).
std::pair<std::string, int> parse_address(const std::string& address);

}  // namespace gnnsteal
