#include "gnnsteal/server.hpp"

#include <httplib.h>

#include "gnnsteal/errors.hpp"
#include "gnnsteal/wire.hpp"

namespace gnnsteal {

namespace {

void reply_error(httplib::Response& res, int code, const std::string& message) {
  res.status = code;
  res.set_content(error_to_json(code, message).dump(), "application/json");
}

void handle_query(QueryOracle& oracle, const httplib::Request& req, httplib::Response& res) {
  try {
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::exception& e) {
      throw WireError(400, std::string("request is not valid JSON: ") + e.what());
    }
    const QueryRequest query = request_from_json(body);
    const ResponseType served = oracle.meta().response_type;
    if (query.response_type != to_string(served)) {
      throw WireError(400, "this oracle serves " + std::string(to_string(served)) + " responses, not " +
                               query.response_type);
    }
    const QueryResponse response = oracle.respond(query.graph, query.nodes);
    res.status = 200;
    res.set_content(response_to_json(response).dump(), "application/json");
  } catch (const WireError& e) {
    reply_error(res, e.code(), e.what());
  } catch (const BudgetExceeded& e) {
    res.status = 429;
    nlohmann::json j = error_to_json(429, e.what());
    j["error"]["remaining"] = e.remaining();
    j["error"]["requested"] = e.requested();
    res.set_content(j.dump(), "application/json");
  } catch (const InvalidArgument& e) {
    reply_error(res, 400, e.what());
  } catch (const std::exception& e) {
    reply_error(res, 500, e.what());
  }
}

}  // namespace

OracleServer::OracleServer(QueryOracle& oracle, ServerConfig config)
    : oracle_(oracle), config_(std::move(config)), server_(std::make_unique<httplib::Server>()) {
  const std::size_t threads = std::max<std::size_t>(config_.threads, 1);
  server_->new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
  server_->set_payload_max_length(config_.max_body_bytes);
  // httplib's default sets SO_REUSEPORT, which lets a second server share a busy port silently.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  server_->Post("/query", [this](const httplib::Request& req, httplib::Response& res) { handle_query(oracle_, req, res); });
  server_->Get("/meta", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(meta_to_json(oracle_.meta()).dump(), "application/json");
  });
  server_->set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    const std::string message = res.status == 413 ? "request body exceeds the size limit"
                                : res.status == 404 ? "unknown endpoint"
                                                    : httplib::status_message(res.status);
    reply_error(res, res.status, message);
  });
}

OracleServer::~OracleServer() { stop(); }

void OracleServer::bind() {
  if (config_.port == 0) {
    port_ = server_->bind_to_any_port(config_.host);
    if (port_ < 0) throw Error("cannot bind " + config_.host);
  } else {
    if (!server_->bind_to_port(config_.host, config_.port)) {
      throw Error("cannot bind " + config_.host + ":" + std::to_string(config_.port) + " (port in use?)");
    }
    port_ = config_.port;
  }
}

void OracleServer::start() {
  bind();
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void OracleServer::run() {
  bind();
  server_->listen_after_bind();
}

void OracleServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::pair<std::string, int> parse_address(const std::string& address) {
  std::string host = "127.0.0.1";
  std::string port = address;
  if (const auto colon = address.rfind(':'); colon != std::string::npos) {
    host = address.substr(0, colon);
    port = address.substr(colon + 1);
  }
  if (host.rfind("http://", 0) == 0) host = host.substr(7);
  try {
    std::size_t used = 0;
    const int p = std::stoi(port, &used);
    if (used != port.size() || p <= 0 || p > 65535) throw std::out_of_range("port");
    return {host.empty() ? "127.0.0.1" : host, p};
  } catch (const std::exception&) {
    throw InvalidArgument("bad oracle address '" + address + "' (expected host:port)");
  }
}

RemoteOracle::RemoteOracle(std::string host, int port) : host_(std::move(host)), port_(port) {}

namespace {

nlohmann::json checked_body(const httplib::Result& res, const std::string& what) {
  if (!res) throw Error(what + ": " + httplib::to_string(res.error()));
  nlohmann::json body;
  try {
    body = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception&) {
    throw RemoteError(res->status, what + ": HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    const auto& err = body.value("error", nlohmann::json::object());
    const int code = err.value("code", res->status);
    const std::string message = err.value("message", std::string("HTTP ") + std::to_string(res->status));
    if (code == 429) throw BudgetExceeded(err.value("remaining", std::size_t{0}), err.value("requested", std::size_t{0}));
    throw RemoteError(code, message);
  }
  return body;
}

}  // namespace

OracleMeta RemoteOracle::meta() const {
  httplib::Client client(host_, port_);
  return meta_from_json(checked_body(client.Get("/meta"), "GET /meta"));
}

QueryResponse RemoteOracle::respond(const Graph& query_graph, std::span<const NodeId> nodes) {
  const ResponseType type = meta().response_type;
  httplib::Client client(host_, port_);
  client.set_read_timeout(3600, 0);
  client.set_write_timeout(600, 0);
  const std::string body = request_to_json(query_graph, nodes, type).dump();
  return response_from_json(checked_body(client.Post("/query", body, "application/json"), "POST /query"), type);
}

}  // namespace gnnsteal
