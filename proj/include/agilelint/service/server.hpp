#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <json.hpp>

#include "agilelint/engine/engine.hpp"

namespace httplib {
class Server;
}

namespace agilelint::service {

/// Service settings: `{"cache_ttl_seconds":int,"port":int,
/// "severity_weights":{"Low","Medium","High"}}`. Project keys may sit in the
/// same file and are ignored here.
struct ServiceConfig {
  std::int64_t cache_ttl_seconds = 900;
  int port = 8080;
  std::optional<scoring::SeverityWeights> severity_weights;
};

/// Throws Error(InvalidConfig).
ServiceConfig load_service_config(const nlohmann::json& document);

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::optional<std::string> static_dir;
};

/// JSON API over one Engine. Reads are served from an immutable ScoreMatrix
/// snapshot that is swapped whole after each re-evaluation, so one response
/// never mixes metric revisions.
class ApiServer {
 public:
  ApiServer(engine::Engine& engine, ServerOptions options);
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Re-runs every metric and publishes the new matrix.
  void refresh(bool bypass_cache);

  /// Binds the listening socket; returns the bound port.
  int bind();
  /// Serves on the calling thread until stop(); call bind() first.
  void serve();
  /// bind(), then serve() on a background thread.
  int start();
  void stop();

  std::shared_ptr<const engine::ScoreMatrix> matrix() const;

 private:
  void routes();

  engine::Engine& engine_;
  ServerOptions options_;
  std::unique_ptr<httplib::Server> http_;
  std::thread thread_;
  mutable std::mutex matrix_mutex_;
  std::shared_ptr<const engine::ScoreMatrix> matrix_;
  std::string last_error_;
  std::mutex refresh_mutex_;
};

}  // namespace agilelint::service
