#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "dsage/service/service.hpp"

namespace dsage::api {

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path store_dir = "store";
  std::string cors_origin;         // empty: no CORS headers
  std::filesystem::path ui_dir;    // empty: no static assets
};

// "host:port"; throws std::invalid_argument.
std::pair<std::string, int> parse_listen(const std::string& text);

// key = value lines; '#' starts a comment. Keys: listen, store,
// cors_origin, ui_dir. Throws std::runtime_error on unknown keys.
void apply_config_file(ServerConfig& cfg, const std::filesystem::path& path);

// DSAGE_LISTEN, DSAGE_STORE, DSAGE_CORS_ORIGIN, DSAGE_UI_DIR.
void apply_env_overrides(ServerConfig& cfg);

class HttpServer {
 public:
  HttpServer(ConsultationService& service, ServerConfig config);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds the configured address (port 0 picks a free port). False on failure.
  bool bind();
  int port() const noexcept;

  // Serves until stop(). Requires a successful bind().
  bool listen();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dsage::api
