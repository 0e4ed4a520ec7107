#include "http_fixture.hpp"

#include <stdexcept>

#include <httplib.h>

namespace dsage::testing {

HttpReply http_request(int port, const std::string& method, const std::string& path,
                       const std::string& body,
                       const std::map<std::string, std::string>& headers) {
  httplib::Client cli("127.0.0.1", port);
  cli.set_connection_timeout(5);
  cli.set_read_timeout(30);
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);

  httplib::Result res;
  if (method == "GET") {
    res = cli.Get(path, h);
  } else if (method == "POST") {
    res = cli.Post(path, h, body, "application/json");
  } else if (method == "PUT") {
    res = cli.Put(path, h, body, "application/json");
  } else if (method == "DELETE") {
    res = cli.Delete(path, h, body, "application/json");
  } else if (method == "OPTIONS") {
    res = cli.Options(path, h);
  } else {
    throw std::invalid_argument("unsupported method " + method);
  }
  HttpReply out;
  if (!res) return out;
  out.status = res->status;
  out.body = res->body;
  for (const auto& [k, v] : res->headers) out.headers[k] = v;
  return out;
}

LiveServer::LiveServer(const KnowledgeBase& kb) {
  store_ = std::make_unique<FileStore>(dir_.path() / "store");
  seed_version_ = ensure_initialized(*store_, kb).first;
  service_ = std::make_unique<api::ConsultationService>(*store_);
  api::ServerConfig cfg;
  cfg.host = "127.0.0.1";
  cfg.port = 0;
  cfg.store_dir = store_->root();
  server_ = std::make_unique<api::HttpServer>(*service_, cfg);
  if (!server_->bind()) throw std::runtime_error("cannot bind loopback port");
  thread_ = std::thread([this] { server_->listen(); });
  for (int i = 0; i < 500 && !server_->running(); ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
}

LiveServer::~LiveServer() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

int LiveServer::port() const { return server_->port(); }

}  // namespace dsage::testing
