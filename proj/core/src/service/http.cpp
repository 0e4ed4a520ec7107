#include "dsage/service/http.hpp"

#include <httplib.h>

#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include "dsage/error.hpp"
#include "dsage/service/json.hpp"

namespace dsage::api {

std::pair<std::string, int> parse_listen(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
    throw std::invalid_argument("listen address must be host:port, got '" + text + "'");
  }
  const std::string host = text.substr(0, colon);
  const std::string port_text = text.substr(colon + 1);
  std::size_t used = 0;
  int port = -1;
  try {
    port = std::stoi(port_text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != port_text.size() || port < 0 || port > 65535) {
    throw std::invalid_argument("bad port in listen address '" + text + "'");
  }
  return {host, port};
}

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void set_key(ServerConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "listen") {
    std::tie(cfg.host, cfg.port) = parse_listen(value);
  } else if (key == "store") {
    cfg.store_dir = value;
  } else if (key == "cors_origin") {
    cfg.cors_origin = value;
  } else if (key == "ui_dir") {
    cfg.ui_dir = value;
  } else {
    throw std::runtime_error("unknown config key '" + key + "'");
  }
}

}  // namespace

void apply_config_file(ServerConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected key = value");
    }
    set_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void apply_env_overrides(ServerConfig& cfg) {
  static constexpr std::pair<const char*, const char*> vars[] = {
      {"DSAGE_LISTEN", "listen"},
      {"DSAGE_STORE", "store"},
      {"DSAGE_CORS_ORIGIN", "cors_origin"},
      {"DSAGE_UI_DIR", "ui_dir"},
  };
  for (const auto& [env, key] : vars) {
    if (const char* v = std::getenv(env); v != nullptr && *v != '\0') set_key(cfg, key, v);
  }
}

// ---------------------------------------------------------------------------

namespace {

struct ApiError {
  int status;
  std::string code;
  std::string message;
};

ApiError map_error(const Error& e) {
  switch (e.code()) {
    case ErrorCode::unknown_indicator:
    case ErrorCode::illegal_state:
    case ErrorCode::cf_out_of_range:
    case ErrorCode::invalid_kb:
    case ErrorCode::empty_premises:
    case ErrorCode::reference_integrity:
      return {422, std::string(to_string(e.code())), e.what()};
    case ErrorCode::unknown_rule:
    case ErrorCode::unknown_session:
    case ErrorCode::unknown_hypothesis:
    case ErrorCode::missing_snapshot:
      return {404, std::string(to_string(e.code())), e.what()};
    case ErrorCode::kb_conflict:
      return {409, "kb_conflict", e.what()};
    case ErrorCode::digest_mismatch:
    case ErrorCode::parse_error:
    case ErrorCode::io_error:
      return {500, "storage_error", e.what()};
  }
  return {500, "internal", e.what()};
}

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(dump_fixed(body), "application/json");
}

void send_error(httplib::Response& res, const ApiError& err) {
  send_json(res, err.status, Json{{"error", {{"code", err.code}, {"message", err.message}}}});
}

Json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  try {
    return Json::parse(req.body);
  } catch (const Json::parse_error& e) {
    throw BadRequest(std::string("malformed JSON: ") + e.what());
  }
}

// Runs a handler and converts every failure into a coded error body.
template <typename F>
void guarded(httplib::Response& res, F&& f) {
  try {
    f();
  } catch (const BadRequest& e) {
    send_error(res, {400, "bad_request", e.what()});
  } catch (const Error& e) {
    send_error(res, map_error(e));
  } catch (const std::exception& e) {
    send_error(res, {500, "internal", e.what()});
  }
}

std::string unquote_etag(std::string tag) {
  if (tag.size() >= 2 && tag.front() == '"' && tag.back() == '"') return tag.substr(1, tag.size() - 2);
  return tag;
}

std::string require_if_match(const httplib::Request& req) {
  if (!req.has_header("If-Match")) throw BadRequest("KB edits require an If-Match header");
  return unquote_etag(req.get_header_value("If-Match"));
}

}  // namespace

struct HttpServer::Impl {
  ConsultationService& service;
  ServerConfig config;
  httplib::Server server;
  int bound_port = -1;

  Impl(ConsultationService& s, ServerConfig c) : service(s), config(std::move(c)) { routes(); }

  void routes() {
    auto& svc = service;

    server.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, Json{{"status", "ok"}});
    });

    server.Get("/api/kb", [&svc](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] {
        const KbView view = svc.current_kb();
        res.set_header("ETag", "\"" + view.version + "\"");
        send_json(res, 200, kb_to_json(*view.kb, view.version));
      });
    });

    server.Put(R"(/api/kb/rules/([A-Za-z_][A-Za-z0-9_\-]*))",
               [&svc](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] {
                   const std::string if_match = require_if_match(req);
                   Rule rule = rule_from_json(parse_body(req), req.matches[1]);
                   const std::string version = svc.put_rule(if_match, std::move(rule));
                   res.set_header("ETag", "\"" + version + "\"");
                   send_json(res, 200, Json{{"version", version}, {"rule", std::string(req.matches[1])}});
                 });
               });

    server.Delete(R"(/api/kb/rules/([A-Za-z_][A-Za-z0-9_\-]*))",
                  [&svc](const httplib::Request& req, httplib::Response& res) {
                    guarded(res, [&] {
                      const std::string if_match = require_if_match(req);
                      const std::string version = svc.delete_rule(if_match, req.matches[1]);
                      res.set_header("ETag", "\"" + version + "\"");
                      send_json(res, 200, Json{{"version", version}, {"deleted", std::string(req.matches[1])}});
                    });
                  });

    server.Post("/api/sessions", [&svc](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 201, session_to_json(svc.create_session())); });
    });

    server.Get(R"(/api/sessions/([0-9a-f]+))",
               [&svc](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] { send_json(res, 200, session_to_json(svc.get_session(req.matches[1]))); });
               });

    server.Put(R"(/api/sessions/([0-9a-f]+)/observations)",
               [&svc](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] {
                   auto obs = observations_from_json(parse_body(req));
                   send_json(res, 200, session_to_json(svc.replace_observations(req.matches[1], obs)));
                 });
               });

    server.Post(R"(/api/sessions/([0-9a-f]+)/advise)",
                [&svc](const httplib::Request& req, httplib::Response& res) {
                  guarded(res, [&] { send_json(res, 200, consultation_to_json(svc.advise(req.matches[1]))); });
                });

    server.Post(R"(/api/sessions/([0-9a-f]+)/rebase)",
                [&svc](const httplib::Request& req, httplib::Response& res) {
                  guarded(res, [&] {
                    RebaseOutcome out = svc.rebase(req.matches[1]);
                    Json body = consultation_to_json(out.consultation);
                    body["kb_rebased"] = out.rebased;
                    Json dropped = Json::array();
                    for (const auto& o : out.dropped) dropped.push_back(to_json(o));
                    body["dropped_observations"] = std::move(dropped);
                    send_json(res, 200, body);
                  });
                });

    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty() && res.status == 404) {
        send_error(res, {404, "not_found", "no such endpoint"});
      }
    });

    if (!config.cors_origin.empty()) {
      const std::string origin = config.cors_origin;
      server.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", origin);
        res.set_header("Access-Control-Expose-Headers", "ETag");
      });
      server.Options(R"(/api/.*)", [origin](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, DELETE, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type, If-Match");
        res.status = 204;
      });
    }

    if (!config.ui_dir.empty()) server.set_mount_point("/", config.ui_dir.string());
  }
};

HttpServer::HttpServer(ConsultationService& service, ServerConfig config)
    : impl_(std::make_unique<Impl>(service, std::move(config))) {}

HttpServer::~HttpServer() { stop(); }

bool HttpServer::bind() {
  auto& s = impl_->server;
  if (impl_->config.port == 0) {
    impl_->bound_port = s.bind_to_any_port(impl_->config.host);
    return impl_->bound_port > 0;
  }
  if (!s.bind_to_port(impl_->config.host, impl_->config.port)) return false;
  impl_->bound_port = impl_->config.port;
  return true;
}

int HttpServer::port() const noexcept { return impl_->bound_port; }

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

bool HttpServer::running() const { return impl_->server.is_running(); }

}  // namespace dsage::api
