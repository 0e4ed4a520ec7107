#include <pthread.h>
#include <signal.h>

#include <iostream>
#include <memory>
#include <thread>

#include "common.hpp"
#include "dsage/error.hpp"
#include "dsage/seed.hpp"
#include "dsage/service/http.hpp"
#include "dsage/store.hpp"

namespace dsage::cli {

namespace {

struct ServeOptions {
  std::string store;
  std::string listen;
  std::string config;
  std::string cors_origin;
  std::string ui_dir;
};

api::ServerConfig resolve(const ServeOptions& o) {
  api::ServerConfig cfg;
  try {
    if (!o.config.empty()) api::apply_config_file(cfg, o.config);
    api::apply_env_overrides(cfg);
    if (!o.store.empty()) cfg.store_dir = o.store;
    if (!o.listen.empty()) std::tie(cfg.host, cfg.port) = api::parse_listen(o.listen);
    if (!o.cors_origin.empty()) cfg.cors_origin = o.cors_origin;
    if (!o.ui_dir.empty()) cfg.ui_dir = o.ui_dir;
  } catch (const std::exception& e) {
    throw Failure{ExitStatus::usage, e.what()};
  }
  return cfg;
}

void run_serve(const ServeOptions& o) {
  const api::ServerConfig cfg = resolve(o);

  std::unique_ptr<FileStore> store;
  try {
    store = std::make_unique<FileStore>(cfg.store_dir);
    auto [digest, initialized] = ensure_initialized(*store, seed_kb());
    if (initialized) {
      std::cerr << "dsage: initialized " << cfg.store_dir.string() << " with seed KB " << digest
                << "\n";
    } else {
      std::cerr << "dsage: serving KB " << digest << "\n";
    }
  } catch (const Error& e) {
    throw Failure{ExitStatus::io, e.what()};
  }

  // Route SIGINT/SIGTERM to a dedicated thread; every thread created after
  // this point inherits the blocked mask.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  api::ConsultationService service(*store);
  api::HttpServer server(service, cfg);
  if (!server.bind()) {
    throw Failure{ExitStatus::io,
                  "cannot bind " + cfg.host + ":" + std::to_string(cfg.port)};
  }
  std::cerr << "dsage: listening on http://" << cfg.host << ":" << server.port() << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  const bool clean = server.listen();
  // Unblock the waiter if listen() ended on its own.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  if (!clean && server.port() < 0) throw Failure{ExitStatus::io, "server failed"};
  std::cerr << "dsage: shut down\n";
}

}  // namespace

void register_serve_command(CLI::App& app) {
  auto opts = std::make_shared<ServeOptions>();
  auto* cmd = app.add_subcommand("serve", "Run the HTTP consultation service");
  cmd->add_option("--store", opts->store, "Store directory (default $DSAGE_STORE or ./store)");
  cmd->add_option("--listen", opts->listen, "host:port (default 127.0.0.1:8080)");
  cmd->add_option("--config", opts->config, "Config file with key = value lines");
  cmd->add_option("--cors-origin", opts->cors_origin, "Allowed browser origin");
  cmd->add_option("--ui", opts->ui_dir, "Directory of static UI assets to serve at /");
  cmd->callback([opts] { run_serve(*opts); });
}

}  // namespace dsage::cli
