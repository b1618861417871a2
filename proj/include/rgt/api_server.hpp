#pragma once

// HTTP/JSON service: session solving and interactive scenario stepping.
//
//   POST /api/session/solve
//   POST /api/scenarios
//   GET  /api/scenarios/{id}
//   POST /api/scenarios/{id}/step     {"expected_version": n, "human_choices": {...}}
//   GET  /api/scenarios/{id}/report
//
// Errors come back as {"code", "message", "detail"?} with 422 for invalid
// input, 409 for NotDecomposable, stale versions, choices outside an interval
// and stepping a finished scenario, and 404 for unknown ids.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include "rgt/error.hpp"
#include "rgt/io.hpp"
#include "rgt/scenario.hpp"

namespace httplib {
class Server;
}

namespace rgt::api {

struct Response {
  int status = 200;
  io::Json body;
};

// Status code for an engine error.
int status_for(ErrorCode code) noexcept;

// In-memory scenarios, optionally mirrored to <snapshot_dir>/<id>.json after
// every accepted mutation. A snapshot keeps the scenario and the choices of
// every step, so reloading replays the steps and rebuilds the exact state.
class Service {
 public:
  explicit Service(std::optional<std::filesystem::path> snapshot_dir = std::nullopt);

  Response solve(const io::Json& body) const;
  Response create(const io::Json& body);
  Response get(const std::string& id) const;
  Response step(const std::string& id, const io::Json& body);
  Response report(const std::string& id) const;

  std::size_t size() const;
  // Snapshots that could not be restored at startup.
  const std::vector<std::string>& load_errors() const noexcept { return load_errors_; }

 private:
  struct Handle {
    Handle(Scenario sc, ScenarioState st) : scenario(std::move(sc)), state(std::move(st)) {}

    mutable std::mutex mutex;
    Scenario scenario;
    ScenarioState state;
    std::vector<GroundAssignment> history;  // choices passed to each step
    std::uint64_t version = 0;
  };

  std::shared_ptr<Handle> find(const std::string& id) const;
  std::string new_id();
  void write_snapshot(const std::string& id, const Handle& h) const;
  void load_snapshots();

  std::optional<std::filesystem::path> snapshot_dir_;
  mutable std::shared_mutex store_mutex_;
  std::map<std::string, std::shared_ptr<Handle>> store_;
  std::mutex rng_mutex_;
  std::mt19937_64 rng_;
  std::vector<std::string> load_errors_;
};

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::optional<std::filesystem::path> snapshot_dir;
};

class Server {
 public:
  explicit Server(ServerConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds the socket and returns the port; throws std::runtime_error on failure.
  int bind();
  // Serves until stop(); bind() first.
  void listen();
  // bind() plus listen() on a background thread.
  int start();
  void stop();

  Service& service() noexcept { return service_; }

 private:
  ServerConfig config_;
  Service service_;
  std::unique_ptr<httplib::Server> http_;
  std::thread thread_;
};

}  // namespace rgt::api
