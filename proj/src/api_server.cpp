#include "rgt/api_server.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "httplib.h"
#include "rgt/error.hpp"

namespace rgt::api {
namespace {

using io::Json;

Response error_response(int status, std::string code, std::string message, Json detail = nullptr) {
  Json body{{"code", std::move(code)}, {"message", std::move(message)}};
  if (!detail.is_null()) body["detail"] = std::move(detail);
  return Response{status, std::move(body)};
}

Response not_found(const std::string& id) { return error_response(404, "NotFound", "no scenario with id '" + id + "'"); }

// Maps engine errors onto responses; anything else is a 500.
template <class F>
Response respond(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    return error_response(status_for(e.code()), std::string(e.code_name()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return error_response(422, "SchemaError", e.what());
  } catch (const std::exception& e) {
    return error_response(500, "Internal", e.what());
  }
}

// Bodies may omit format_version and may nest the graph as
// {"graph": {"subjects", "relations"}} with "bound" for the enumeration bound.
Json normalized(Json body) {
  if (!body.is_object()) throw Error(ErrorCode::SchemaError, "request body must be a JSON object");
  if (!body.contains("format_version")) body["format_version"] = io::kFormatVersion;
  if (body.contains("graph") && body["graph"].is_object()) {
    for (const char* key : {"subjects", "relations"}) {
      if (body["graph"].contains(key) && !body.contains(key)) body[key] = body["graph"][key];
    }
    body.erase("graph");
  }
  if (body.contains("bound") && !body.contains("enumeration_bound")) {
    body["enumeration_bound"] = body["bound"];
    body.erase("bound");
  }
  return body;
}

Json handle_json(const std::string& id, std::uint64_t version, const ScenarioState& st) {
  return Json{{"id", id}, {"version", version}, {"state", io::state_to_json(st)}};
}

}  // namespace

int status_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotDecomposable:
    case ErrorCode::ChoiceOutsideInterval:
    case ErrorCode::StageOrderViolation:
      return 409;
    default:
      return 422;
  }
}

Service::Service(std::optional<std::filesystem::path> snapshot_dir)
    : snapshot_dir_(std::move(snapshot_dir)), rng_(std::random_device{}()) {
  if (snapshot_dir_) {
    std::filesystem::create_directories(*snapshot_dir_);
    load_snapshots();
  }
}

Response Service::solve(const Json& body) const {
  return respond([&] {
    const auto in = io::session_from_json(normalized(body));
    SolveOptions opts;
    opts.enumeration_bound = in.enumeration_bound;
    return Response{200, io::session_result_to_json(solve_session(decompose(in.graph), in.matrix, opts))};
  });
}

Response Service::create(const Json& body) {
  return respond([&] {
    auto sc = io::scenario_from_json(normalized(body));
    auto st = initial_state(sc);
    auto handle = std::make_shared<Handle>(std::move(sc), std::move(st));
    const auto id = new_id();
    write_snapshot(id, *handle);
    {
      std::unique_lock lock(store_mutex_);
      store_.emplace(id, handle);
    }
    return Response{201, handle_json(id, handle->version, handle->state)};
  });
}

Response Service::get(const std::string& id) const {
  auto h = find(id);
  if (!h) return not_found(id);
  std::lock_guard lock(h->mutex);
  return respond([&] { return Response{200, handle_json(id, h->version, h->state)}; });
}

Response Service::step(const std::string& id, const Json& body) {
  auto h = find(id);
  if (!h) return not_found(id);
  std::lock_guard lock(h->mutex);
  return respond([&] {
    if (!body.is_object() || !body.contains("expected_version") || !body["expected_version"].is_number_unsigned()) {
      throw Error(ErrorCode::SchemaError, "expected_version (a non-negative integer) is required");
    }
    const auto expected = body["expected_version"].get<std::uint64_t>();
    if (expected != h->version) {
      return error_response(409, "VersionConflict",
                            "scenario is at version " + std::to_string(h->version) + ", not " +
                                std::to_string(expected),
                            Json{{"expected_version", expected}, {"current_version", h->version}});
    }
    const auto choices =
        io::choices_from_json(body.contains("human_choices") ? body["human_choices"] : Json(nullptr), h->state.universe);

    // Work on copies; the handle only changes once everything succeeded.
    auto next = step_scenario(h->scenario, h->state, choices);
    Handle staged(h->scenario, next);
    staged.history = h->history;
    staged.history.push_back(choices);
    staged.version = h->version + 1;
    write_snapshot(id, staged);

    h->state = std::move(staged.state);
    h->history = std::move(staged.history);
    h->version = staged.version;
    return Response{200, handle_json(id, h->version, h->state)};
  });
}

Response Service::report(const std::string& id) const {
  auto h = find(id);
  if (!h) return not_found(id);
  std::lock_guard lock(h->mutex);
  return respond([&] { return Response{200, io::report_to_json(make_report(h->state))}; });
}

std::size_t Service::size() const {
  std::shared_lock lock(store_mutex_);
  return store_.size();
}

std::shared_ptr<Service::Handle> Service::find(const std::string& id) const {
  std::shared_lock lock(store_mutex_);
  auto it = store_.find(id);
  return it == store_.end() ? nullptr : it->second;
}

std::string Service::new_id() {
  std::lock_guard lock(rng_mutex_);
  while (true) {
    std::ostringstream os;
    os << std::hex << std::setfill('0') << std::setw(16) << rng_() << std::setw(16) << rng_();
    auto id = os.str();
    std::shared_lock store_lock(store_mutex_);
    if (!store_.contains(id)) return id;
  }
}

void Service::write_snapshot(const std::string& id, const Handle& h) const {
  if (!snapshot_dir_) return;
  Json history = Json::array();
  for (const auto& c : h.history) history.push_back(io::choices_to_json(c));
  const Json doc{{"format_version", io::kFormatVersion},
                 {"id", id},
                 {"version", h.version},
                 {"scenario", io::scenario_to_json(h.scenario)},
                 {"history", std::move(history)}};
  const auto target = *snapshot_dir_ / (id + ".json");
  const auto tmp = *snapshot_dir_ / (id + ".json.tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << doc.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write snapshot " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

void Service::load_snapshots() {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(*snapshot_dir_)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    try {
      const auto doc = io::read_json_file(path.string());
      const auto id = doc.at("id").get<std::string>();
      auto sc = io::scenario_from_json(doc.at("scenario"));
      auto handle = std::make_shared<Handle>(sc, initial_state(sc));
      for (const auto& c : doc.at("history")) {
        auto choices = io::choices_from_json(c, sc.universe);
        handle->state = step_scenario(sc, handle->state, choices);
        handle->history.push_back(std::move(choices));
      }
      handle->version = doc.at("version").get<std::uint64_t>();
      if (handle->version != handle->history.size()) throw std::runtime_error("version does not match history");
      store_.emplace(id, std::move(handle));
    } catch (const std::exception& e) {
      load_errors_.push_back(path.filename().string() + ": " + e.what());
    }
  }
}

Server::Server(ServerConfig config)
    : config_(std::move(config)), service_(config_.snapshot_dir), http_(std::make_unique<httplib::Server>()) {
  auto reply = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  auto parse_body = [](const httplib::Request& req) {
    return req.body.empty() ? Json::object() : io::parse_json(req.body);
  };
  auto with_body = [reply, parse_body](auto&& handler) {
    return [reply, parse_body, handler](const httplib::Request& req, httplib::Response& res) {
      Json body;
      try {
        body = parse_body(req);
      } catch (const Error& e) {
        reply(res, error_response(422, std::string(e.code_name()), e.what()));
        return;
      }
      reply(res, handler(req, body));
    };
  };

  http_->Post("/api/session/solve",
              with_body([this](const httplib::Request&, const Json& body) { return service_.solve(body); }));
  http_->Post("/api/scenarios",
              with_body([this](const httplib::Request&, const Json& body) { return service_.create(body); }));
  http_->Get(R"(/api/scenarios/([^/]+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service_.get(req.matches[1]));
  });
  http_->Post(R"(/api/scenarios/([^/]+)/step)",
              with_body([this](const httplib::Request& req, const Json& body) {
                return service_.step(req.matches[1], body);
              }));
  http_->Get(R"(/api/scenarios/([^/]+)/report)", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service_.report(req.matches[1]));
  });
}

Server::~Server() { stop(); }

int Server::bind() {
  const int port = config_.port == 0 ? http_->bind_to_any_port(config_.host)
                                     : (http_->bind_to_port(config_.host, config_.port) ? config_.port : -1);
  if (port < 0) {
    throw std::runtime_error("cannot bind " + config_.host + ":" + std::to_string(config_.port));
  }
  return port;
}

void Server::listen() { http_->listen_after_bind(); }

int Server::start() {
  const int port = bind();
  thread_ = std::thread([this] { listen(); });
  http_->wait_until_ready();
  return port;
}

void Server::stop() {
  if (http_) http_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace rgt::api
