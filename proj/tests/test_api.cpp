#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <filesystem>
#include <thread>

#include "httplib.h"
#include "rgt/api_server.hpp"
#include "rgt/io.hpp"

using rgt::api::Response;
using rgt::api::Service;
using rgt::io::Json;

namespace {

Json fixture(const std::string& name) { return rgt::io::read_json_file(std::string(RGT_FIXTURE_DIR) + "/" + name); }

Json interval(const Json& result, std::size_t branch, const std::string& subject) {
  for (const auto& iv : result.at("branches").at(branch).at("intervals")) {
    if (iv["subject"] == subject) return iv;
  }
  return nullptr;
}

std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  return dir;
}

Json step_body(std::uint64_t version, Json choices = nullptr) {
  Json body{{"expected_version", version}};
  if (!choices.is_null()) body["human_choices"] = std::move(choices);
  return body;
}

const Json& final_session(const Json& state) { return state.at("stage_log").back().at("session"); }

}  // namespace

TEST_CASE("solve") {
  Service svc;
  auto r = svc.solve(fixture("example1_preliminary_session.json"));
  REQUIRE(r.status == 200);
  CHECK(interval(r.body, 0, "a")["text"] == "a = {β}");
  CHECK(interval(r.body, 0, "b")["text"] == "b = {β}");
  CHECK(interval(r.body, 0, "c")["kind"] == "free");
  CHECK(interval(r.body, 0, "d")["inf"] == "{β}");
  CHECK(interval(r.body, 0, "d")["sup"] == "{α, β}");

  auto vote = svc.solve(fixture("example2_vote_session.json"));
  REQUIRE(vote.status == 200);
  for (const auto* s : {"a", "b", "d"}) {
    CHECK(interval(vote.body, 0, s)["kind"] == "point");
    CHECK(interval(vote.body, 0, s)["sup"] == "1");
  }

  // Without format_version, with the graph nested and "bound" spelled short.
  auto body = fixture("example1_preliminary_session.json");
  body.erase("format_version");
  body["graph"] = Json{{"subjects", body["subjects"]}, {"relations", body["relations"]}};
  body.erase("subjects");
  body.erase("relations");
  body["bound"] = body["enumeration_bound"];
  body.erase("enumeration_bound");
  CHECK(svc.solve(body).body == r.body);

  auto missing = fixture("example1_preliminary_session.json");
  missing["matrix"]["a"].erase("b");
  auto m = svc.solve(missing);
  CHECK(m.status == 422);
  CHECK(m.body["code"] == "MatrixIncomplete");
  CHECK(m.body.contains("message"));

  auto p4 = fixture("p4_conflict.json");
  p4["matrix"] = p4["stages"][0]["matrix"];
  p4.erase("stages");
  auto nd = svc.solve(p4);
  CHECK(nd.status == 409);
  CHECK(nd.body["code"] == "NotDecomposable");

  CHECK(svc.solve(Json::array()).status == 422);
  CHECK(svc.solve(Json{{"format_version", "2"}}).status == 422);
}

TEST_CASE("scenario lifecycle") {
  Service svc;
  auto created = svc.create(fixture("example1_two_stage.json"));
  REQUIRE(created.status == 201);
  const auto id = created.body["id"].get<std::string>();
  CHECK(id.size() == 32);
  CHECK(created.body["version"] == 0);
  CHECK(created.body["state"]["next_stage"] == 1);
  CHECK(created.body["state"]["polynomial"] == "abd + c");

  auto s1 = svc.step(id, step_body(0));
  REQUIRE(s1.status == 200);
  CHECK(s1.body["version"] == 1);
  const auto& povs = s1.body["state"]["points_of_view"];
  CHECK(povs["a"] == "{β}");
  CHECK(povs["c"] == Json{{"inf", "0"}, {"sup", "1"}});
  CHECK(povs["d"] == Json{{"inf", "{β}"}, {"sup", "{α, β}"}});

  auto s2 = svc.step(id, step_body(1));
  REQUIRE(s2.status == 200);
  CHECK(s2.body["state"]["finished"] == true);
  const auto& fin = final_session(s2.body["state"]);
  CHECK(fin["branch_count"] == 2);
  for (const auto* s : {"a", "b", "d"}) {
    CHECK(interval(fin, 0, s)["inf"] == "c");
    CHECK(interval(fin, 0, s)["sup"] == "{β} + c");
  }
  CHECK(interval(fin, 0, "c")["inf"] == "{β}");
  CHECK(interval(fin, 0, "c")["sup"] == "1");

  auto after = svc.step(id, step_body(2));
  CHECK(after.status == 409);
  CHECK(after.body["code"] == "StageOrderViolation");

  auto report = svc.report(id);
  REQUIRE(report.status == 200);
  CHECK(report.body["stages"].size() == 2);
  CHECK(report.body["final"] == fin);

  CHECK(svc.get("nope").status == 404);
  CHECK(svc.step("nope", step_body(0)).status == 404);
  CHECK(svc.report("nope").status == 404);
  CHECK(svc.create(Json{{"format_version", "1"}}).status == 422);
}

TEST_CASE("human choices and failed steps") {
  Service svc;
  const auto id = svc.create(fixture("example1_two_stage.json")).body["id"].get<std::string>();
  REQUIRE(svc.step(id, step_body(0)).status == 200);
  const auto before = svc.get(id).body;

  auto stale = svc.step(id, step_body(0));
  CHECK(stale.status == 409);
  CHECK(stale.body["code"] == "VersionConflict");
  CHECK(stale.body["detail"]["current_version"] == 1);

  auto outside = svc.step(id, step_body(1, Json{{"d", "{γ}"}}));
  CHECK(outside.status == 409);
  CHECK(outside.body["code"] == "ChoiceOutsideInterval");

  CHECK(svc.step(id, Json{{"human_choices", Json::object()}}).status == 422);
  CHECK(svc.step(id, step_body(1, Json{{"c", "{ω}"}})).status == 422);
  CHECK(svc.get(id).body == before);

  auto chosen = svc.step(id, step_body(1, Json{{"c", "{β}"}}));
  REQUIRE(chosen.status == 200);
  const auto& fin = final_session(chosen.body["state"]);
  for (const auto* s : {"a", "b", "d"}) CHECK(interval(fin, 0, s)["text"] == std::string(s) + " = {β}");
  CHECK(chosen.body["state"]["stage_log"][1]["human_choices"] == Json{{"c", "{β}"}});
}

TEST_CASE("concurrent steps on one handle") {
  Service svc;
  const auto id = svc.create(fixture("example3_multistage.json")).body["id"].get<std::string>();
  std::atomic<int> accepted{0};
  std::atomic<int> conflicts{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&] {
      auto r = svc.step(id, step_body(0));
      if (r.status == 200) ++accepted;
      if (r.status == 409) ++conflicts;
    });
  }
  for (auto& t : threads) t.join();
  CHECK(accepted == 1);
  CHECK(conflicts == 7);
  CHECK(svc.get(id).body["version"] == 1);
}

TEST_CASE("snapshots reload") {
  const auto dir = fresh_dir("rgt_test_api_snapshots");
  std::string id;
  Json state;
  Json report;
  {
    Service svc(dir);
    id = svc.create(fixture("example3_multistage.json")).body["id"].get<std::string>();
    REQUIRE(svc.step(id, step_body(0)).status == 200);
    REQUIRE(svc.step(id, step_body(1, Json{{"c", "{β, γ}"}})).status == 200);
    state = svc.get(id).body;
    report = svc.report(id).body;
  }
  CHECK(std::filesystem::exists(dir / (id + ".json")));
  std::ofstream(dir / "garbage.json") << "{";

  Service reloaded(dir);
  CHECK(reloaded.size() == 1);
  CHECK(reloaded.load_errors().size() == 1);
  CHECK(reloaded.get(id).body == state);
  CHECK(reloaded.report(id).body == report);
  CHECK(reloaded.step(id, step_body(2)).status == 200);
}

TEST_CASE("http") {
  rgt::api::Server server(rgt::api::ServerConfig{"127.0.0.1", 0, std::nullopt});
  const int port = server.start();
  REQUIRE(port > 0);
  httplib::Client client("127.0.0.1", port);

  const auto session = fixture("example1_preliminary_session.json");
  auto solved = client.Post("/api/session/solve", session.dump(), "application/json");
  REQUIRE(solved);
  CHECK(solved->status == 200);
  CHECK(solved->get_header_value("Content-Type") == "application/json");
  CHECK(rgt::io::parse_json(solved->body) == Service().solve(session).body);

  auto broken = client.Post("/api/session/solve", "{", "application/json");
  REQUIRE(broken);
  CHECK(broken->status == 422);
  CHECK(rgt::io::parse_json(broken->body)["code"] == "ParseError");

  auto created = client.Post("/api/scenarios", fixture("example1_two_stage.json").dump(), "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  const auto id = rgt::io::parse_json(created->body)["id"].get<std::string>();

  auto stepped = client.Post("/api/scenarios/" + id + "/step", step_body(0).dump(), "application/json");
  REQUIRE(stepped);
  CHECK(stepped->status == 200);
  auto got = client.Get("/api/scenarios/" + id);
  REQUIRE(got);
  CHECK(rgt::io::parse_json(got->body)["version"] == 1);
  auto report = client.Get("/api/scenarios/" + id + "/report");
  REQUIRE(report);
  CHECK(rgt::io::parse_json(report->body)["stages"].size() == 1);
  auto unknown = client.Get("/api/scenarios/unknown");
  REQUIRE(unknown);
  CHECK(unknown->status == 404);

  server.stop();
}
