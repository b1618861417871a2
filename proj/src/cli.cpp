#include "rgt/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rgt/api_server.hpp"
#include "rgt/io.hpp"

namespace rgt::cli {
namespace {

std::string one_line(std::string s) {
  for (auto& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  file << text;
  if (!file) throw Error(ErrorCode::SchemaError, "cannot write '" + path + "'");
}

}  // namespace

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotDecomposable: return kExitNotDecomposable;
    case ErrorCode::GuardExceeded: return kExitGuardExceeded;
    default: return kExitInvalid;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reflexive game theory decision engine", "rgt"};
  app.require_subcommand(1);

  std::string input;
  std::string output;
  bool json = false;
  bool trace = false;
  std::optional<std::size_t> bound;

  auto* solve = app.add_subcommand("solve", "Solve one session and list the decision intervals");
  solve->add_option("session", input, "Session file")->required();
  solve->add_flag("--json", json, "Machine-readable output");
  solve->add_option("--bound", bound, "Largest interval influence that is enumerated");
  solve->add_option("-o,--output", output, "Write to a file instead of standard output");

  auto* run_cmd = app.add_subcommand("run", "Run a scenario file and print its report");
  run_cmd->add_option("scenario", input, "Scenario file")->required();
  run_cmd->add_flag("--json", json, "Machine-readable output");
  run_cmd->add_option("--bound", bound, "Enumeration bound for every stage");
  run_cmd->add_flag("--trace", trace, "Include diagonal forms per stage");
  run_cmd->add_option("-o,--output", output, "Write to a file instead of standard output");

  auto* check = app.add_subcommand("check", "Print the group polynomial of a graph");
  check->add_option("graph", input, "File holding subjects and relations")->required();

  auto* dot = app.add_subcommand("export-dot", "Write the relationship graph as DOT");
  dot->add_option("graph", input, "File holding subjects and relations")->required();
  dot->add_option("-o,--output", output, "Write to a file instead of standard output");

  std::string host = "127.0.0.1";
  int port = 8080;
  std::string snapshot_dir;
  if (const char* env = std::getenv("RGT_SNAPSHOT_DIR")) snapshot_dir = env;
  auto* serve = app.add_subcommand("serve", "Start the HTTP/JSON service");
  serve->add_option("--host", host, "Listen address")->capture_default_str();
  serve->add_option("--port", port, "Listen port")->capture_default_str();
  serve->add_option("--snapshot-dir", snapshot_dir, "Snapshot directory (default: $RGT_SNAPSHOT_DIR)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error[Usage]: " << one_line(e.what()) << '\n';
    return kExitInvalid;
  }

  try {
    if (solve->parsed()) {
      const auto in = io::session_from_json(io::read_json_file(input));
      SolveOptions opts;
      opts.enumeration_bound = bound.value_or(in.enumeration_bound);
      const auto result = solve_session(decompose(in.graph), in.matrix, opts);
      emit(json ? io::session_result_to_json(result).dump(2) + "\n" : io::session_result_to_text(result), output, out);
    } else if (run_cmd->parsed()) {
      const auto sc = io::scenario_from_json(io::read_json_file(input));
      RunOptions opts;
      opts.enumeration_bound = bound;
      const auto report = run_scenario(sc, opts);
      emit(json ? io::report_to_json(report, trace).dump(2) + "\n" : io::report_to_text(report, trace), output, out);
    } else if (check->parsed()) {
      out << decompose(io::graph_from_json(io::read_json_file(input))).to_string() << '\n';
    } else if (dot->parsed()) {
      emit(to_dot(io::graph_from_json(io::read_json_file(input))), output, out);
    } else if (serve->parsed()) {
      api::ServerConfig config;
      config.host = host;
      config.port = port;
      if (!snapshot_dir.empty()) config.snapshot_dir = snapshot_dir;
      api::Server server(config);
      for (const auto& e : server.service().load_errors()) err << "warning: skipped snapshot " << one_line(e) << '\n';
      const int bound_port = server.bind();
      err << "listening on " << host << ":" << bound_port << '\n';
      server.listen();
    }
  } catch (const Error& e) {
    err << "error[" << e.code_name() << "]: " << one_line(e.what()) << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error[Internal]: " << one_line(e.what()) << '\n';
    return 1;
  }
  return kExitOk;
}

}  // namespace rgt::cli
