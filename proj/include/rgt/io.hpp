#pragma once

// JSON and text formats for sessions, scenarios, states and reports.
// Every document carries "format_version": "1". Malformed input raises
// SchemaError (or ParseError for broken JSON syntax).

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rgt/scenario.hpp"
#include "rgt/solver.hpp"

namespace rgt::io {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kFormatVersion = "1";

Json parse_json(std::string_view text);
Json read_json_file(const std::string& path);

// Values render as "0", "1" or "{α, β}" and parse back the same way.
std::string render(const Alternative& x);
std::string render(const InfluenceValue& v);  // "{β}", "[0, {α, β}]", "symbolic"

ActionUniverse universe_from_json(const Json& j);
InfluenceValue influence_from_json(const Json& j, const ActionUniverse& u);
Json influence_to_json(const InfluenceValue& v);

// {"source": {"target": value, ...}, ...}. Subjects are the names that occur,
// ordered as in `order` (unlisted names follow, sorted).
InfluenceMatrix matrix_from_json(const Json& j, const ActionUniverse& u, const std::vector<std::string>& order);
Json matrix_to_json(const InfluenceMatrix& m);

// Reads "subjects" and "relations" ([{"pair": [a, b], "relation": "alliance"}]).
RelationshipGraph graph_from_json(const Json& j);
Json graph_to_json(const RelationshipGraph& g);

GroundAssignment choices_from_json(const Json& j, const ActionUniverse& u);
Json choices_to_json(const GroundAssignment& a);

struct SessionInput {
  ActionUniverse universe;
  RelationshipGraph graph;
  InfluenceMatrix matrix;
  std::size_t enumeration_bound = 4;
};

SessionInput session_from_json(const Json& j);
Json session_to_json(const SessionInput& s);

Scenario scenario_from_json(const Json& j);
Json scenario_to_json(const Scenario& sc);

Json session_result_to_json(const SessionResult& r);
Json state_to_json(const ScenarioState& st, bool trace = false);
Json report_to_json(const ScenarioReport& r, bool trace = false);

std::string session_result_to_text(const SessionResult& r);
std::string report_to_text(const ScenarioReport& r, bool trace = false);

}  // namespace rgt::io
