#include "rgt/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "rgt/error.hpp"

namespace rgt::io {
namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

[[noreturn]] void schema_error(const std::string& what) { throw Error(ErrorCode::SchemaError, what); }

// Runs `f`, turning JSON library type errors into SchemaError.
template <class F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    schema_error(e.what());
  }
}

const Json& field(const Json& j, const char* name) {
  if (!j.is_object()) schema_error(std::string("expected an object holding '") + name + "'");
  auto it = j.find(name);
  if (it == j.end()) schema_error(std::string("missing field '") + name + "'");
  return *it;
}

std::string string_of(const Json& j, const char* what) {
  if (!j.is_string()) schema_error(std::string(what) + " must be a string");
  return j.get<std::string>();
}

std::size_t count_of(const Json& j, const char* what) {
  if (!j.is_number_unsigned()) schema_error(std::string(what) + " must be a non-negative integer");
  return j.get<std::size_t>();
}

std::vector<std::string> strings_of(const Json& j, const char* what) {
  if (!j.is_array()) schema_error(std::string(what) + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) out.push_back(string_of(e, what));
  return out;
}

void require_version(const Json& j) {
  const auto v = string_of(field(j, "format_version"), "format_version");
  if (v != kFormatVersion) schema_error("unsupported format_version '" + v + "'");
}

std::size_t bound_of(const Json& j) {
  return j.contains("enumeration_bound") ? count_of(j.at("enumeration_bound"), "enumeration_bound") : 4;
}

Json relation_to_json(const RelationSpec& r) {
  return Json{{"pair", Json::array({r.first, r.second})}, {"relation", std::string(to_string(r.relation))}};
}

std::pair<std::string, std::string> pair_of(const Json& j) {
  const auto names = strings_of(j, "pair");
  if (names.size() != 2) schema_error("a pair needs exactly two subjects");
  return {names[0], names[1]};
}

IntervalKind classify(const SymbolicExpr& sup, const SymbolicExpr& inf) {
  if (sup == inf) return IntervalKind::Point;
  if (inf.is_zero() && sup.is_one()) return IntervalKind::Free;
  return IntervalKind::Range;
}

// pos ⊇ x ⊇ neg, the solution before any influence is known.
DecisionInterval general_solution(const DecisionEquation& eq) {
  return DecisionInterval{eq.subject, eq.pos, eq.neg, classify(eq.pos, eq.neg)};
}

Json interval_to_json(const DecisionInterval& iv) {
  return Json{{"subject", iv.subject},
              {"kind", std::string(to_string(iv.kind))},
              {"inf", iv.inf.to_string()},
              {"sup", iv.sup.to_string()},
              {"text", iv.to_string()}};
}

Json diagonal_to_json(const DiagonalForm& d) {
  return Json{{"levels", d.levels}, {"folded", d.folded}};
}

Json points_of_view_to_json(const PointsOfView& povs) {
  Json out = Json::object();
  for (const auto& [s, v] : povs) out[s] = influence_to_json(v);
  return out;
}

Json edit_to_json(const StructureChange& c) {
  return std::visit(overloaded{
                        [](const RemoveSubject& r) { return Json{{"op", "remove_subject"}, {"subject", r.subject}}; },
                        [](const SetRelation& r) {
                          return Json{{"op", "set_relation"},
                                      {"pair", Json::array({r.first, r.second})},
                                      {"relation", std::string(to_string(r.relation))}};
                        },
                        [](const StartFinalSession&) { return Json{{"op", "start_final_session"}}; },
                    },
                    c);
}

StructureChange edit_from_json(const Json& j) {
  const auto op = string_of(field(j, "op"), "op");
  if (op == "remove_subject") return RemoveSubject{string_of(field(j, "subject"), "subject")};
  if (op == "set_relation") {
    auto [a, b] = pair_of(field(j, "pair"));
    return SetRelation{a, b, parse_relation(string_of(field(j, "relation"), "relation"))};
  }
  if (op == "start_final_session") return StartFinalSession{};
  schema_error("unknown edit op '" + op + "'");
}

Stage stage_from_json(const Json& j, const ActionUniverse& u, const std::vector<std::string>& order) {
  const auto type = string_of(field(j, "type"), "type");
  if (type == "influence") return InfluenceStage{matrix_from_json(field(j, "matrix"), u, order)};
  if (type == "final") {
    FinalStage f;
    if (j.contains("enumeration_bound")) f.enumeration_bound = count_of(j.at("enumeration_bound"), "enumeration_bound");
    return f;
  }
  if (type != "structure") schema_error("unknown stage type '" + type + "'");

  StructureStage s{edit_from_json(field(j, "edit")), std::nullopt};
  if (!j.contains("mode") || j.at("mode") == "direct") return s;
  const auto& mode = j.at("mode");
  if (string_of(field(mode, "kind"), "mode kind") != "vote") schema_error("mode must be \"direct\" or a vote");
  const auto vu = universe_from_json(field(mode, "universe"));
  Vote vote{matrix_from_json(field(mode, "matrix"), vu, order), Unanimity{}};
  if (mode.contains("rule")) {
    const auto& rule = mode.at("rule");
    if (rule.is_string() && rule == "unanimity") {
      vote.rule = Unanimity{};
    } else if (rule.is_object() && rule.contains("decider")) {
      vote.rule = DeciderIs{string_of(rule.at("decider"), "decider")};
    } else {
      schema_error("rule must be \"unanimity\" or {\"decider\": subject}");
    }
  }
  s.vote = std::move(vote);
  return s;
}

Json stage_to_json(const Stage& stage) {
  return std::visit(overloaded{
                        [](const InfluenceStage& s) { return Json{{"type", "influence"}, {"matrix", matrix_to_json(s.matrix)}}; },
                        [](const StructureStage& s) {
                          Json out{{"type", "structure"}, {"edit", edit_to_json(s.change)}};
                          if (!s.vote) {
                            out["mode"] = "direct";
                            return out;
                          }
                          Json rule = std::visit(overloaded{
                                                     [](const Unanimity&) { return Json("unanimity"); },
                                                     [](const DeciderIs& d) { return Json{{"decider", d.subject}}; },
                                                 },
                                                 s.vote->rule);
                          out["mode"] = Json{{"kind", "vote"},
                                             {"universe", s.vote->matrix.universe().actions()},
                                             {"matrix", matrix_to_json(s.vote->matrix)},
                                             {"rule", rule}};
                          return out;
                        },
                        [](const FinalStage& s) {
                          Json out{{"type", "final"}};
                          if (s.enumeration_bound) out["enumeration_bound"] = *s.enumeration_bound;
                          return out;
                        },
                    },
                    stage);
}

Json record_to_json(const StageRecord& rec, bool trace) {
  Json out{{"stage", rec.index + 1},
           {"kind", std::string(to_string(rec.kind))},
           {"description", rec.description},
           {"human_choices", choices_to_json(rec.human_choices)},
           {"polynomial", rec.polynomial ? Json(*rec.polynomial) : Json(nullptr)}};
  if (trace && rec.diagonal_form) out["diagonal_form"] = diagonal_to_json(*rec.diagonal_form);
  if (rec.matrix) out["matrix"] = matrix_to_json(*rec.matrix);
  if (rec.session) {
    out["enumeration_bound"] = rec.enumeration_bound;
    out["session"] = session_result_to_json(*rec.session);
  }
  if (rec.kind == StageRecord::Kind::Structure) {
    if (!rec.votes.empty()) {
      Json votes = Json::object();
      for (const auto& [s, v] : rec.votes) {
        votes[s] = Json{{"value", v.value ? Json(render(*v.value)) : Json(nullptr)},
                        {"basis", std::string(to_string(v.basis))}};
      }
      out["votes"] = std::move(votes);
    }
    out["applied"] = rec.applied;
    out["polynomial_after"] = rec.polynomial_after ? Json(*rec.polynomial_after) : Json(nullptr);
  }
  if (rec.kind == StageRecord::Kind::Final) out["held"] = rec.held;
  out["subjects_after"] = rec.subjects_after;
  Json rels = Json::array();
  for (const auto& r : rec.relations_after) rels.push_back(relation_to_json(r));
  out["relations_after"] = std::move(rels);
  out["points_of_view"] = points_of_view_to_json(rec.points_of_view_after);
  return out;
}

std::string render_assignment(const GroundAssignment& a) {
  if (a.empty()) return "(none)";
  std::string out;
  for (const auto& [k, v] : a) {
    if (!out.empty()) out += ", ";
    out += k + " = " + render(v);
  }
  return out;
}

void indent_into(std::ostringstream& os, const std::string& text, const std::string& pad) {
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) os << pad << line << '\n';
}

}  // namespace

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::SchemaError, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

std::string render(const Alternative& x) { return const_expr(x).to_string(); }

std::string render(const InfluenceValue& v) {
  switch (v.kind()) {
    case InfluenceValue::Kind::Concrete: return render(v.value());
    case InfluenceValue::Kind::Interval: return "[" + render(v.inf()) + ", " + render(v.sup()) + "]";
    case InfluenceValue::Kind::Symbolic: return "symbolic";
  }
  return "?";
}

ActionUniverse universe_from_json(const Json& j) {
  return guarded([&] { return make_universe(strings_of(j, "universe")); });
}

InfluenceValue influence_from_json(const Json& j, const ActionUniverse& u) {
  return guarded([&] {
    if (j.is_string()) {
      const auto s = j.get<std::string>();
      if (s == "symbolic") return InfluenceValue::symbolic();
      return InfluenceValue::concrete(u.parse(s));
    }
    if (j.is_object()) {
      return InfluenceValue::interval(u.parse(string_of(field(j, "inf"), "inf")),
                                      u.parse(string_of(field(j, "sup"), "sup")));
    }
    schema_error("an influence is a value string, \"symbolic\" or {\"inf\", \"sup\"}");
  });
}

Json influence_to_json(const InfluenceValue& v) {
  switch (v.kind()) {
    case InfluenceValue::Kind::Concrete: return render(v.value());
    case InfluenceValue::Kind::Interval: return Json{{"inf", render(v.inf())}, {"sup", render(v.sup())}};
    case InfluenceValue::Kind::Symbolic: return "symbolic";
  }
  return nullptr;
}

InfluenceMatrix matrix_from_json(const Json& j, const ActionUniverse& u, const std::vector<std::string>& order) {
  return guarded([&] {
    if (!j.is_object()) schema_error("matrix must be an object of rows");
    std::vector<std::string> names;
    std::map<InfluenceMatrix::Key, InfluenceValue> entries;
    auto note = [&](const std::string& s) {
      if (std::find(names.begin(), names.end(), s) == names.end()) names.push_back(s);
    };
    for (const auto& [source, row] : j.items()) {
      note(source);
      if (!row.is_object()) schema_error("matrix row '" + source + "' must be an object");
      for (const auto& [target, value] : row.items()) {
        note(target);
        entries.emplace(InfluenceMatrix::Key{source, target}, influence_from_json(value, u));
      }
    }
    auto rank = [&](const std::string& s) {
      auto it = std::find(order.begin(), order.end(), s);
      return std::pair{static_cast<std::size_t>(it - order.begin()), s};
    };
    std::sort(names.begin(), names.end(), [&](const auto& a, const auto& b) { return rank(a) < rank(b); });
    return InfluenceMatrix(u, std::move(names), std::move(entries));
  });
}

Json matrix_to_json(const InfluenceMatrix& m) {
  Json out = Json::object();
  for (const auto& s : m.subjects()) {
    Json row = Json::object();
    for (const auto& t : m.subjects()) {
      if (s != t) row[t] = influence_to_json(m.at(s, t));
    }
    out[s] = std::move(row);
  }
  return out;
}

RelationshipGraph graph_from_json(const Json& j) {
  return guarded([&] {
    auto subjects = strings_of(field(j, "subjects"), "subjects");
    std::vector<RelationSpec> specs;
    if (j.contains("relations")) {
      const auto& rels = j.at("relations");
      if (!rels.is_array()) schema_error("relations must be an array");
      for (const auto& r : rels) {
        auto [a, b] = pair_of(field(r, "pair"));
        specs.push_back(RelationSpec{a, b, parse_relation(string_of(field(r, "relation"), "relation"))});
      }
    }
    return new_graph(std::move(subjects), specs);
  });
}

Json graph_to_json(const RelationshipGraph& g) {
  Json rels = Json::array();
  for (const auto& r : g.relations()) rels.push_back(relation_to_json(r));
  return Json{{"subjects", g.subjects()}, {"relations", std::move(rels)}};
}

GroundAssignment choices_from_json(const Json& j, const ActionUniverse& u) {
  return guarded([&] {
    GroundAssignment out;
    if (j.is_null()) return out;
    if (!j.is_object()) schema_error("human_choices must be an object");
    for (const auto& [s, v] : j.items()) out.emplace(s, u.parse(string_of(v, "choice")));
    return out;
  });
}

Json choices_to_json(const GroundAssignment& a) {
  Json out = Json::object();
  for (const auto& [k, v] : a) out[k] = render(v);
  return out;
}

SessionInput session_from_json(const Json& j) {
  return guarded([&] {
    require_version(j);
    auto u = universe_from_json(field(j, "universe"));
    auto g = graph_from_json(j);
    auto m = matrix_from_json(field(j, "matrix"), u, g.subjects());
    return SessionInput{u, g, m, bound_of(j)};
  });
}

Json session_to_json(const SessionInput& s) {
  Json out{{"format_version", kFormatVersion}, {"universe", s.universe.actions()}};
  auto g = graph_to_json(s.graph);
  out["subjects"] = g["subjects"];
  out["relations"] = g["relations"];
  out["matrix"] = matrix_to_json(s.matrix);
  out["enumeration_bound"] = s.enumeration_bound;
  return out;
}

Scenario scenario_from_json(const Json& j) {
  return guarded([&] {
    require_version(j);
    auto u = universe_from_json(field(j, "universe"));
    auto g = graph_from_json(j);
    Scenario sc{u, g, {}, {}, {}, bound_of(j)};
    if (j.contains("points_of_view")) {
      const auto& povs = j.at("points_of_view");
      if (!povs.is_object()) schema_error("points_of_view must be an object");
      for (const auto& [s, v] : povs.items()) sc.points_of_view.emplace(s, influence_from_json(v, u));
    }
    const auto& stages = field(j, "stages");
    if (!stages.is_array() || stages.empty()) schema_error("stages must be a non-empty array");
    for (const auto& s : stages) sc.stages.push_back(stage_from_json(s, u, g.subjects()));
    if (j.contains("parallel_blocks")) {
      for (const auto& b : j.at("parallel_blocks")) {
        if (!b.is_array() || b.size() != 2) schema_error("a parallel block is [first, last]");
        sc.parallel_blocks.push_back(ParallelBlock{count_of(b[0], "block start"), count_of(b[1], "block end")});
      }
    }
    validate_scenario(sc);
    return sc;
  });
}

Json scenario_to_json(const Scenario& sc) {
  Json out{{"format_version", kFormatVersion}, {"universe", sc.universe.actions()}};
  auto g = graph_to_json(sc.graph);
  out["subjects"] = g["subjects"];
  out["relations"] = g["relations"];
  out["enumeration_bound"] = sc.enumeration_bound;
  if (!sc.points_of_view.empty()) out["points_of_view"] = points_of_view_to_json(sc.points_of_view);
  Json stages = Json::array();
  for (const auto& s : sc.stages) stages.push_back(stage_to_json(s));
  out["stages"] = std::move(stages);
  if (!sc.parallel_blocks.empty()) {
    Json blocks = Json::array();
    for (const auto& b : sc.parallel_blocks) blocks.push_back(Json::array({b.first, b.last}));
    out["parallel_blocks"] = std::move(blocks);
  }
  return out;
}

Json session_result_to_json(const SessionResult& r) {
  Json equations = Json::array();
  for (const auto& eq : r.equations) {
    equations.push_back(Json{{"subject", eq.subject},
                             {"pos", eq.pos.to_string()},
                             {"neg", eq.neg.to_string()},
                             {"text", eq.to_string()},
                             {"solution", general_solution(eq).to_string()}});
  }
  Json branches = Json::array();
  for (const auto& b : r.branches) {
    Json assignments = Json::array();
    for (const auto& a : b.assignments) assignments.push_back(choices_to_json(a));
    Json intervals = Json::array();
    for (const auto& iv : b.intervals) intervals.push_back(interval_to_json(iv));
    branches.push_back(Json{{"assignments", std::move(assignments)}, {"intervals", std::move(intervals)}});
  }
  return Json{{"format_version", kFormatVersion},
              {"polynomial", r.polynomial.to_string()},
              {"equations", std::move(equations)},
              {"expanded_sources", r.expanded_sources},
              {"symbolic_sources", r.symbolic_sources},
              {"branch_count", r.branch_count},
              {"branches", std::move(branches)}};
}

Json state_to_json(const ScenarioState& st, bool trace) {
  Json out{{"format_version", kFormatVersion}, {"universe", st.universe.actions()}};
  auto g = graph_to_json(st.graph);
  out["subjects"] = g["subjects"];
  out["relations"] = g["relations"];
  try {
    out["polynomial"] = decompose(st.graph).to_string();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotDecomposable) throw;
    out["polynomial"] = nullptr;
  }
  out["points_of_view"] = points_of_view_to_json(st.points_of_view);
  out["next_stage"] = st.next_stage + 1;
  out["final_session_enabled"] = st.final_session_enabled;
  out["finished"] = st.finished;
  Json log = Json::array();
  for (const auto& rec : st.stage_log) log.push_back(record_to_json(rec, trace));
  out["stage_log"] = std::move(log);
  return out;
}

Json report_to_json(const ScenarioReport& r, bool trace) {
  Json stages = Json::array();
  for (const auto& rec : r.stages) stages.push_back(record_to_json(rec, trace));
  const auto* fin = r.final_stage();
  return Json{{"format_version", kFormatVersion},
              {"universe", r.universe},
              {"finished", r.finished},
              {"stages", std::move(stages)},
              {"subjects", r.subjects},
              {"points_of_view", points_of_view_to_json(r.points_of_view)},
              {"final", fin && fin->session ? session_result_to_json(*fin->session) : Json(nullptr)}};
}

std::string session_result_to_text(const SessionResult& r) {
  std::ostringstream os;
  os << "group: " << r.polynomial.to_string() << '\n';
  os << "equations:\n";
  std::size_t width = 0;
  for (const auto& eq : r.equations) width = std::max(width, eq.to_string().size());
  for (const auto& eq : r.equations) {
    const auto text = eq.to_string();
    os << "  " << text << std::string(width - text.size() + 4, ' ') << general_solution(eq).to_string() << '\n';
  }
  auto list = [](const std::vector<std::string>& xs) {
    std::string out;
    for (const auto& x : xs) out += (out.empty() ? "" : ", ") + x;
    return out.empty() ? std::string("none") : out;
  };
  os << "enumerated: " << list(r.expanded_sources) << "; symbolic: " << list(r.symbolic_sources) << '\n';
  os << "branches: " << r.branches.size() << " distinct of " << r.branch_count << '\n';
  for (std::size_t i = 0; i < r.branches.size(); ++i) {
    const auto& b = r.branches[i];
    os << "branch " << i + 1 << ":";
    for (std::size_t k = 0; k < b.assignments.size(); ++k) {
      os << (k == 0 ? " " : " | ") << render_assignment(b.assignments[k]);
    }
    os << '\n';
    for (const auto& iv : b.intervals) {
      os << "  " << iv.subject << "  " << to_string(iv.kind) << std::string(6 - to_string(iv.kind).size(), ' ')
         << iv.to_string() << '\n';
    }
  }
  return os.str();
}

std::string report_to_text(const ScenarioReport& r, bool trace) {
  std::ostringstream os;
  os << "universe: ";
  for (std::size_t i = 0; i < r.universe.size(); ++i) os << (i ? ", " : "") << r.universe[i];
  os << '\n';
  for (const auto& rec : r.stages) {
    os << "\nstage " << rec.index + 1 << ": " << rec.description << '\n';
    if (!rec.human_choices.empty()) os << "  committed choices: " << render_assignment(rec.human_choices) << '\n';
    if (trace && rec.diagonal_form) indent_into(os, rec.diagonal_form->text(), "  ");
    if (rec.session) {
      indent_into(os, session_result_to_text(*rec.session), "  ");
    } else if (rec.polynomial) {
      os << "  group: " << *rec.polynomial << '\n';
    }
    if (rec.kind == StageRecord::Kind::Structure) {
      if (!rec.votes.empty()) {
        os << "  votes:";
        for (const auto& [s, v] : rec.votes) {
          os << ' ' << s << " = " << (v.value ? render(*v.value) : std::string("?")) << " (" << to_string(v.basis)
             << ")";
        }
        os << '\n';
      }
      os << "  " << (rec.applied ? "applied" : "rejected") << "; group now "
         << (rec.polynomial_after ? *rec.polynomial_after : std::string("not decomposable")) << '\n';
    }
    if (rec.kind == StageRecord::Kind::Final && !rec.held) os << "  not held: the start was not approved\n";
    if (rec.kind != StageRecord::Kind::Final) {
      os << "  points of view:";
      for (const auto& [s, v] : rec.points_of_view_after) os << ' ' << s << " = " << render(v) << ';';
      os << '\n';
    }
  }
  if (!r.finished) os << "\n(scenario not finished)\n";
  return os.str();
}

}  // namespace rgt::io
