#include "rgt/scenario.hpp"

#include <algorithm>

#include "rgt/error.hpp"

namespace rgt {
namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

SolveOptions solve_options(std::size_t bound, const ContainmentGuard& guard) {
  SolveOptions o;
  o.enumeration_bound = bound;
  o.guard = guard;
  return o;
}

// Hull of the subject's interval over all branches; symbolic as soon as any
// branch leaves it non-ground.
InfluenceValue point_of_view(const SessionResult& r, const std::string& subject) {
  std::optional<Alternative> lo;
  std::optional<Alternative> hi;
  for (const auto& b : r.branches) {
    const auto& iv = b.interval(subject);
    if (!iv.is_ground()) return InfluenceValue::symbolic();
    const auto inf = iv.inf.ground_value();
    const auto sup = iv.sup.ground_value();
    lo = lo ? meet(*lo, inf) : inf;
    hi = hi ? join(*hi, sup) : sup;
  }
  if (!lo) return InfluenceValue::symbolic();
  if (*lo == *hi) return InfluenceValue::concrete(*lo);
  return InfluenceValue::interval(*lo, *hi);
}

// The value a subject exerts on everyone else, if it is one concrete value.
std::optional<Alternative> stated_value(const InfluenceMatrix& m, const std::string& subject) {
  std::optional<Alternative> value;
  for (const auto& t : m.subjects()) {
    if (t == subject) continue;
    const auto& v = m.at(subject, t);
    if (!v.is_concrete()) return std::nullopt;
    if (value && !(*value == v.value())) return std::nullopt;
    value = v.value();
  }
  return value;
}

bool admits_everywhere(const DecisionInterval& iv, const Alternative& x, const ContainmentGuard& guard) {
  const auto cx = const_expr(x);
  try {
    return expr_leq(iv.inf, cx, guard) && expr_leq(cx, iv.sup, guard);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::GuardExceeded) return false;
    throw;
  }
}

ResolvedVote resolve_vote(const SessionResult& r, const InfluenceMatrix& m, const std::string& subject,
                          const ContainmentGuard& guard) {
  ResolvedVote out;
  out.basis = VoteBasis::Forced;
  const auto stated = stated_value(m, subject);
  for (const auto& b : r.branches) {
    const auto& iv = b.interval(subject);
    std::optional<Alternative> v;
    if (iv.kind == IntervalKind::Point && iv.is_ground()) {
      v = iv.inf.ground_value();
    } else if (stated && admits_everywhere(iv, *stated, guard)) {
      v = stated;
      out.basis = VoteBasis::Stated;
    } else {
      return {};
    }
    if (out.value && !(*out.value == *v)) return {};
    out.value = v;
  }
  if (!out.value) return {};
  return out;
}

bool forced_one(const std::map<std::string, ResolvedVote>& votes, const std::string& subject) {
  auto it = votes.find(subject);
  return it != votes.end() && it->second.value && it->second.value->is_one();
}

std::optional<std::string> try_polynomial(const RelationshipGraph& g) {
  try {
    return decompose(g).to_string();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotDecomposable) return std::nullopt;
    throw;
  }
}

PointsOfView restricted(const PointsOfView& povs, const RelationshipGraph& g) {
  PointsOfView out;
  for (const auto& [s, v] : povs) {
    if (g.has_subject(s)) out.emplace(s, v);
  }
  return out;
}

// Which parameter a stage decides; a parallel block may touch each at most once.
enum class Parameter { PointsOfView, GroupStructure, FinalStart, Final };

Parameter parameter_of(const Stage& stage) {
  return std::visit(overloaded{
                        [](const InfluenceStage&) { return Parameter::PointsOfView; },
                        [](const StructureStage& s) {
                          return std::holds_alternative<StartFinalSession>(s.change) ? Parameter::FinalStart
                                                                                      : Parameter::GroupStructure;
                        },
                        [](const FinalStage&) { return Parameter::Final; },
                    },
                    stage);
}

std::size_t effective_bound(const Scenario& sc, const Stage& stage, const RunOptions& options) {
  if (options.enumeration_bound) return *options.enumeration_bound;
  if (const auto* f = std::get_if<FinalStage>(&stage); f && f->enumeration_bound) return *f->enumeration_bound;
  return sc.enumeration_bound;
}

}  // namespace

void validate_scenario(const Scenario& sc) {
  const auto finals = std::count_if(sc.stages.begin(), sc.stages.end(),
                                    [](const Stage& s) { return std::holds_alternative<FinalStage>(s); });
  if (finals != 1) {
    throw Error(ErrorCode::StageOrderViolation,
                "a scenario needs exactly one final stage, found " + std::to_string(finals));
  }
  if (!std::holds_alternative<FinalStage>(sc.stages.back())) {
    throw Error(ErrorCode::StageOrderViolation, "the final stage must be the last stage");
  }

  std::size_t next_free = 0;
  for (const auto& b : sc.parallel_blocks) {
    const auto label = "parallel block [" + std::to_string(b.first) + ", " + std::to_string(b.last) + "]";
    if (b.first > b.last || b.last >= sc.stages.size()) throw Error(ErrorCode::SchemaError, label + " is out of range");
    if (b.first < next_free) throw Error(ErrorCode::SchemaError, label + " overlaps or is out of order");
    next_free = b.last + 1;
    std::vector<Parameter> seen;
    for (std::size_t i = b.first; i <= b.last; ++i) {
      const auto p = parameter_of(sc.stages[i]);
      if (p == Parameter::Final) throw Error(ErrorCode::SchemaError, label + " contains the final stage");
      if (std::find(seen.begin(), seen.end(), p) != seen.end()) {
        throw Error(ErrorCode::SchemaError, label + " decides the same parameter twice");
      }
      seen.push_back(p);
    }
  }

  for (const auto& stage : sc.stages) {
    if (const auto* inf = std::get_if<InfluenceStage>(&stage)) {
      require_same_universe(sc.universe, inf->matrix.universe());
    }
  }
  for (const auto& [s, v] : sc.points_of_view) {
    if (!sc.graph.has_subject(s)) throw Error(ErrorCode::UnknownSubject, "point of view for unknown subject '" + s + "'");
    if (!v.is_symbolic()) require_same_universe(sc.universe, v.inf().universe());
  }
}

std::string describe(const Stage& stage) {
  return std::visit(
      overloaded{
          [](const InfluenceStage&) { return std::string("influence formation"); },
          [](const StructureStage& s) {
            std::string out = std::visit(overloaded{
                                             [](const RemoveSubject& r) { return "remove subject " + r.subject; },
                                             [](const SetRelation& r) {
                                               return "set relation " + r.first + "/" + r.second + " to " +
                                                      std::string(to_string(r.relation));
                                             },
                                             [](const StartFinalSession&) { return std::string("start final session"); },
                                         },
                                         s.change);
            if (!s.vote) return out + " (direct)";
            return out + std::visit(overloaded{
                                        [](const Unanimity&) { return std::string(" (vote, unanimity)"); },
                                        [](const DeciderIs& d) { return " (vote, decider " + d.subject + ")"; },
                                    },
                                    s.vote->rule);
          },
          [](const FinalStage&) { return std::string("final session"); },
      },
      stage);
}

std::string_view to_string(VoteBasis b) noexcept {
  switch (b) {
    case VoteBasis::Forced: return "forced";
    case VoteBasis::Stated: return "stated";
    case VoteBasis::Undetermined: return "undetermined";
  }
  return "?";
}

std::string_view to_string(StageRecord::Kind k) noexcept {
  switch (k) {
    case StageRecord::Kind::Influence: return "influence";
    case StageRecord::Kind::Structure: return "structure";
    case StageRecord::Kind::Final: return "final";
  }
  return "?";
}

ScenarioState initial_state(const Scenario& sc) {
  validate_scenario(sc);
  ScenarioState st{sc.universe, sc.graph, sc.points_of_view, {}, 0, true, false};
  return st;
}

ScenarioState apply_choices(const ScenarioState& state, const GroundAssignment& choices) {
  ScenarioState next = state;
  for (const auto& [subject, x] : choices) {
    require_same_universe(state.universe, x.universe());
    if (!state.graph.has_subject(subject)) {
      throw Error(ErrorCode::UnknownSubject, "choice for unknown subject '" + subject + "'");
    }
    auto it = state.points_of_view.find(subject);
    if (it != state.points_of_view.end() && !it->second.admits(x)) {
      throw Error(ErrorCode::ChoiceOutsideInterval, "choice " + x.to_string() + " for '" + subject +
                                                        "' lies outside " + it->second.to_string());
    }
    next.points_of_view.insert_or_assign(subject, InfluenceValue::concrete(x));
  }
  return next;
}

ScenarioState run_influence_stage(const ScenarioState& state, const InfluenceMatrix& m, const SolveOptions& options) {
  require_same_universe(state.universe, m.universe());
  const auto p = decompose(state.graph);

  StageRecord rec;
  rec.kind = StageRecord::Kind::Influence;
  rec.description = "influence formation";
  rec.polynomial = p.to_string();
  rec.diagonal_form = render_diagonal_form(p);
  rec.session = solve_session(p, m, options);
  rec.matrix = m;
  rec.enumeration_bound = options.enumeration_bound;

  ScenarioState next = state;
  for (const auto& s : state.graph.subjects()) {
    next.points_of_view.insert_or_assign(s, point_of_view(*rec.session, s));
  }
  rec.points_of_view_after = next.points_of_view;
  rec.subjects_after = next.graph.subjects();
  rec.relations_after = next.graph.relations();
  next.stage_log.push_back(std::move(rec));
  return next;
}

ScenarioState run_structure_stage(const ScenarioState& state, const StructureStage& stage,
                                  const SolveOptions& options) {
  // Validate the edit before any vote so that a bad target fails loudly.
  bool starts_final = false;
  const RelationshipGraph edited = std::visit(overloaded{
                                                  [&](const RemoveSubject& r) { return remove_subject(state.graph, r.subject); },
                                                  [&](const SetRelation& r) {
                                                    return set_relation(state.graph, r.first, r.second, r.relation);
                                                  },
                                                  [&](const StartFinalSession&) {
                                                    starts_final = true;
                                                    return state.graph;
                                                  },
                                              },
                                              stage.change);

  StageRecord rec;
  rec.kind = StageRecord::Kind::Structure;
  rec.description = describe(Stage{stage});
  rec.polynomial = try_polynomial(state.graph);
  rec.applied = true;

  if (stage.vote) {
    if (const auto* d = std::get_if<DeciderIs>(&stage.vote->rule); d && !state.graph.has_subject(d->subject)) {
      throw Error(ErrorCode::UnknownSubject, "decider '" + d->subject + "' is not in the group");
    }
    const auto p = decompose(state.graph);
    rec.diagonal_form = render_diagonal_form(p);
    rec.session = solve_session(p, stage.vote->matrix, options);
    rec.matrix = stage.vote->matrix;
    rec.enumeration_bound = options.enumeration_bound;
    for (const auto& s : state.graph.subjects()) {
      rec.votes.emplace(s, resolve_vote(*rec.session, stage.vote->matrix, s, options.guard));
    }
    rec.applied = std::visit(overloaded{
                                 [&](const Unanimity&) {
                                   return std::all_of(state.graph.subjects().begin(), state.graph.subjects().end(),
                                                      [&](const std::string& s) { return forced_one(rec.votes, s); });
                                 },
                                 [&](const DeciderIs& d) { return forced_one(rec.votes, d.subject); },
                             },
                             stage.vote->rule);
  }

  ScenarioState next = state;
  if (starts_final) {
    next.final_session_enabled = rec.applied;
  } else if (rec.applied) {
    next.graph = edited;
    next.points_of_view = restricted(state.points_of_view, edited);
  }
  rec.polynomial_after = try_polynomial(next.graph);
  rec.subjects_after = next.graph.subjects();
  rec.relations_after = next.graph.relations();
  rec.points_of_view_after = next.points_of_view;
  next.stage_log.push_back(std::move(rec));
  return next;
}

ScenarioState run_final_stage(const ScenarioState& state, const SolveOptions& options) {
  StageRecord rec;
  rec.kind = StageRecord::Kind::Final;
  rec.description = "final session";
  rec.subjects_after = state.graph.subjects();
  rec.relations_after = state.graph.relations();
  rec.points_of_view_after = state.points_of_view;

  ScenarioState next = state;
  next.finished = true;
  if (!state.final_session_enabled) {
    rec.polynomial = try_polynomial(state.graph);
    rec.polynomial_after = rec.polynomial;
    next.stage_log.push_back(std::move(rec));
    return next;
  }

  const auto p = decompose(state.graph);
  const auto& subjects = state.graph.subjects();
  auto m = subjects.size() == 1 ? InfluenceMatrix(state.universe, subjects, {})
                                : InfluenceMatrix::row_constant(state.universe, subjects, state.points_of_view);
  rec.polynomial = p.to_string();
  rec.polynomial_after = rec.polynomial;
  rec.diagonal_form = render_diagonal_form(p);
  rec.session = solve_session(p, m, options);
  rec.matrix = std::move(m);
  rec.enumeration_bound = options.enumeration_bound;
  rec.held = true;
  next.stage_log.push_back(std::move(rec));
  return next;
}

ScenarioState step_scenario(const Scenario& sc, const ScenarioState& state, const GroundAssignment& human_choices,
                            const RunOptions& options) {
  if (state.finished || state.next_stage >= sc.stages.size()) {
    throw Error(ErrorCode::StageOrderViolation, "the scenario has already finished");
  }

  std::size_t first = state.next_stage;
  std::size_t last = first;
  for (const auto& b : sc.parallel_blocks) {
    if (b.first == first) last = b.last;
  }

  const ScenarioState prior = apply_choices(state, human_choices);
  ScenarioState next = prior;
  std::vector<StageRecord> records;
  for (std::size_t i = first; i <= last; ++i) {
    const auto& stage = sc.stages[i];
    const auto opts = solve_options(effective_bound(sc, stage, options), options.guard);
    // Every stage of a block reads the same prior state.
    ScenarioState out = std::visit(overloaded{
                                       [&](const InfluenceStage& s) { return run_influence_stage(prior, s.matrix, opts); },
                                       [&](const StructureStage& s) { return run_structure_stage(prior, s, opts); },
                                       [&](const FinalStage&) { return run_final_stage(prior, opts); },
                                   },
                                   stage);
    switch (parameter_of(stage)) {
      case Parameter::PointsOfView: next.points_of_view = out.points_of_view; break;
      case Parameter::GroupStructure: next.graph = out.graph; break;
      case Parameter::FinalStart: next.final_session_enabled = out.final_session_enabled; break;
      case Parameter::Final: next.finished = true; break;
    }
    auto rec = std::move(out.stage_log.back());
    rec.index = i;
    records.push_back(std::move(rec));
  }
  next.points_of_view = restricted(next.points_of_view, next.graph);

  for (auto& rec : records) {
    if (last > first) {
      rec.points_of_view_after = next.points_of_view;
      rec.subjects_after = next.graph.subjects();
      rec.relations_after = next.graph.relations();
    }
    next.stage_log.push_back(std::move(rec));
  }
  next.stage_log[state.stage_log.size()].human_choices = human_choices;
  next.next_stage = last + 1;
  return next;
}

const StageRecord* ScenarioReport::final_stage() const {
  for (const auto& r : stages) {
    if (r.kind == StageRecord::Kind::Final) return &r;
  }
  return nullptr;
}

ScenarioReport make_report(const ScenarioState& state) {
  ScenarioReport r;
  r.universe = state.universe.actions();
  r.stages = state.stage_log;
  r.points_of_view = state.points_of_view;
  r.subjects = state.graph.subjects();
  r.finished = state.finished;
  return r;
}

ScenarioReport run_scenario(const Scenario& sc, const RunOptions& options) {
  auto state = initial_state(sc);
  while (!state.finished) state = step_scenario(sc, state, {}, options);
  return make_report(state);
}

}  // namespace rgt
