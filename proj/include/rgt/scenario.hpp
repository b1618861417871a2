#pragma once

// Multi-stage decision processes: preliminary sessions fix the parameters
// (points of view, group membership, whether the final session is held) of
// the final session.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rgt/algebra.hpp"
#include "rgt/group.hpp"
#include "rgt/solver.hpp"

namespace rgt {

using PointsOfView = std::map<std::string, InfluenceValue>;

struct RemoveSubject {
  std::string subject;
  friend bool operator==(const RemoveSubject&, const RemoveSubject&) = default;
};

struct SetRelation {
  std::string first;
  std::string second;
  Relation relation = Relation::Alliance;
  friend bool operator==(const SetRelation&, const SetRelation&) = default;
};

// Approving this change lets the final session take place.
struct StartFinalSession {
  friend bool operator==(const StartFinalSession&, const StartFinalSession&) = default;
};

using StructureChange = std::variant<RemoveSubject, SetRelation, StartFinalSession>;

struct Unanimity {
  friend bool operator==(const Unanimity&, const Unanimity&) = default;
};
struct DeciderIs {
  std::string subject;
  friend bool operator==(const DeciderIs&, const DeciderIs&) = default;
};
using VoteRule = std::variant<Unanimity, DeciderIs>;

struct Vote {
  InfluenceMatrix matrix;  // over its own (usually one-action) universe
  VoteRule rule = Unanimity{};
};

struct InfluenceStage {
  InfluenceMatrix matrix;
};

struct StructureStage {
  StructureChange change;
  std::optional<Vote> vote;  // nullopt: applied directly
};

struct FinalStage {
  std::optional<std::size_t> enumeration_bound;
};

using Stage = std::variant<InfluenceStage, StructureStage, FinalStage>;

// Inclusive range of stage indices executed against the same prior state.
struct ParallelBlock {
  std::size_t first = 0;
  std::size_t last = 0;
};

struct Scenario {
  ActionUniverse universe;
  RelationshipGraph graph;
  PointsOfView points_of_view;  // initial; may be empty
  std::vector<Stage> stages;
  std::vector<ParallelBlock> parallel_blocks;
  std::size_t enumeration_bound = 4;
};

// Throws StageOrderViolation unless there is exactly one final stage and it is
// last; SchemaError for malformed parallel blocks.
void validate_scenario(const Scenario& sc);

std::string describe(const Stage& stage);

enum class VoteBasis { Forced, Stated, Undetermined };
std::string_view to_string(VoteBasis b) noexcept;

// How one subject's decision in a vote session was read.
struct ResolvedVote {
  std::optional<Alternative> value;
  VoteBasis basis = VoteBasis::Undetermined;
};

struct StageRecord {
  enum class Kind { Influence, Structure, Final };

  std::size_t index = 0;
  Kind kind = Kind::Influence;
  std::string description;
  GroundAssignment human_choices;       // committed before this stage ran
  std::optional<std::string> polynomial;  // group structure the stage saw
  std::optional<DiagonalForm> diagonal_form;

  // Influence and final stages, and vote-mode structure stages.
  std::optional<SessionResult> session;
  std::optional<InfluenceMatrix> matrix;  // the matrix that was solved
  std::size_t enumeration_bound = 0;

  // Structure stages.
  std::map<std::string, ResolvedVote> votes;
  bool applied = false;
  std::optional<std::string> polynomial_after;  // nullopt if not decomposable
  std::vector<std::string> subjects_after;
  std::vector<RelationSpec> relations_after;

  // Final stage.
  bool held = false;

  PointsOfView points_of_view_after;
};

std::string_view to_string(StageRecord::Kind k) noexcept;

struct ScenarioState {
  ActionUniverse universe;
  RelationshipGraph graph;
  PointsOfView points_of_view;
  std::vector<StageRecord> stage_log;
  std::size_t next_stage = 0;
  bool final_session_enabled = true;
  bool finished = false;
};

struct RunOptions {
  std::optional<std::size_t> enumeration_bound;  // overrides the scenario's
  ContainmentGuard guard;
};

ScenarioState initial_state(const Scenario& sc);

// Replaces points of view with committed choices. Throws UnknownSubject and
// ChoiceOutsideInterval.
ScenarioState apply_choices(const ScenarioState& state, const GroundAssignment& choices);

// Solves the session and turns every subject's interval into its new point of
// view. Throws NotDecomposable and MatrixIncomplete.
ScenarioState run_influence_stage(const ScenarioState& state, const InfluenceMatrix& m, const SolveOptions& options);

// Applies the change directly or after a vote. Points of view of the remaining
// subjects are carried over unchanged.
ScenarioState run_structure_stage(const ScenarioState& state, const StructureStage& stage,
                                  const SolveOptions& options);

// Builds the row-constant set-up matrix from the points of view and solves
// the final session (unless a vote declined to start it).
ScenarioState run_final_stage(const ScenarioState& state, const SolveOptions& options);

// Executes the next stage, or the whole parallel block starting there.
// Throws StageOrderViolation when the scenario has already finished.
ScenarioState step_scenario(const Scenario& sc, const ScenarioState& state, const GroundAssignment& human_choices = {},
                            const RunOptions& options = {});

struct ScenarioReport {
  std::vector<std::string> universe;
  std::vector<StageRecord> stages;
  PointsOfView points_of_view;
  std::vector<std::string> subjects;
  bool finished = false;

  const StageRecord* final_stage() const;
};

ScenarioReport make_report(const ScenarioState& state);
ScenarioReport run_scenario(const Scenario& sc, const RunOptions& options = {});

}  // namespace rgt
