#pragma once

// Decision equations, decision intervals and whole-session solving.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rgt/algebra.hpp"
#include "rgt/group.hpp"
#include "rgt/symbolic.hpp"

namespace rgt {

// What one subject exerts on another: a fixed alternative, an interval of
// alternatives, or nothing known (the source stays a free variable).
class InfluenceValue {
 public:
  enum class Kind { Concrete, Interval, Symbolic };

  static InfluenceValue concrete(Alternative value);
  static InfluenceValue interval(Alternative inf, Alternative sup);  // throws EmptyInterval
  static InfluenceValue symbolic() { return InfluenceValue(); }

  Kind kind() const noexcept { return kind_; }
  bool is_concrete() const noexcept { return kind_ == Kind::Concrete; }
  bool is_interval() const noexcept { return kind_ == Kind::Interval; }
  bool is_symbolic() const noexcept { return kind_ == Kind::Symbolic; }

  // Concrete: value() == inf() == sup(). Throws for Symbolic.
  const Alternative& value() const;
  const Alternative& inf() const;
  const Alternative& sup() const;

  // Whether `x` is an admissible choice; Symbolic admits everything.
  bool admits(const Alternative& x) const;

  // "{β}", "[{β}, {α, β}]" or "symbolic".
  std::string to_string() const;

  friend bool operator==(const InfluenceValue&, const InfluenceValue&) = default;

 private:
  InfluenceValue() = default;

  Kind kind_ = Kind::Symbolic;
  std::optional<Alternative> inf_;
  std::optional<Alternative> sup_;
};

class InfluenceMatrix {
 public:
  using Key = std::pair<std::string, std::string>;  // (source, target)

  // Requires every off-diagonal (source, target) entry and no diagonal ones.
  // Throws MatrixIncomplete, UnknownSubject, SchemaError, UniverseMismatch.
  InfluenceMatrix(ActionUniverse universe, std::vector<std::string> subjects, std::map<Key, InfluenceValue> entries);

  // Every source exerts the same value on every target.
  static InfluenceMatrix row_constant(ActionUniverse universe, std::vector<std::string> subjects,
                                      const std::map<std::string, InfluenceValue>& points_of_view);

  const ActionUniverse& universe() const noexcept { return universe_; }
  const std::vector<std::string>& subjects() const noexcept { return subjects_; }
  const std::map<Key, InfluenceValue>& entries() const noexcept { return entries_; }
  const InfluenceValue& at(std::string_view source, std::string_view target) const;

  // Values exerted on `target`, keyed by source.
  std::map<std::string, InfluenceValue> column(std::string_view target) const;

  bool is_row_constant() const;

  friend bool operator==(const InfluenceMatrix&, const InfluenceMatrix&) = default;

 private:
  ActionUniverse universe_;
  std::vector<std::string> subjects_;
  std::map<Key, InfluenceValue> entries_;
};

// x = pos·x + neg·x̄, with pos = P[x:=1] and neg = P[x:=0].
struct DecisionEquation {
  std::string subject;
  SymbolicExpr pos;
  SymbolicExpr neg;

  // "a = (b·d + c)a + c·ā"-style rendering.
  std::string to_string() const;

  friend bool operator==(const DecisionEquation&, const DecisionEquation&) = default;
};

enum class IntervalKind { Point, Free, Range };
std::string_view to_string(IntervalKind k) noexcept;

// Solution set {x : inf <= x <= sup}.
struct DecisionInterval {
  std::string subject;
  SymbolicExpr sup;
  SymbolicExpr inf;
  IntervalKind kind = IntervalKind::Range;

  bool is_ground() const noexcept { return sup.is_ground() && inf.is_ground(); }
  // Ground intervals only; throws UnboundVariable otherwise.
  bool contains(const Alternative& x) const;

  // "a = {β}", "1 ⊇ c ⊇ 0 (free choice)" or "({β} + c) ⊇ a ⊇ c".
  std::string to_string() const;

  friend bool operator==(const DecisionInterval&, const DecisionInterval&) = default;
};

SymbolicExpr to_symbolic(const Polynomial& p, const ActionUniverse& universe);

// Throws UnknownSubject when `subject` does not occur in `p`.
DecisionEquation decision_equation(const Polynomial& p, std::string_view subject, const ActionUniverse& universe);

// Stacked bracket levels of the polynomial, deepest first, and their fold.
struct DiagonalForm {
  std::vector<std::string> levels;
  std::string folded;

  std::string text() const;
};

DiagonalForm render_diagonal_form(const Polynomial& p);

// Binds concrete influences into the equation; every other source stays a
// variable. Throws MatrixIncomplete when a variable of the equation has no
// influence entry, NotSolvable if inf is not contained in sup, and
// GuardExceeded if containment cannot be decided within the guard.
DecisionInterval solve_subject(const DecisionEquation& eq, const std::map<std::string, InfluenceValue>& influences,
                               const ContainmentGuard& guard = {});

struct Branch {
  // Every enumerated assignment that led to this outcome. Keys are source
  // subjects (or "source@t1,t2" when a source exerts different intervals on
  // different targets).
  std::vector<GroundAssignment> assignments;
  std::vector<DecisionInterval> intervals;  // matrix subject order

  const DecisionInterval& interval(std::string_view subject) const;
};

struct SessionResult {
  Polynomial polynomial;
  std::vector<DecisionEquation> equations;  // matrix subject order
  std::vector<std::string> expanded_sources;
  std::vector<std::string> symbolic_sources;
  std::size_t branch_count = 0;  // before merging
  std::vector<Branch> branches;  // merged, in enumeration order
};

struct SolveOptions {
  std::size_t enumeration_bound = 4;
  std::size_t max_branches = 4096;
  ContainmentGuard guard;
};

// Interval influences with at most `enumeration_bound` elements are expanded
// into branches; larger ones are kept symbolic. Throws MatrixIncomplete when
// the matrix and the polynomial disagree on subjects, GuardExceeded when the
// branch product exceeds `max_branches`.
SessionResult solve_session(const Polynomial& p, const InfluenceMatrix& m, const SolveOptions& options = {});

}  // namespace rgt
