#include "rgt/solver.hpp"

#include <algorithm>
#include <set>

#include "rgt/error.hpp"

namespace rgt {

// ---------------------------------------------------------------------------
// InfluenceValue

InfluenceValue InfluenceValue::concrete(Alternative value) {
  InfluenceValue v;
  v.kind_ = Kind::Concrete;
  v.inf_ = value;
  v.sup_ = std::move(value);
  return v;
}

InfluenceValue InfluenceValue::interval(Alternative inf, Alternative sup) {
  if (!leq(inf, sup)) {
    throw Error(ErrorCode::EmptyInterval, inf.to_string() + " is not contained in " + sup.to_string());
  }
  InfluenceValue v;
  v.kind_ = Kind::Interval;
  v.inf_ = std::move(inf);
  v.sup_ = std::move(sup);
  return v;
}

const Alternative& InfluenceValue::value() const {
  if (kind_ != Kind::Concrete) throw Error(ErrorCode::UnboundVariable, "influence is not concrete");
  return *inf_;
}

const Alternative& InfluenceValue::inf() const {
  if (!inf_) throw Error(ErrorCode::UnboundVariable, "symbolic influence has no bounds");
  return *inf_;
}

const Alternative& InfluenceValue::sup() const {
  if (!sup_) throw Error(ErrorCode::UnboundVariable, "symbolic influence has no bounds");
  return *sup_;
}

bool InfluenceValue::admits(const Alternative& x) const {
  if (kind_ == Kind::Symbolic) return true;
  return leq(*inf_, x) && leq(x, *sup_);
}

std::string InfluenceValue::to_string() const {
  switch (kind_) {
    case Kind::Concrete: return inf_->to_string();
    case Kind::Interval: return "[" + inf_->to_string() + ", " + sup_->to_string() + "]";
    case Kind::Symbolic: return "symbolic";
  }
  return {};
}

// ---------------------------------------------------------------------------
// InfluenceMatrix

InfluenceMatrix::InfluenceMatrix(ActionUniverse universe, std::vector<std::string> subjects,
                                 std::map<Key, InfluenceValue> entries)
    : universe_(std::move(universe)), subjects_(std::move(subjects)), entries_(std::move(entries)) {
  const std::set<std::string> known(subjects_.begin(), subjects_.end());
  if (known.size() != subjects_.size()) throw Error(ErrorCode::SchemaError, "matrix lists a subject twice");
  for (const auto& [key, value] : entries_) {
    const auto& [source, target] = key;
    if (!known.contains(source)) throw Error(ErrorCode::UnknownSubject, "unknown influence source '" + source + "'");
    if (!known.contains(target)) throw Error(ErrorCode::UnknownSubject, "unknown influence target '" + target + "'");
    if (source == target) {
      throw Error(ErrorCode::SchemaError, "diagonal entry for '" + source + "': the diagonal is the subject itself");
    }
    if (!value.is_symbolic()) require_same_universe(universe_, value.inf().universe());
  }
  for (const auto& s : subjects_) {
    for (const auto& t : subjects_) {
      if (s != t && !entries_.contains({s, t})) {
        throw Error(ErrorCode::MatrixIncomplete, "missing influence of '" + s + "' on '" + t + "'");
      }
    }
  }
}

InfluenceMatrix InfluenceMatrix::row_constant(ActionUniverse universe, std::vector<std::string> subjects,
                                              const std::map<std::string, InfluenceValue>& points_of_view) {
  std::map<Key, InfluenceValue> entries;
  for (const auto& s : subjects) {
    auto it = points_of_view.find(s);
    if (it == points_of_view.end()) throw Error(ErrorCode::MatrixIncomplete, "no point of view for '" + s + "'");
    for (const auto& t : subjects) {
      if (s != t) entries.emplace(Key{s, t}, it->second);
    }
  }
  return InfluenceMatrix(std::move(universe), std::move(subjects), std::move(entries));
}

const InfluenceValue& InfluenceMatrix::at(std::string_view source, std::string_view target) const {
  auto it = entries_.find(Key{std::string(source), std::string(target)});
  if (it == entries_.end()) {
    throw Error(ErrorCode::MatrixIncomplete,
                "no influence of '" + std::string(source) + "' on '" + std::string(target) + "'");
  }
  return it->second;
}

std::map<std::string, InfluenceValue> InfluenceMatrix::column(std::string_view target) const {
  std::map<std::string, InfluenceValue> out;
  for (const auto& s : subjects_) {
    if (s != target) out.emplace(s, at(s, target));
  }
  return out;
}

bool InfluenceMatrix::is_row_constant() const {
  for (const auto& s : subjects_) {
    const InfluenceValue* first = nullptr;
    for (const auto& t : subjects_) {
      if (s == t) continue;
      const auto& v = at(s, t);
      if (first == nullptr) {
        first = &v;
      } else if (!(v == *first)) {
        return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Equations and intervals

namespace {

std::string parenthesize(const SymbolicExpr& e) {
  auto s = e.to_string();
  return e.terms().size() > 1 ? "(" + s + ")" : s;
}

}  // namespace

std::string DecisionEquation::to_string() const {
  std::string rhs;
  if (!pos.is_zero()) rhs = pos.is_one() ? subject : parenthesize(pos) + "·" + subject;
  if (!neg.is_zero()) {
    if (!rhs.empty()) rhs += " + ";
    rhs += neg.is_one() ? "¬" + subject : parenthesize(neg) + "·¬" + subject;
  }
  return subject + " = " + (rhs.empty() ? "0" : rhs);
}

std::string_view to_string(IntervalKind k) noexcept {
  switch (k) {
    case IntervalKind::Point: return "point";
    case IntervalKind::Free: return "free";
    case IntervalKind::Range: return "range";
  }
  return "range";
}

bool DecisionInterval::contains(const Alternative& x) const {
  return leq(inf.ground_value(), x) && leq(x, sup.ground_value());
}

std::string DecisionInterval::to_string() const {
  switch (kind) {
    case IntervalKind::Point: return subject + " = " + sup.to_string();
    case IntervalKind::Free: return "1 ⊇ " + subject + " ⊇ 0 (free choice)";
    case IntervalKind::Range: return parenthesize(sup) + " ⊇ " + subject + " ⊇ " + parenthesize(inf);
  }
  return {};
}

SymbolicExpr to_symbolic(const Polynomial& p, const ActionUniverse& universe) {
  switch (p.kind()) {
    case Polynomial::Kind::Var: return var_expr(p.subject(), universe);
    case Polynomial::Kind::Meet: {
      auto e = const_expr(universe.one());
      for (const auto& c : p.children()) e = expr_meet(e, to_symbolic(c, universe));
      return e;
    }
    case Polynomial::Kind::Join: {
      auto e = const_expr(universe.zero());
      for (const auto& c : p.children()) e = expr_join(e, to_symbolic(c, universe));
      return e;
    }
  }
  return const_expr(universe.zero());
}

DecisionEquation decision_equation(const Polynomial& p, std::string_view subject, const ActionUniverse& universe) {
  if (!p.contains(subject)) {
    throw Error(ErrorCode::UnknownSubject, "subject '" + std::string(subject) + "' does not occur in " + p.to_string());
  }
  const auto expr = to_symbolic(p, universe);
  const std::string s(subject);
  return DecisionEquation{
      s,
      substitute(expr, {{s, const_expr(universe.one())}}),
      substitute(expr, {{s, const_expr(universe.zero())}}),
  };
}

// ---------------------------------------------------------------------------
// Diagonal form

namespace {

std::string bracketed_children(const Polynomial& node) {
  std::string out;
  for (std::size_t i = 0; i < node.children().size(); ++i) {
    if (i > 0 && node.kind() == Polynomial::Kind::Join) out += " + ";
    out += "[" + node.children()[i].to_string() + "]";
  }
  return out;
}

void collect_level(const Polynomial& node, std::size_t depth, std::size_t target, std::vector<std::string>& groups) {
  if (node.kind() == Polynomial::Kind::Var) return;
  if (depth == target) {
    groups.push_back(bracketed_children(node));
    return;
  }
  for (const auto& c : node.children()) collect_level(c, depth + 1, target, groups);
}

Polynomial fold(const Polynomial& node) {
  if (node.kind() == Polynomial::Kind::Var) return node;
  std::vector<Polynomial> folded;
  for (const auto& c : node.children()) folded.push_back(fold(c));
  return node.kind() == Polynomial::Kind::Meet ? Polynomial::meet(std::move(folded))
                                               : Polynomial::join(std::move(folded));
}

}  // namespace

std::string DiagonalForm::text() const {
  std::string out;
  for (const auto& l : levels) out += l + "\n";
  return out;
}

DiagonalForm render_diagonal_form(const Polynomial& p) {
  DiagonalForm form;
  for (std::size_t d = p.depth(); d >= 1; --d) {
    std::vector<std::string> groups;
    collect_level(p, 0, d - 1, groups);
    std::string line;
    for (const auto& g : groups) line += (line.empty() ? "" : "   ") + g;
    form.levels.push_back(line);
  }
  form.folded = fold(p).to_string();
  form.levels.push_back("[" + p.to_string() + "] = " + form.folded);
  return form;
}

// ---------------------------------------------------------------------------
// Solving

DecisionInterval solve_subject(const DecisionEquation& eq, const std::map<std::string, InfluenceValue>& influences,
                               const ContainmentGuard& guard) {
  const auto& u = eq.pos.universe();
  auto vars = eq.pos.free_variables();
  vars.merge(eq.neg.free_variables());

  Bindings bindings;
  for (const auto& v : vars) {
    auto it = influences.find(v);
    if (it == influences.end()) {
      throw Error(ErrorCode::MatrixIncomplete, "no influence of '" + v + "' on '" + eq.subject + "'");
    }
    if (it->second.is_concrete()) {
      require_same_universe(u, it->second.value().universe());
      bindings.emplace(v, const_expr(it->second.value()));
    }
  }

  DecisionInterval out{eq.subject, substitute(eq.pos, bindings), substitute(eq.neg, bindings), IntervalKind::Range};
  const bool well_formed = out.is_ground() ? leq(out.inf.ground_value(), out.sup.ground_value())
                                           : expr_leq(out.inf, out.sup, guard);
  if (!well_formed) {
    throw Error(ErrorCode::NotSolvable, "interval for '" + eq.subject + "' is empty: " + out.inf.to_string() +
                                            " is not contained in " + out.sup.to_string());
  }
  if (out.inf == out.sup) {
    out.kind = IntervalKind::Point;
  } else if (out.inf.is_zero() && out.sup.is_one()) {
    out.kind = IntervalKind::Free;
  }
  return out;
}

const DecisionInterval& Branch::interval(std::string_view subject) const {
  for (const auto& i : intervals) {
    if (i.subject == subject) return i;
  }
  throw Error(ErrorCode::UnknownSubject, "no interval for '" + std::string(subject) + "'");
}

namespace {

// A set of matrix entries that share one enumerated choice.
struct ChoiceGroup {
  std::string key;
  std::string source;
  std::vector<std::string> targets;
  std::vector<Alternative> options;
};

}  // namespace

SessionResult solve_session(const Polynomial& p, const InfluenceMatrix& m, const SolveOptions& options) {
  const auto& u = m.universe();
  {
    auto poly_subjects = p.subjects();
    auto matrix_subjects = m.subjects();
    std::sort(matrix_subjects.begin(), matrix_subjects.end());
    if (poly_subjects != matrix_subjects) {
      throw Error(ErrorCode::MatrixIncomplete, "influence matrix subjects do not match the group " + p.to_string());
    }
  }

  SessionResult result{p, {}, {}, {}, 0, {}};
  for (const auto& s : m.subjects()) result.equations.push_back(decision_equation(p, s, u));

  // Group expandable interval entries per source by their bounds.
  std::vector<ChoiceGroup> groups;
  std::map<InfluenceMatrix::Key, std::size_t> group_of;
  for (const auto& s : m.subjects()) {
    std::vector<ChoiceGroup> mine;
    bool symbolic = false;
    for (const auto& t : m.subjects()) {
      if (s == t) continue;
      const auto& v = m.at(s, t);
      if (v.is_symbolic()) {
        symbolic = true;
        continue;
      }
      if (!v.is_interval()) continue;
      if (interval_size(v.inf(), v.sup()) > options.enumeration_bound) {
        symbolic = true;
        continue;
      }
      auto same = std::find_if(mine.begin(), mine.end(), [&](const ChoiceGroup& g) {
        const auto& first = m.at(g.source, g.targets.front());
        return first.inf() == v.inf() && first.sup() == v.sup();
      });
      if (same == mine.end()) {
        mine.push_back(ChoiceGroup{"", s, {t}, enumerate_between(v.inf(), v.sup())});
      } else {
        same->targets.push_back(t);
      }
    }
    for (auto& g : mine) {
      if (mine.size() == 1) {
        g.key = s;
      } else {
        g.key = s + "@";
        for (std::size_t i = 0; i < g.targets.size(); ++i) g.key += (i ? "," : "") + g.targets[i];
      }
      for (const auto& t : g.targets) group_of[{s, t}] = groups.size();
      groups.push_back(std::move(g));
    }
    if (!mine.empty()) result.expanded_sources.push_back(s);
    if (symbolic) result.symbolic_sources.push_back(s);
  }

  std::size_t total = 1;
  for (const auto& g : groups) {
    if (total > options.max_branches / g.options.size()) {
      throw Error(ErrorCode::GuardExceeded, "session expands into more than " +
                                                std::to_string(options.max_branches) + " branches");
    }
    total *= g.options.size();
  }
  result.branch_count = total;

  // Odometer over the choice groups; the first group varies slowest.
  std::vector<std::size_t> digits(groups.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    GroundAssignment assignment;
    for (std::size_t g = 0; g < groups.size(); ++g) assignment.emplace(groups[g].key, groups[g].options[digits[g]]);

    std::vector<DecisionInterval> intervals;
    for (std::size_t i = 0; i < m.subjects().size(); ++i) {
      const auto& target = m.subjects()[i];
      auto influences = m.column(target);
      for (auto& [source, value] : influences) {
        if (auto it = group_of.find({source, target}); it != group_of.end()) {
          value = InfluenceValue::concrete(groups[it->second].options[digits[it->second]]);
        }
      }
      intervals.push_back(solve_subject(result.equations[i], influences, options.guard));
    }

    auto same = std::find_if(result.branches.begin(), result.branches.end(),
                             [&](const Branch& b) { return b.intervals == intervals; });
    if (same == result.branches.end()) {
      result.branches.push_back(Branch{{std::move(assignment)}, std::move(intervals)});
    } else {
      same->assignments.push_back(std::move(assignment));
    }

    for (std::size_t g = groups.size(); g-- > 0;) {
      if (++digits[g] < groups[g].options.size()) break;
      digits[g] = 0;
    }
  }
  return result;
}

}  // namespace rgt
