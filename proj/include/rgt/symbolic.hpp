#pragma once

// Monotone symbolic expressions over constant alternatives and free subject
// variables, kept in a canonical disjunctive form.
//
// An expression denotes the join of its terms, and a term denotes its
// coefficient met with every one of its variables. Canonical form guarantees
// that two expressions are equal as functions iff they are structurally equal:
//   * each term's coefficient is the full value the expression takes when
//     exactly that term's variables are 1;
//   * a term is absorbed when some term over a strict subset of its variables
//     already yields its coefficient;
//   * the empty term list is 0;
//   * terms are sorted by variable list, then coefficient bit pattern.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rgt/algebra.hpp"

namespace rgt {

struct Term {
  std::uint64_t coefficient = 0;
  std::vector<std::string> variables;  // sorted, unique

  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term& a, const Term& b) {
    if (auto c = a.variables <=> b.variables; c != 0) return c;
    return a.coefficient <=> b.coefficient;
  }
};

class SymbolicExpr {
 public:
  static SymbolicExpr constant(const Alternative& value);
  static SymbolicExpr variable(std::string subject, const ActionUniverse& universe);
  // Canonicalizes an arbitrary term list.
  static SymbolicExpr from_terms(const ActionUniverse& universe, std::vector<Term> terms);

  // Grammar: terms joined by "+"; a term is a product of factors joined by "·",
  // "*" or juxtaposition; a factor is "{...}", "0", "1", a subject identifier
  // or a parenthesised expression. Whitespace is ignored.
  static SymbolicExpr parse(std::string_view text, const ActionUniverse& universe);

  const ActionUniverse& universe() const noexcept { return universe_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }

  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_one() const noexcept;
  bool is_ground() const noexcept;
  // The constant value of a ground expression; throws UnboundVariable otherwise.
  Alternative ground_value() const;
  std::set<std::string> free_variables() const;

  std::string to_string() const;

  friend bool operator==(const SymbolicExpr& a, const SymbolicExpr& b) noexcept {
    return a.terms_ == b.terms_ && a.universe_ == b.universe_;
  }

 private:
  SymbolicExpr(ActionUniverse universe, std::vector<Term> canonical_terms)
      : universe_(std::move(universe)), terms_(std::move(canonical_terms)) {}

  ActionUniverse universe_;
  std::vector<Term> terms_;
};

using Bindings = std::map<std::string, SymbolicExpr, std::less<>>;
using GroundAssignment = std::map<std::string, Alternative, std::less<>>;

SymbolicExpr const_expr(const Alternative& value);
SymbolicExpr var_expr(std::string subject, const ActionUniverse& universe);

SymbolicExpr expr_meet(const SymbolicExpr& a, const SymbolicExpr& b);
SymbolicExpr expr_join(const SymbolicExpr& a, const SymbolicExpr& b);

// Replaces bound variables and re-canonicalizes; unbound variables stay free.
SymbolicExpr substitute(const SymbolicExpr& e, const Bindings& bindings);

Alternative eval_ground(const SymbolicExpr& e, const GroundAssignment& assignment);

struct ContainmentGuard {
  std::size_t max_free_variables = 4;
  std::size_t max_universe_size = 12;
};

// True iff e1 <= e2 under every assignment of alternatives to the free
// variables. Meet and join act on each action independently, so the check
// enumerates every 0/1 assignment of the free variables once per action.
// Throws GuardExceeded when the instance is outside the guard.
bool expr_leq(const SymbolicExpr& e1, const SymbolicExpr& e2, const ContainmentGuard& guard = {});

}  // namespace rgt
