#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "rgt/error.hpp"
#include "rgt/symbolic.hpp"
#include "support.hpp"

using namespace rgt;
using namespace rgt::testing;

namespace {

const ActionUniverse& strategies() {
  static const ActionUniverse u = make_universe({"α", "β", "γ"});
  return u;
}

SymbolicExpr ex(std::string_view text) { return SymbolicExpr::parse(text, strategies()); }

}  // namespace

TEST_CASE("constructors") {
  const auto& u = strategies();
  CHECK(const_expr(u.singleton("β")).to_string() == "{β}");
  CHECK(var_expr("c", u).to_string() == "c");
  CHECK(const_expr(u.zero()).is_zero());
  CHECK(const_expr(u.zero()).to_string() == "0");
  CHECK(const_expr(u.one()).to_string() == "1");
  CHECK(const_expr(u.one()).is_one());
  CHECK(error_code_of([&] { var_expr("2x", u); }) == ErrorCode::ParseError);
}

TEST_CASE("meet and join fold constants inside mixed terms") {
  const auto& u = strategies();
  auto folded = expr_join(expr_meet(ex("{β}"), ex("{α, β}")), var_expr("c", u));
  CHECK(folded.to_string() == "{β} + c");
  CHECK(folded == ex("{β} + c"));
  CHECK(expr_join(ex("{β} + c"), ex("c")) == ex("{β} + c"));
  CHECK(expr_meet(ex("{α}"), ex("{γ}")).is_zero());

  auto other = make_universe({"exclude_d"});
  CHECK(error_code_of([&] { expr_meet(ex("c"), var_expr("c", other)); }) == ErrorCode::UniverseMismatch);
}

TEST_CASE("canonical form") {
  // Whole-term absorption: c absorbs {β}·c·d.
  CHECK(ex("c + {β}·c·d").to_string() == "c");
  // Same variable set merges.
  CHECK(ex("{α}·c + {β}·c").to_string() == "{α, β}·c");
  // A larger term survives when it yields more than its sub-terms.
  CHECK(ex("{α}·c + {β}·c·d").to_string() == "{α}·c + {α, β}·c·d");
  CHECK(ex("{β} + {α, γ}·c").to_string() == "{β} + c");
  // Term order: constant first, then variable lists lexicographically.
  CHECK(ex("c + b·d").to_string() == "b·d + c");
  CHECK(ex("c + 1").is_one());
  CHECK(ex("(b + c)(a + c)").to_string() == "a·b + c");
  CHECK(ex("{β}c") == ex("{β} * c"));
  CHECK(error_code_of([] { ex("a +"); }) == ErrorCode::ParseError);
  CHECK(error_code_of([] { ex("(a"); }) == ErrorCode::ParseError);
  CHECK(error_code_of([] { ex("{δ}"); }) == ErrorCode::UnknownAction);
}

TEST_CASE("substitute") {
  const auto& u = strategies();
  Bindings prelim{{"b", ex("{α}")}, {"d", ex("{γ}")}, {"c", ex("{β}")}};
  CHECK(substitute(ex("b·d + c"), prelim) == ex("{β}"));

  Bindings final_c{{"a", ex("{β}")}, {"b", ex("{β}")}, {"d", ex("{α, β}")}};
  CHECK(substitute(ex("a·b·d"), final_c) == ex("{β}"));

  CHECK(substitute(ex("c"), {}) == ex("c"));
  CHECK(substitute(ex("b·d + c"), {{"d", ex("{β}")}, {"b", ex("{β}")}}).to_string() == "{β} + c");

  auto other = make_universe({"exclude_d"});
  CHECK(error_code_of([&] { substitute(ex("c"), {{"c", const_expr(other.one())}}); }) ==
        ErrorCode::UniverseMismatch);
  (void)u;
}

TEST_CASE("eval_ground") {
  const auto& u = strategies();
  CHECK(eval_ground(ex("{β} + c"), {{"c", u.zero()}}) == u.singleton("β"));
  CHECK(eval_ground(ex("{β} + c"), {{"c", u.singleton("γ")}}) == u.of({"β", "γ"}));
  CHECK(eval_ground(ex("a·b·d"), {{"a", u.singleton("α")}, {"b", u.singleton("α")}, {"d", u.singleton("γ")}})
            .is_zero());
  CHECK(error_code_of([&] { eval_ground(ex("{β} + c"), {}); }) == ErrorCode::UnboundVariable);
}

TEST_CASE("expr_leq") {
  CHECK(expr_leq(ex("c"), ex("{β} + c")));
  CHECK(expr_leq(ex("{β}"), ex("1")));
  CHECK_FALSE(expr_leq(ex("{α}"), ex("{β}")));
  CHECK_FALSE(expr_leq(ex("{β} + c"), ex("c")));
  CHECK(expr_leq(ex("a·b"), ex("a + b")));

  CHECK(error_code_of([] { expr_leq(ex("a + b + c + d + e"), ex("1")); }) == ErrorCode::GuardExceeded);
  auto wide = make_universe({"a1", "a2", "a3", "a4", "a5", "a6", "a7", "a8", "a9", "a10", "a11", "a12", "a13"});
  CHECK(error_code_of([&] { expr_leq(var_expr("x", wide), const_expr(wide.one())); }) ==
        ErrorCode::GuardExceeded);
  CHECK(expr_leq(ex("a + b + c + d + e"), ex("1"), ContainmentGuard{5, 12}));
}

TEST_CASE("properties over random expressions") {
  std::mt19937 rng(20240611);
  const std::vector<std::string> vars{"a", "b", "c"};

  for (std::size_t n = 1; n <= 3; ++n) {
    auto u = universe_of_size(n);
    for (int trial = 0; trial < 60; ++trial) {
      auto e1 = random_expr(rng, u, vars);
      auto e2 = random_expr(rng, u, vars);

      // Canonicalization is idempotent and rendering round-trips.
      CHECK(SymbolicExpr::from_terms(u, e1.terms()) == e1);
      CHECK(SymbolicExpr::parse(e1.to_string(), u) == e1);

      // Evaluation is a homomorphism for meet and join (exhaustive).
      auto m = expr_meet(e1, e2);
      auto j = expr_join(e1, e2);
      for_each_assignment(u, vars, [&](const GroundAssignment& a) {
        CHECK(eval_ground(m, a) == meet(eval_ground(e1, a), eval_ground(e2, a)));
        CHECK(eval_ground(j, a) == join(eval_ground(e1, a), eval_ground(e2, a)));
      });

      // Containment agrees with whole-alternative enumeration.
      CHECK(expr_leq(e1, e2) == oracle_leq(e1, e2));
      CHECK(expr_leq(m, j));

      // Canonical form is semantic: equal functions are equal structures.
      bool same_function = true;
      for_each_assignment(u, vars, [&](const GroundAssignment& a) {
        same_function = same_function && eval_ground(e1, a) == eval_ground(e2, a);
      });
      CHECK(same_function == (e1 == e2));
    }
  }
}

TEST_CASE("substitution composes") {
  std::mt19937 rng(7);
  auto u = universe_of_size(2);
  for (int trial = 0; trial < 100; ++trial) {
    auto e = random_expr(rng, u, {"a", "b", "c"});
    // m1 binds a and b to expressions over c and d; m2 binds c and d to constants.
    Bindings m1{{"a", random_expr(rng, u, {"c", "d"})}, {"b", random_expr(rng, u, {"c"})}};
    Bindings m2{{"c", const_expr(random_alternative(rng, u))}, {"d", const_expr(random_alternative(rng, u))}};
    Bindings composed;
    for (const auto& [k, v] : m1) composed.emplace(k, substitute(v, m2));
    for (const auto& [k, v] : m2) composed.emplace(k, v);
    CHECK(substitute(substitute(e, m1), m2) == substitute(e, composed));
  }
}
