#include "rgt/symbolic.hpp"

#include <algorithm>
#include <iterator>

#include "rgt/error.hpp"
#include "text_util.hpp"

namespace rgt {
namespace {

constexpr std::string_view kMiddleDot = "\xC2\xB7";

bool is_subset(const std::vector<std::string>& small, const std::vector<std::string>& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

std::vector<Term> canonicalize(std::uint64_t full, std::vector<Term> terms) {
  for (auto& t : terms) {
    std::sort(t.variables.begin(), t.variables.end());
    t.variables.erase(std::unique(t.variables.begin(), t.variables.end()), t.variables.end());
    t.coefficient &= full;
  }
  std::erase_if(terms, [](const Term& t) { return t.coefficient == 0; });

  // Merge terms over the same variable set.
  std::map<std::vector<std::string>, std::uint64_t> merged;
  for (auto& t : terms) merged[std::move(t.variables)] |= t.coefficient;

  // Each surviving term carries everything the expression yields when exactly
  // its variables are 1; a term whose value is already reached after dropping
  // one of its variables is absorbed.
  auto value_at = [&](const std::vector<std::string>& vars, const std::string* without) {
    std::uint64_t v = 0;
    for (const auto& [other_vars, other_coeff] : merged) {
      if (!is_subset(other_vars, vars)) continue;
      if (without && std::binary_search(other_vars.begin(), other_vars.end(), *without)) continue;
      v |= other_coeff;
    }
    return v;
  };

  std::vector<Term> out;
  out.reserve(merged.size());
  for (const auto& [vars, coeff] : merged) {
    const auto value = value_at(vars, nullptr);
    const bool absorbed = std::any_of(vars.begin(), vars.end(),
                                      [&](const std::string& v) { return value_at(vars, &v) == value; });
    if (!absorbed) out.push_back(Term{value, vars});
  }
  std::sort(out.begin(), out.end());
  return out;
}

void require_identifier(const std::string& subject) {
  if (!is_valid_subject_id(subject)) {
    throw Error(ErrorCode::ParseError, "invalid subject identifier '" + subject + "'");
  }
}

class Parser {
 public:
  Parser(std::string_view text, const ActionUniverse& universe) : text_(text), universe_(universe) {}

  SymbolicExpr parse() {
    auto e = parse_join();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  SymbolicExpr parse_join() {
    auto e = parse_meet();
    while (true) {
      skip_space();
      if (!consume("+")) return e;
      e = expr_join(e, parse_meet());
    }
  }

  SymbolicExpr parse_meet() {
    auto e = parse_factor();
    while (true) {
      skip_space();
      if (consume(kMiddleDot) || consume("*")) {
        e = expr_meet(e, parse_factor());
      } else if (starts_factor()) {
        e = expr_meet(e, parse_factor());
      } else {
        return e;
      }
    }
  }

  SymbolicExpr parse_factor() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto e = parse_join();
      skip_space();
      if (!consume(")")) fail("expected ')'");
      return e;
    }
    if (c == '{') {
      const auto close = text_.find('}', pos_);
      if (close == std::string_view::npos) fail("unterminated '{'");
      auto alt = universe_.parse(text_.substr(pos_, close - pos_ + 1));
      pos_ = close + 1;
      return const_expr(alt);
    }
    if (c == '0' || c == '1') {
      ++pos_;
      return const_expr(c == '0' ? universe_.zero() : universe_.one());
    }
    if (is_ident_start(c)) {
      const auto start = pos_;
      while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
      return var_expr(std::string(text_.substr(start, pos_ - start)), universe_);
    }
    fail("unexpected character");
  }

  bool starts_factor() const {
    if (pos_ >= text_.size()) return false;
    const char c = text_[pos_];
    return c == '(' || c == '{' || c == '0' || c == '1' || is_ident_start(c);
  }

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                                   text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool consume(std::string_view token) {
    if (text_.substr(pos_, token.size()) != token) return false;
    pos_ += token.size();
    return true;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::ParseError,
                what + " at offset " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
  }

  std::string_view text_;
  const ActionUniverse& universe_;
  std::size_t pos_ = 0;
};

}  // namespace

SymbolicExpr SymbolicExpr::constant(const Alternative& value) {
  std::vector<Term> terms;
  if (!value.is_zero()) terms.push_back(Term{value.bits(), {}});
  return SymbolicExpr(value.universe(), std::move(terms));
}

SymbolicExpr SymbolicExpr::variable(std::string subject, const ActionUniverse& universe) {
  require_identifier(subject);
  return SymbolicExpr(universe, {Term{universe.full_mask(), {std::move(subject)}}});
}

SymbolicExpr SymbolicExpr::from_terms(const ActionUniverse& universe, std::vector<Term> terms) {
  for (const auto& t : terms) {
    for (const auto& v : t.variables) require_identifier(v);
  }
  return SymbolicExpr(universe, canonicalize(universe.full_mask(), std::move(terms)));
}

SymbolicExpr SymbolicExpr::parse(std::string_view text, const ActionUniverse& universe) {
  return Parser(text, universe).parse();
}

bool SymbolicExpr::is_one() const noexcept {
  return terms_.size() == 1 && terms_.front().variables.empty() &&
         terms_.front().coefficient == universe_.full_mask();
}

bool SymbolicExpr::is_ground() const noexcept {
  return terms_.empty() || (terms_.size() == 1 && terms_.front().variables.empty());
}

Alternative SymbolicExpr::ground_value() const {
  if (!is_ground()) throw Error(ErrorCode::UnboundVariable, "expression '" + to_string() + "' is not ground");
  return universe_.from_bits(terms_.empty() ? 0 : terms_.front().coefficient);
}

std::set<std::string> SymbolicExpr::free_variables() const {
  std::set<std::string> vars;
  for (const auto& t : terms_) vars.insert(t.variables.begin(), t.variables.end());
  return vars;
}

std::string SymbolicExpr::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& t : terms_) {
    if (!out.empty()) out += " + ";
    const bool full = t.coefficient == universe_.full_mask();
    if (t.variables.empty()) {
      out += full ? std::string("1") : universe_.from_bits(t.coefficient).to_string();
      continue;
    }
    if (!full) {
      out += universe_.from_bits(t.coefficient).to_string();
      out += kMiddleDot;
    }
    for (std::size_t i = 0; i < t.variables.size(); ++i) {
      if (i > 0) out += kMiddleDot;
      out += t.variables[i];
    }
  }
  return out;
}

SymbolicExpr const_expr(const Alternative& value) { return SymbolicExpr::constant(value); }

SymbolicExpr var_expr(std::string subject, const ActionUniverse& universe) {
  return SymbolicExpr::variable(std::move(subject), universe);
}

SymbolicExpr expr_meet(const SymbolicExpr& a, const SymbolicExpr& b) {
  require_same_universe(a.universe(), b.universe());
  std::vector<Term> product;
  product.reserve(a.terms().size() * b.terms().size());
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      Term t{ta.coefficient & tb.coefficient, {}};
      std::set_union(ta.variables.begin(), ta.variables.end(), tb.variables.begin(), tb.variables.end(),
                     std::back_inserter(t.variables));
      product.push_back(std::move(t));
    }
  }
  return SymbolicExpr::from_terms(a.universe(), std::move(product));
}

SymbolicExpr expr_join(const SymbolicExpr& a, const SymbolicExpr& b) {
  require_same_universe(a.universe(), b.universe());
  std::vector<Term> sum = a.terms();
  sum.insert(sum.end(), b.terms().begin(), b.terms().end());
  return SymbolicExpr::from_terms(a.universe(), std::move(sum));
}

SymbolicExpr substitute(const SymbolicExpr& e, const Bindings& bindings) {
  const auto& u = e.universe();
  for (const auto& [name, value] : bindings) require_same_universe(u, value.universe());

  auto result = const_expr(u.zero());
  for (const auto& t : e.terms()) {
    auto product = const_expr(u.from_bits(t.coefficient));
    for (const auto& v : t.variables) {
      auto it = bindings.find(v);
      product = expr_meet(product, it == bindings.end() ? var_expr(v, u) : it->second);
    }
    result = expr_join(result, product);
  }
  return result;
}

Alternative eval_ground(const SymbolicExpr& e, const GroundAssignment& assignment) {
  const auto& u = e.universe();
  std::uint64_t bits = 0;
  for (const auto& t : e.terms()) {
    std::uint64_t value = t.coefficient;
    for (const auto& v : t.variables) {
      auto it = assignment.find(v);
      if (it == assignment.end()) throw Error(ErrorCode::UnboundVariable, "no value for variable '" + v + "'");
      require_same_universe(u, it->second.universe());
      value &= it->second.bits();
    }
    bits |= value;
  }
  return u.from_bits(bits);
}

bool expr_leq(const SymbolicExpr& e1, const SymbolicExpr& e2, const ContainmentGuard& guard) {
  require_same_universe(e1.universe(), e2.universe());
  auto vars = e1.free_variables();
  vars.merge(e2.free_variables());
  const auto n_actions = e1.universe().size();
  if (vars.size() > guard.max_free_variables || n_actions > guard.max_universe_size) {
    throw Error(ErrorCode::GuardExceeded, "containment check over " + std::to_string(vars.size()) +
                                              " free variables and " + std::to_string(n_actions) +
                                              " actions exceeds the guard");
  }

  const std::vector<std::string> names(vars.begin(), vars.end());
  auto term_masks = [&](const SymbolicExpr& e) {
    std::vector<std::pair<std::uint64_t, std::uint32_t>> masks;  // (coefficient, variable mask)
    for (const auto& t : e.terms()) {
      std::uint32_t m = 0;
      for (const auto& v : t.variables) {
        m |= 1U << static_cast<unsigned>(std::lower_bound(names.begin(), names.end(), v) - names.begin());
      }
      masks.emplace_back(t.coefficient, m);
    }
    return masks;
  };
  const auto lhs = term_masks(e1);
  const auto rhs = term_masks(e2);

  auto holds = [](const auto& masks, std::size_t action, std::uint32_t truth) {
    for (const auto& [coeff, m] : masks) {
      if (((coeff >> action) & 1U) && (truth & m) == m) return true;
    }
    return false;
  };

  const std::uint32_t n_assign = 1U << names.size();
  for (std::size_t k = 0; k < n_actions; ++k) {
    for (std::uint32_t truth = 0; truth < n_assign; ++truth) {
      if (holds(lhs, k, truth) && !holds(rhs, k, truth)) return false;
    }
  }
  return true;
}

}  // namespace rgt
