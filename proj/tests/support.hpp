#pragma once

// Test-only generators and brute-force oracles. Nothing in here calls the
// code paths it is used to check: containment is decided by enumerating whole
// alternatives, decomposition by enumerating set partitions, and decision
// intervals by trying every candidate value of the decision variable.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "rgt/algebra.hpp"
#include "rgt/error.hpp"
#include "rgt/group.hpp"
#include "rgt/symbolic.hpp"

namespace rgt {

// Lets doctest print values in failed assertions.
inline std::ostream& operator<<(std::ostream& os, const Alternative& a) { return os << a.to_string(); }
inline std::ostream& operator<<(std::ostream& os, const SymbolicExpr& e) { return os << e.to_string(); }
inline std::ostream& operator<<(std::ostream& os, const Polynomial& p) { return os << p.to_string(); }
inline std::ostream& operator<<(std::ostream& os, ErrorCode c) { return os << to_string(c); }

}  // namespace rgt

namespace rgt::testing {

template <class F>
std::optional<ErrorCode> error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline const std::vector<std::string>& subject_names() {
  static const std::vector<std::string> names{"a", "b", "c", "d", "e", "f"};
  return names;
}

inline ActionUniverse universe_of_size(std::size_t n) {
  static const std::vector<std::string> greek{"α", "β", "γ", "δ"};
  return make_universe(std::vector<std::string>(greek.begin(), greek.begin() + static_cast<long>(n)));
}

inline std::vector<Alternative> all_alternatives(const ActionUniverse& u) {
  std::vector<Alternative> out;
  for (std::uint64_t bits = 0; bits <= u.full_mask(); ++bits) out.push_back(u.from_bits(bits));
  return out;
}

inline Alternative random_alternative(std::mt19937& rng, const ActionUniverse& u) {
  return u.from_bits(std::uniform_int_distribution<std::uint64_t>(0, u.full_mask())(rng));
}

// Random expression built from the public constructors only.
inline SymbolicExpr random_expr(std::mt19937& rng, const ActionUniverse& u, const std::vector<std::string>& vars,
                                int max_terms = 3) {
  auto e = const_expr(u.zero());
  const int n_terms = std::uniform_int_distribution<int>(0, max_terms)(rng);
  for (int i = 0; i < n_terms; ++i) {
    auto term = const_expr(random_alternative(rng, u));
    for (const auto& v : vars) {
      if (rng() % 2) term = expr_meet(term, var_expr(v, u));
    }
    e = expr_join(e, term);
  }
  return e;
}

// Calls `visit` with every assignment of alternatives to `vars`.
inline void for_each_assignment(const ActionUniverse& u, const std::vector<std::string>& vars,
                                const std::function<void(const GroundAssignment&)>& visit) {
  const auto values = all_alternatives(u);
  std::vector<std::size_t> digits(vars.size(), 0);
  while (true) {
    GroundAssignment a;
    for (std::size_t i = 0; i < vars.size(); ++i) a.emplace(vars[i], values[digits[i]]);
    visit(a);
    std::size_t i = 0;
    for (; i < vars.size(); ++i) {
      if (++digits[i] < values.size()) break;
      digits[i] = 0;
    }
    if (i == vars.size()) return;
  }
}

// e1 <= e2 for every assignment of whole alternatives to the free variables.
inline bool oracle_leq(const SymbolicExpr& e1, const SymbolicExpr& e2) {
  auto vars = e1.free_variables();
  vars.merge(e2.free_variables());
  bool ok = true;
  for_each_assignment(e1.universe(), {vars.begin(), vars.end()}, [&](const GroundAssignment& a) {
    if (!leq(eval_ground(e1, a), eval_ground(e2, a))) ok = false;
  });
  return ok;
}

// All x with x = pos·x + neg·x̄, by trying every alternative.
inline std::vector<Alternative> oracle_solutions(const Alternative& pos, const Alternative& neg) {
  std::vector<Alternative> out;
  for (const auto& x : all_alternatives(pos.universe())) {
    if (join(meet(pos, x), meet(neg, complement(x))) == x) out.push_back(x);
  }
  return out;
}

// Set partitions of `items` into at least two blocks.
inline void for_each_partition(const std::vector<std::size_t>& items,
                               const std::function<void(const std::vector<std::vector<std::size_t>>&)>& visit) {
  std::vector<std::size_t> label(items.size(), 0);  // restricted growth string
  while (true) {
    const auto n_blocks = items.empty() ? 0 : *std::max_element(label.begin(), label.end()) + 1;
    if (n_blocks >= 2) {
      std::vector<std::vector<std::size_t>> blocks(n_blocks);
      for (std::size_t i = 0; i < items.size(); ++i) blocks[label[i]].push_back(items[i]);
      visit(blocks);
    }
    // Next restricted growth string.
    std::size_t i = items.size();
    while (i-- > 1) {
      const auto prefix_max = *std::max_element(label.begin(), label.begin() + static_cast<long>(i));
      if (label[i] <= prefix_max) {
        ++label[i];
        std::fill(label.begin() + static_cast<long>(i) + 1, label.end(), 0);
        break;
      }
    }
    if (i == 0 || items.size() <= 1) return;
  }
}

// Brute-force decomposition: a subgroup is decomposable iff some partition into
// >= 2 blocks has one uniform relation across all blocks and every block is
// decomposable. The polynomial uses the partition with the most blocks.
using DecomposeMemo = std::map<std::uint64_t, std::optional<Polynomial>>;

inline std::optional<Polynomial> oracle_decompose(const RelationshipGraph& g, const std::vector<std::size_t>& vs,
                                                  DecomposeMemo& memo) {
  if (vs.size() == 1) return Polynomial::var(g.subjects()[vs.front()]);
  std::uint64_t key = 0;
  for (auto v : vs) key |= std::uint64_t{1} << v;
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  std::optional<std::vector<std::vector<std::size_t>>> finest;
  std::optional<Relation> finest_rel;
  bool any_valid = false;
  for_each_partition(vs, [&](const std::vector<std::vector<std::size_t>>& blocks) {
    std::optional<Relation> rel;
    bool uniform = true;
    for (std::size_t a = 0; a < blocks.size() && uniform; ++a) {
      for (std::size_t b = a + 1; b < blocks.size() && uniform; ++b) {
        for (auto x : blocks[a]) {
          for (auto y : blocks[b]) {
            const auto r = g.relation_at(x, y);
            if (!rel) rel = r;
            if (*rel != r) uniform = false;
          }
        }
      }
    }
    if (!uniform) return;
    bool blocks_ok = true;
    for (const auto& blk : blocks) blocks_ok = blocks_ok && oracle_decompose(g, blk, memo).has_value();
    if (blocks_ok) any_valid = true;
    if (!finest || blocks.size() > finest->size()) {
      finest = blocks;
      finest_rel = rel;
    }
  });
  std::optional<Polynomial> out;
  if (any_valid) {
    std::vector<Polynomial> parts;
    for (const auto& blk : *finest) parts.push_back(*oracle_decompose(g, blk, memo));
    out = *finest_rel == Relation::Alliance ? Polynomial::meet(std::move(parts)) : Polynomial::join(std::move(parts));
  }
  memo.emplace(key, out);
  return out;
}

inline std::optional<Polynomial> oracle_decompose(const RelationshipGraph& g) {
  std::vector<std::size_t> all(g.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  DecomposeMemo memo;
  return oracle_decompose(g, all, memo);
}

// True when the conflict relation contains an induced path on four vertices.
inline bool conflict_has_induced_p4(const RelationshipGraph& g) {
  const auto n = g.size();
  auto conflict = [&](std::size_t x, std::size_t y) { return g.relation_at(x, y) == Relation::Conflict; };
  std::vector<std::size_t> p(4);
  for (p[0] = 0; p[0] < n; ++p[0]) {
    for (p[1] = 0; p[1] < n; ++p[1]) {
      for (p[2] = 0; p[2] < n; ++p[2]) {
        for (p[3] = 0; p[3] < n; ++p[3]) {
          std::vector<std::size_t> s = p;
          std::sort(s.begin(), s.end());
          if (std::adjacent_find(s.begin(), s.end()) != s.end()) continue;
          if (conflict(p[0], p[1]) && conflict(p[1], p[2]) && conflict(p[2], p[3]) && !conflict(p[0], p[2]) &&
              !conflict(p[0], p[3]) && !conflict(p[1], p[3])) {
            return true;
          }
        }
      }
    }
  }
  return false;
}

// Graph on the first n subject names with pair relations taken from `mask`
// bits (set bit = conflict) in (i, j), i < j order.
inline RelationshipGraph graph_from_mask(std::size_t n, std::uint64_t mask) {
  std::vector<std::string> subjects(subject_names().begin(), subject_names().begin() + static_cast<long>(n));
  std::vector<RelationSpec> rel;
  std::size_t bit = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++bit) {
      rel.push_back({subjects[i], subjects[j], ((mask >> bit) & 1U) ? Relation::Conflict : Relation::Alliance});
    }
  }
  return RelationshipGraph(subjects, rel);
}

// Random polynomial over the first n subject names: repeatedly merges random
// groups of nodes under a random operator.
inline Polynomial random_polynomial(std::mt19937& rng, std::size_t n) {
  std::vector<Polynomial> pool;
  for (std::size_t i = 0; i < n; ++i) pool.push_back(Polynomial::var(subject_names()[i]));
  std::shuffle(pool.begin(), pool.end(), rng);
  while (pool.size() > 1) {
    const auto k = std::uniform_int_distribution<std::size_t>(2, pool.size())(rng);
    std::vector<Polynomial> group(pool.end() - static_cast<long>(k), pool.end());
    pool.resize(pool.size() - k);
    pool.push_back(rng() % 2 ? Polynomial::meet(std::move(group)) : Polynomial::join(std::move(group)));
    std::shuffle(pool.begin(), pool.end(), rng);
  }
  return pool.front();
}

}  // namespace rgt::testing
