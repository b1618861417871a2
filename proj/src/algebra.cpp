#include "rgt/algebra.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <unordered_set>

#include "rgt/error.hpp"
#include "text_util.hpp"

namespace rgt {

ActionUniverse::ActionUniverse(std::vector<std::string> actions) {
  if (actions.empty()) throw Error(ErrorCode::EmptyUniverse, "universe must contain at least one action");
  if (actions.size() > kMaxActions) {
    throw Error(ErrorCode::UniverseTooLarge,
                "universe has " + std::to_string(actions.size()) + " actions, limit is " +
                    std::to_string(kMaxActions));
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : actions) {
    if (name.empty()) throw Error(ErrorCode::EmptyUniverse, "action names must be non-empty");
    if (name.find_first_of("{},") != std::string::npos || trim(name) != name) {
      throw Error(ErrorCode::ParseError, "action name '" + name + "' contains reserved characters");
    }
    if (!seen.insert(name).second) throw Error(ErrorCode::DuplicateAction, "duplicate action '" + name + "'");
  }
  auto impl = std::make_shared<Impl>();
  impl->full = actions.size() == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << actions.size()) - 1);
  impl->actions = std::move(actions);
  impl_ = std::move(impl);
}

ActionUniverse make_universe(std::vector<std::string> names) { return ActionUniverse(std::move(names)); }

std::size_t ActionUniverse::index_of(std::string_view action) const {
  const auto& acts = impl_->actions;
  auto it = std::find(acts.begin(), acts.end(), action);
  if (it == acts.end()) throw Error(ErrorCode::UnknownAction, "unknown action '" + std::string(action) + "'");
  return static_cast<std::size_t>(it - acts.begin());
}

Alternative ActionUniverse::zero() const { return Alternative(*this, 0); }
Alternative ActionUniverse::one() const { return Alternative(*this, full_mask()); }

Alternative ActionUniverse::singleton(std::string_view action) const {
  return Alternative(*this, std::uint64_t{1} << index_of(action));
}

Alternative ActionUniverse::from_bits(std::uint64_t bits) const { return Alternative(*this, bits); }

Alternative ActionUniverse::of(const std::vector<std::string>& actions) const {
  std::uint64_t bits = 0;
  for (const auto& a : actions) bits |= std::uint64_t{1} << index_of(a);
  return Alternative(*this, bits);
}

Alternative ActionUniverse::parse(std::string_view text) const {
  auto body = trim(text);
  if (body == "0") return zero();
  if (body == "1") return one();
  if (body.size() < 2 || body.front() != '{' || body.back() != '}') {
    throw Error(ErrorCode::ParseError, "expected an alternative such as {a, b}, 0 or 1, got '" +
                                           std::string(text) + "'");
  }
  body = trim(body.substr(1, body.size() - 2));
  std::uint64_t bits = 0;
  if (!body.empty()) {
    for (auto part : split(body, ',')) {
      auto name = trim(part);
      if (name.empty()) throw Error(ErrorCode::ParseError, "empty action name in '" + std::string(text) + "'");
      bits |= std::uint64_t{1} << index_of(name);
    }
  }
  return Alternative(*this, bits);
}

Alternative::Alternative(ActionUniverse universe, std::uint64_t bits)
    : universe_(std::move(universe)), bits_(bits) {
  if ((bits_ & ~universe_.full_mask()) != 0) {
    throw Error(ErrorCode::UnknownAction, "bit pattern has members outside the universe");
  }
}

std::size_t Alternative::cardinality() const noexcept { return static_cast<std::size_t>(std::popcount(bits_)); }

std::string Alternative::to_string() const {
  std::string out = "{";
  bool first = true;
  for (std::size_t i = 0; i < universe_.size(); ++i) {
    if (!contains(i)) continue;
    if (!first) out += ", ";
    out += universe_.action(i);
    first = false;
  }
  out += "}";
  return out;
}

void require_same_universe(const ActionUniverse& a, const ActionUniverse& b) {
  if (!(a == b)) throw Error(ErrorCode::UniverseMismatch, "operands belong to different action universes");
}

Alternative meet(const Alternative& a, const Alternative& b) {
  require_same_universe(a.universe(), b.universe());
  return Alternative(a.universe(), a.bits() & b.bits());
}

Alternative join(const Alternative& a, const Alternative& b) {
  require_same_universe(a.universe(), b.universe());
  return Alternative(a.universe(), a.bits() | b.bits());
}

Alternative complement(const Alternative& a) {
  return Alternative(a.universe(), ~a.bits() & a.universe().full_mask());
}

bool leq(const Alternative& a, const Alternative& b) {
  require_same_universe(a.universe(), b.universe());
  return (a.bits() & ~b.bits()) == 0;
}

std::size_t interval_size(const Alternative& inf, const Alternative& sup) {
  if (!leq(inf, sup)) return 0;
  const int free_bits = std::popcount(sup.bits() & ~inf.bits());
  if (free_bits >= std::numeric_limits<std::size_t>::digits) return std::numeric_limits<std::size_t>::max();
  return std::size_t{1} << free_bits;
}

std::vector<Alternative> enumerate_between(const Alternative& inf, const Alternative& sup) {
  if (!leq(inf, sup)) {
    throw Error(ErrorCode::EmptyInterval, inf.to_string() + " is not contained in " + sup.to_string());
  }
  const std::uint64_t free = sup.bits() & ~inf.bits();
  if (std::popcount(free) > 24) throw Error(ErrorCode::GuardExceeded, "interval too large to enumerate");

  // Walk the submasks of `free` in increasing order; OR-ing in `inf` keeps the
  // order by bit pattern because inf and free are disjoint.
  std::vector<Alternative> out;
  out.reserve(std::size_t{1} << std::popcount(free));
  std::uint64_t sub = 0;
  while (true) {
    out.emplace_back(inf.universe(), inf.bits() | sub);
    if (sub == free) break;
    sub = (sub - free) & free;
  }
  return out;
}

}  // namespace rgt
