#pragma once

// Boolean algebra of alternatives over a finite set of universal actions.
//
// An Alternative is a subset of the universe, stored as a bit pattern where
// bit i stands for the i-th declared action. The full set is the algebra's 1
// and the empty set its 0.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace rgt {

class Alternative;

class ActionUniverse {
 public:
  static constexpr std::size_t kMaxActions = 64;

  // Throws EmptyUniverse, DuplicateAction or UniverseTooLarge.
  explicit ActionUniverse(std::vector<std::string> actions);

  std::size_t size() const noexcept { return impl_->actions.size(); }
  const std::vector<std::string>& actions() const noexcept { return impl_->actions; }
  const std::string& action(std::size_t i) const { return impl_->actions.at(i); }
  std::size_t index_of(std::string_view action) const;  // throws UnknownAction

  std::uint64_t full_mask() const noexcept { return impl_->full; }

  Alternative zero() const;
  Alternative one() const;
  Alternative singleton(std::string_view action) const;
  Alternative from_bits(std::uint64_t bits) const;
  Alternative of(const std::vector<std::string>& actions) const;

  // Accepts "0", "1", "{}" and "{x, y}" listings.
  Alternative parse(std::string_view text) const;

  // Two universes are the same algebra when they declare the same actions in
  // the same order.
  friend bool operator==(const ActionUniverse& a, const ActionUniverse& b) noexcept {
    return a.impl_ == b.impl_ || a.impl_->actions == b.impl_->actions;
  }

 private:
  struct Impl {
    std::vector<std::string> actions;
    std::uint64_t full = 0;
  };
  std::shared_ptr<const Impl> impl_;
};

ActionUniverse make_universe(std::vector<std::string> names);

class Alternative {
 public:
  Alternative(ActionUniverse universe, std::uint64_t bits);

  const ActionUniverse& universe() const noexcept { return universe_; }
  std::uint64_t bits() const noexcept { return bits_; }

  bool is_zero() const noexcept { return bits_ == 0; }
  bool is_one() const noexcept { return bits_ == universe_.full_mask(); }
  bool contains(std::size_t action_index) const noexcept {
    return (bits_ >> action_index) & 1U;
  }
  std::size_t cardinality() const noexcept;

  // "{}" for 0, otherwise "{a, b}" in declaration order.
  std::string to_string() const;

  friend bool operator==(const Alternative& a, const Alternative& b) noexcept {
    return a.bits_ == b.bits_ && a.universe_ == b.universe_;
  }

 private:
  ActionUniverse universe_;
  std::uint64_t bits_;
};

// All binary operations throw UniverseMismatch when the operands belong to
// different universes.
Alternative meet(const Alternative& a, const Alternative& b);
Alternative join(const Alternative& a, const Alternative& b);
Alternative complement(const Alternative& a);
bool leq(const Alternative& a, const Alternative& b);

// Every S with inf <= S <= sup, ordered by bit pattern. Throws EmptyInterval
// when inf is not contained in sup.
std::vector<Alternative> enumerate_between(const Alternative& inf, const Alternative& sup);

// Number of lattice elements in [inf, sup]; saturates at SIZE_MAX.
std::size_t interval_size(const Alternative& inf, const Alternative& sup);

void require_same_universe(const ActionUniverse& a, const ActionUniverse& b);

}  // namespace rgt
