#pragma once

// Group structure: the complete alliance/conflict graph over subjects and the
// polynomial (meet for alliance, join for conflict) it decomposes into.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rgt {

enum class Relation { Alliance, Conflict };

std::string_view to_string(Relation r) noexcept;
Relation parse_relation(std::string_view text);  // "alliance" | "conflict"

struct RelationSpec {
  std::string first;
  std::string second;
  Relation relation = Relation::Alliance;

  friend bool operator==(const RelationSpec&, const RelationSpec&) = default;
};

class RelationshipGraph {
 public:
  // Validates completeness: every unordered pair of distinct subjects must be
  // listed exactly once. Throws IncompleteGraph, DuplicateRelation,
  // SelfRelation or UnknownSubject.
  RelationshipGraph(std::vector<std::string> subjects, const std::vector<RelationSpec>& relations);

  const std::vector<std::string>& subjects() const noexcept { return subjects_; }
  std::size_t size() const noexcept { return subjects_.size(); }
  bool has_subject(std::string_view s) const noexcept;
  std::size_t index_of(std::string_view s) const;

  Relation relation(std::string_view a, std::string_view b) const;
  Relation relation_at(std::size_t i, std::size_t j) const { return matrix_[i * size() + j]; }

  // One entry per unordered pair, in subject declaration order.
  std::vector<RelationSpec> relations() const;

  friend bool operator==(const RelationshipGraph&, const RelationshipGraph&) = default;

 private:
  RelationshipGraph() = default;
  friend RelationshipGraph remove_subject(const RelationshipGraph&, std::string_view);
  friend RelationshipGraph set_relation(const RelationshipGraph&, std::string_view, std::string_view, Relation);

  std::vector<std::string> subjects_;
  std::vector<Relation> matrix_;  // row-major, diagonal unused
};

RelationshipGraph new_graph(std::vector<std::string> subjects, const std::vector<RelationSpec>& relations);

// Edits return new graphs. Throws UnknownSubject, LastSubjectRemoval,
// SelfRelation.
RelationshipGraph remove_subject(const RelationshipGraph& g, std::string_view subject);
RelationshipGraph set_relation(const RelationshipGraph& g, std::string_view a, std::string_view b, Relation r);

// Graphviz rendering: solid edges for alliance, dashed for conflict.
std::string to_dot(const RelationshipGraph& g);

class Polynomial {
 public:
  enum class Kind { Var, Meet, Join };

  static Polynomial var(std::string subject);
  // Flattens nested nodes of the same kind and orders children by their least
  // subject. A single child is returned as-is. Throws InvalidPolynomial when a
  // subject occurs twice or no children are given.
  static Polynomial meet(std::vector<Polynomial> children);
  static Polynomial join(std::vector<Polynomial> children);

  // Accepts the rendering produced by to_string(): "abd + c", "(a + b)c",
  // "x1·x2 + lead". Without any explicit "·" or "*" every letter starts a new
  // subject, so "abd" reads as a, b, d.
  static Polynomial parse(std::string_view text);

  Kind kind() const noexcept { return kind_; }
  const std::string& subject() const noexcept { return subject_; }  // Var only
  const std::vector<Polynomial>& children() const noexcept { return children_; }

  const std::string& least_subject() const noexcept { return least_; }
  std::vector<std::string> subjects() const;  // sorted
  bool contains(std::string_view subject) const;
  std::size_t depth() const;

  // Paper-style rendering: meet by juxtaposition when every subject is a
  // single letter optionally followed by digits, by "·" otherwise.
  std::string to_string() const;

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  static Polynomial combine(Kind kind, std::vector<Polynomial> children);
  void render(std::string& out, bool dotted) const;

  Kind kind_ = Kind::Var;
  std::string subject_;
  std::vector<Polynomial> children_;
  std::string least_;
};

// Recursive uniform-split decomposition. Throws NotDecomposable when some
// subgroup has neither an alliance split nor a conflict split.
Polynomial decompose(const RelationshipGraph& g);

// Subjects ordered by identifier; two subjects are allied iff their lowest
// common ancestor is a meet.
RelationshipGraph polynomial_to_graph(const Polynomial& p);

}  // namespace rgt
