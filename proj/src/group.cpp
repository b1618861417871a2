#include "rgt/group.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "rgt/error.hpp"
#include "text_util.hpp"

namespace rgt {

std::string_view to_string(Relation r) noexcept { return r == Relation::Alliance ? "alliance" : "conflict"; }

Relation parse_relation(std::string_view text) {
  if (text == "alliance") return Relation::Alliance;
  if (text == "conflict") return Relation::Conflict;
  throw Error(ErrorCode::SchemaError, "relation must be 'alliance' or 'conflict', got '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// RelationshipGraph

RelationshipGraph::RelationshipGraph(std::vector<std::string> subjects, const std::vector<RelationSpec>& relations)
    : subjects_(std::move(subjects)) {
  const auto n = subjects_.size();
  if (n == 0) throw Error(ErrorCode::IncompleteGraph, "a group needs at least one subject");
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_valid_subject_id(subjects_[i])) {
      throw Error(ErrorCode::SchemaError, "invalid subject identifier '" + subjects_[i] + "'");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (subjects_[i] == subjects_[j]) {
        throw Error(ErrorCode::SchemaError, "subject '" + subjects_[i] + "' listed twice");
      }
    }
  }

  matrix_.assign(n * n, Relation::Alliance);
  std::vector<bool> seen(n * n, false);
  for (const auto& r : relations) {
    if (r.first == r.second) throw Error(ErrorCode::SelfRelation, "subject '" + r.first + "' related to itself");
    const auto i = index_of(r.first);
    const auto j = index_of(r.second);
    if (seen[i * n + j]) {
      throw Error(ErrorCode::DuplicateRelation, "pair (" + r.first + ", " + r.second + ") listed twice");
    }
    seen[i * n + j] = seen[j * n + i] = true;
    matrix_[i * n + j] = matrix_[j * n + i] = r.relation;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!seen[i * n + j]) {
        throw Error(ErrorCode::IncompleteGraph,
                    "no relation given for pair (" + subjects_[i] + ", " + subjects_[j] + ")");
      }
    }
  }
}

bool RelationshipGraph::has_subject(std::string_view s) const noexcept {
  return std::find(subjects_.begin(), subjects_.end(), s) != subjects_.end();
}

std::size_t RelationshipGraph::index_of(std::string_view s) const {
  auto it = std::find(subjects_.begin(), subjects_.end(), s);
  if (it == subjects_.end()) throw Error(ErrorCode::UnknownSubject, "unknown subject '" + std::string(s) + "'");
  return static_cast<std::size_t>(it - subjects_.begin());
}

Relation RelationshipGraph::relation(std::string_view a, std::string_view b) const {
  const auto i = index_of(a);
  const auto j = index_of(b);
  if (i == j) throw Error(ErrorCode::SelfRelation, "subject '" + std::string(a) + "' has no relation to itself");
  return relation_at(i, j);
}

std::vector<RelationSpec> RelationshipGraph::relations() const {
  std::vector<RelationSpec> out;
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = i + 1; j < size(); ++j) out.push_back({subjects_[i], subjects_[j], relation_at(i, j)});
  }
  return out;
}

RelationshipGraph new_graph(std::vector<std::string> subjects, const std::vector<RelationSpec>& relations) {
  return RelationshipGraph(std::move(subjects), relations);
}

RelationshipGraph remove_subject(const RelationshipGraph& g, std::string_view subject) {
  const auto k = g.index_of(subject);
  if (g.size() == 1) throw Error(ErrorCode::LastSubjectRemoval, "cannot remove the last subject of a group");
  RelationshipGraph out;
  const auto n = g.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i != k) out.subjects_.push_back(g.subjects()[i]);
  }
  out.matrix_.reserve((n - 1) * (n - 1));
  for (std::size_t i = 0; i < n; ++i) {
    if (i == k) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != k) out.matrix_.push_back(g.relation_at(i, j));
    }
  }
  return out;
}

RelationshipGraph set_relation(const RelationshipGraph& g, std::string_view a, std::string_view b, Relation r) {
  const auto i = g.index_of(a);
  const auto j = g.index_of(b);
  if (i == j) throw Error(ErrorCode::SelfRelation, "subject '" + std::string(a) + "' related to itself");
  RelationshipGraph out = g;
  out.matrix_[i * g.size() + j] = out.matrix_[j * g.size() + i] = r;
  return out;
}

std::string to_dot(const RelationshipGraph& g) {
  std::ostringstream os;
  os << "graph group {\n";
  for (const auto& s : g.subjects()) os << "  " << s << ";\n";
  for (const auto& r : g.relations()) {
    os << "  " << r.first << " -- " << r.second << " [style=" << (r.relation == Relation::Alliance ? "solid" : "dashed")
       << "];\n";
  }
  os << "}\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Polynomial

Polynomial Polynomial::var(std::string subject) {
  if (!is_valid_subject_id(subject)) {
    throw Error(ErrorCode::InvalidPolynomial, "invalid subject identifier '" + subject + "'");
  }
  Polynomial p;
  p.kind_ = Kind::Var;
  p.least_ = subject;
  p.subject_ = std::move(subject);
  return p;
}

Polynomial Polynomial::meet(std::vector<Polynomial> children) { return combine(Kind::Meet, std::move(children)); }
Polynomial Polynomial::join(std::vector<Polynomial> children) { return combine(Kind::Join, std::move(children)); }

Polynomial Polynomial::combine(Kind kind, std::vector<Polynomial> children) {
  if (children.empty()) throw Error(ErrorCode::InvalidPolynomial, "operator node without operands");
  std::vector<Polynomial> flat;
  for (auto& c : children) {
    if (c.kind_ == kind) {
      for (auto& gc : c.children_) flat.push_back(std::move(gc));
    } else {
      flat.push_back(std::move(c));
    }
  }
  if (flat.size() == 1) return std::move(flat.front());

  std::vector<std::string> all;
  for (const auto& c : flat) {
    auto s = c.subjects();
    all.insert(all.end(), s.begin(), s.end());
  }
  std::sort(all.begin(), all.end());
  if (auto dup = std::adjacent_find(all.begin(), all.end()); dup != all.end()) {
    throw Error(ErrorCode::InvalidPolynomial, "subject '" + *dup + "' occurs more than once");
  }

  std::sort(flat.begin(), flat.end(),
            [](const Polynomial& a, const Polynomial& b) { return a.least_ < b.least_; });
  Polynomial p;
  p.kind_ = kind;
  p.least_ = flat.front().least_;
  p.children_ = std::move(flat);
  return p;
}

std::vector<std::string> Polynomial::subjects() const {
  std::vector<std::string> out;
  if (kind_ == Kind::Var) {
    out.push_back(subject_);
    return out;
  }
  for (const auto& c : children_) {
    auto s = c.subjects();
    out.insert(out.end(), s.begin(), s.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool Polynomial::contains(std::string_view subject) const {
  if (kind_ == Kind::Var) return subject_ == subject;
  return std::any_of(children_.begin(), children_.end(), [&](const Polynomial& c) { return c.contains(subject); });
}

std::size_t Polynomial::depth() const {
  std::size_t d = 0;
  for (const auto& c : children_) d = std::max(d, c.depth() + 1);
  return d;
}

namespace {

bool is_short_id(std::string_view id) {
  if (id.empty() || !((id[0] >= 'a' && id[0] <= 'z') || (id[0] >= 'A' && id[0] <= 'Z'))) return false;
  return std::all_of(id.begin() + 1, id.end(), [](char c) { return c >= '0' && c <= '9'; });
}

constexpr std::string_view kMiddleDot = "\xC2\xB7";

}  // namespace

void Polynomial::render(std::string& out, bool dotted) const {
  switch (kind_) {
    case Kind::Var:
      out += subject_;
      return;
    case Kind::Join:
      for (std::size_t i = 0; i < children_.size(); ++i) {
        if (i > 0) out += " + ";
        children_[i].render(out, dotted);
      }
      return;
    case Kind::Meet:
      for (std::size_t i = 0; i < children_.size(); ++i) {
        if (i > 0 && dotted) out += kMiddleDot;
        const bool paren = children_[i].kind_ == Kind::Join;
        if (paren) out += '(';
        children_[i].render(out, dotted);
        if (paren) out += ')';
      }
      return;
  }
}

std::string Polynomial::to_string() const {
  const auto subs = subjects();
  const bool dotted = !std::all_of(subs.begin(), subs.end(), [](const std::string& s) { return is_short_id(s); });
  std::string out;
  render(out, dotted);
  return out;
}

namespace {

class PolynomialParser {
 public:
  explicit PolynomialParser(std::string_view text)
      : text_(text),
        juxtaposed_(text.find(kMiddleDot) == std::string_view::npos && text.find('*') == std::string_view::npos) {}

  Polynomial parse() {
    auto p = parse_join();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return p;
  }

 private:
  Polynomial parse_join() {
    std::vector<Polynomial> parts{parse_meet()};
    while (true) {
      skip_space();
      if (!consume("+")) break;
      parts.push_back(parse_meet());
    }
    return Polynomial::join(std::move(parts));
  }

  Polynomial parse_meet() {
    std::vector<Polynomial> parts{parse_factor()};
    while (true) {
      skip_space();
      if (consume(kMiddleDot) || consume("*")) {
        parts.push_back(parse_factor());
      } else if (pos_ < text_.size() && (text_[pos_] == '(' || is_ident_start(text_[pos_]))) {
        parts.push_back(parse_factor());
      } else {
        break;
      }
    }
    return Polynomial::meet(std::move(parts));
  }

  Polynomial parse_factor() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (text_[pos_] == '(') {
      ++pos_;
      auto p = parse_join();
      skip_space();
      if (!consume(")")) fail("expected ')'");
      return p;
    }
    if (!is_ident_start(text_[pos_])) fail("expected a subject");
    const auto start = pos_++;
    if (juxtaposed_) {
      while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
    } else {
      while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    }
    return Polynomial::var(std::string(text_.substr(start, pos_ - start)));
  }

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
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
  bool juxtaposed_;
  std::size_t pos_ = 0;
};

// Connected components of the subgraph on `vertices` whose edges carry `r`.
std::vector<std::vector<std::size_t>> components(const RelationshipGraph& g, const std::vector<std::size_t>& vertices,
                                                 Relation r) {
  std::vector<std::size_t> parent(vertices.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t a = 0; a < vertices.size(); ++a) {
    for (std::size_t b = a + 1; b < vertices.size(); ++b) {
      if (g.relation_at(vertices[a], vertices[b]) == r) parent[find(a)] = find(b);
    }
  }
  std::vector<std::vector<std::size_t>> blocks;
  std::vector<std::size_t> block_of(vertices.size(), SIZE_MAX);
  for (std::size_t a = 0; a < vertices.size(); ++a) {
    auto root = find(a);
    if (block_of[root] == SIZE_MAX) {
      block_of[root] = blocks.size();
      blocks.emplace_back();
    }
    blocks[block_of[root]].push_back(vertices[a]);
  }
  return blocks;
}

Polynomial decompose_subset(const RelationshipGraph& g, const std::vector<std::size_t>& vertices) {
  if (vertices.size() == 1) return Polynomial::var(g.subjects()[vertices.front()]);

  // Blocks with only alliances between them are the components of the
  // conflict relation, and vice versa.
  for (const auto& [split_on, kind] : {std::pair{Relation::Conflict, Polynomial::Kind::Meet},
                                      std::pair{Relation::Alliance, Polynomial::Kind::Join}}) {
    auto blocks = components(g, vertices, split_on);
    if (blocks.size() < 2) continue;
    std::vector<Polynomial> parts;
    parts.reserve(blocks.size());
    for (const auto& b : blocks) parts.push_back(decompose_subset(g, b));
    return kind == Polynomial::Kind::Meet ? Polynomial::meet(std::move(parts)) : Polynomial::join(std::move(parts));
  }

  std::string names;
  for (auto v : vertices) names += (names.empty() ? "" : ", ") + g.subjects()[v];
  throw Error(ErrorCode::NotDecomposable, "subgroup {" + names + "} has neither an alliance nor a conflict split");
}

void collect_relations(const Polynomial& p, std::vector<RelationSpec>& out) {
  if (p.kind() == Polynomial::Kind::Var) return;
  const auto rel = p.kind() == Polynomial::Kind::Meet ? Relation::Alliance : Relation::Conflict;
  const auto& kids = p.children();
  for (std::size_t i = 0; i < kids.size(); ++i) {
    collect_relations(kids[i], out);
    const auto left = kids[i].subjects();
    for (std::size_t j = i + 1; j < kids.size(); ++j) {
      for (const auto& a : left) {
        for (const auto& b : kids[j].subjects()) out.push_back({a, b, rel});
      }
    }
  }
}

}  // namespace

Polynomial Polynomial::parse(std::string_view text) { return PolynomialParser(text).parse(); }

Polynomial decompose(const RelationshipGraph& g) {
  std::vector<std::size_t> all(g.size());
  std::iota(all.begin(), all.end(), 0);
  return decompose_subset(g, all);
}

RelationshipGraph polynomial_to_graph(const Polynomial& p) {
  std::vector<RelationSpec> relations;
  collect_relations(p, relations);
  return RelationshipGraph(p.subjects(), relations);
}

}  // namespace rgt
