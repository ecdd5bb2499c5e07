#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cds {

enum class TermKind { Constant, Variable, Integer };

struct Term {
  TermKind kind = TermKind::Constant;
  std::string name;       // identifier for constants and variables
  std::int64_t value = 0; // integer keys only
  bool sentinel = false;  // set for the theory's sentinel constants (h, t)

  static Term constant(std::string n) { return {TermKind::Constant, std::move(n), 0, false}; }
  static Term variable(std::string n) { return {TermKind::Variable, std::move(n), 0, false}; }
  static Term integer(std::int64_t v) { return {TermKind::Integer, {}, v, false}; }

  bool is_variable() const { return kind == TermKind::Variable; }
  bool is_constant() const { return kind == TermKind::Constant; }
  bool is_integer() const { return kind == TermKind::Integer; }

  bool operator==(const Term&) const = default;
};

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  std::size_t arity() const { return args.size(); }
  bool operator==(const Atom&) const = default;
};

enum class CmpOp { Less, Equal };

struct Comparison {
  Term lhs;
  CmpOp op = CmpOp::Less;
  Term rhs;
  bool operator==(const Comparison&) const = default;
};

/// A body literal: a positive atom, a negation-as-failure atom, or a key
/// comparison.
struct Literal {
  enum class Kind { Positive, Negative, Compare };
  Kind kind = Kind::Positive;
  Atom atom;
  Comparison cmp;

  static Literal positive(Atom a) { return {Kind::Positive, std::move(a), {}}; }
  static Literal negative(Atom a) { return {Kind::Negative, std::move(a), {}}; }
  static Literal compare(Comparison c) { return {Kind::Compare, {}, std::move(c)}; }

  bool is_atom() const { return kind != Kind::Compare; }
  bool operator==(const Literal&) const = default;
};

struct Rule {
  std::optional<Atom> head; // empty for constraints
  std::vector<Literal> body;

  std::vector<Atom> positive_body() const;
  std::vector<Atom> negative_body() const;
  std::vector<Comparison> comparisons() const;

  bool operator==(const Rule&) const = default;
};

enum class ShapeKind { Chain, Tree, FullTree };

struct Sentinel {
  std::string name;
  bool max_key = false; // true: carries the maximum key of the domain
  bool operator==(const Sentinel&) const = default;
};

struct Theory {
  std::vector<Rule> rules;
  std::map<std::string, std::size_t> fluents; // name -> arity
  std::map<std::string, std::size_t> statics;
  std::vector<Sentinel> sentinels;
  std::string root;
  ShapeKind shape = ShapeKind::Chain;

  bool is_fluent(const std::string& p) const { return fluents.count(p) != 0; }
  bool is_static(const std::string& p) const { return statics.count(p) != 0; }
  std::optional<std::size_t> arity_of(const std::string& p) const;
  bool is_sentinel(const std::string& name) const;
  std::optional<Sentinel> sentinel(const std::string& name) const;
  /// Arity of the base `edge` fluent: 2 for chains, 3 for labelled trees.
  std::size_t edge_arity() const;
  /// Name of the sentinel traversals and structure enumeration start from.
  std::string start_sentinel() const;

  bool operator==(const Theory&) const = default;
};

/// `link(from, to[, label])`; `to == "nil"` clears the successor.
struct LinkStep {
  std::string from;
  std::string to;
  std::string label; // empty for unlabelled chains
  bool operator==(const LinkStep&) const = default;
};

struct BlockSpec {
  std::string id;
  std::vector<std::string> fresh; // node symbols allocated by the block
  std::vector<Literal> pre;
  std::vector<Literal> post;
  std::vector<LinkStep> steps;

  /// Node symbols in order of first appearance across pre, then fresh.
  std::vector<std::string> node_symbols() const;
  bool is_fresh(const std::string& sym) const;
  bool operator==(const BlockSpec&) const = default;
};

/// Recursive key-directed search. Each descend clause has exactly one
/// `edge(X, Y, ...)` dereference; `X` is the cursor, `Y` the next node and
/// `K` the searched key.
struct TraversalSpec {
  std::vector<std::vector<Literal>> descend;
  bool operator==(const TraversalSpec&) const = default;
};

struct OperationSpec {
  std::string name;
  std::vector<BlockSpec> blocks;
  std::optional<TraversalSpec> traversal;

  bool destructive() const;
  const BlockSpec* block(const std::string& id) const;
  bool operator==(const OperationSpec&) const = default;
};

struct PrimitiveSpec {
  std::string name = "link";
  std::size_t modifies_arg = 0;
  std::string caused_fluent = "edge";
  std::string read_primitive = "deref";
  std::string used_fluent = "edge";
  bool operator==(const PrimitiveSpec&) const = default;
};

struct KnowledgeBase {
  std::vector<OperationSpec> operations;
  PrimitiveSpec primitives;
  Theory theory;

  const OperationSpec* operation(const std::string& name) const;
  const TraversalSpec* traversal() const;
  std::vector<const OperationSpec*> destructive_operations() const;
};

inline constexpr std::int64_t kMinKey = 0;
inline constexpr std::int64_t kMaxKey = 1000;
inline constexpr std::size_t kMaxBlockSteps = 8;

inline const std::set<std::string>& label_constants() {
  static const std::set<std::string> labels{"left", "right"};
  return labels;
}

std::string to_string(const Term& t);
std::string to_string(const Atom& a);
std::string to_string(const Comparison& c);
std::string to_string(const Literal& l);
std::string to_string(const Rule& r);
std::string to_string(const LinkStep& s);

} // namespace cds
