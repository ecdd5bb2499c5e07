#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <initializer_list>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cds/ast.hpp"
#include "cds/heap.hpp"

namespace cds {

/// Ground value packed into one word: an interned symbol id or an integer
/// key, tagged in the lowest bit.
class Value {
public:
  Value() = default;
  static Value sym(const std::string& name);
  static Value num(std::int64_t n) { return Value(static_cast<std::int64_t>(static_cast<std::uint64_t>(n) << 1)); }

  bool is_symbol() const { return (raw_ & 1) != 0; }
  std::int64_t integer() const { return raw_ >> 1; }
  std::int64_t raw() const { return raw_; }
  std::string str() const;

  bool operator==(const Value&) const = default;
  auto operator<=>(const Value&) const = default;

private:
  explicit Value(std::int64_t raw) : raw_(raw) {}
  std::int64_t raw_ = 0;
};

inline constexpr std::size_t kMaxArity = 6;

/// Fixed-capacity tuple kept inline to avoid heap traffic in joins.
class Tuple {
public:
  Tuple() = default;
  Tuple(std::initializer_list<Value> vs) {
    for (const auto& v : vs) push_back(v);
  }
  void push_back(Value v) { vals_[n_++] = v; }
  void reserve(std::size_t) {}
  std::size_t size() const { return n_; }
  bool empty() const { return n_ == 0; }
  const Value& operator[](std::size_t i) const { return vals_[i]; }
  const Value* begin() const { return vals_.data(); }
  const Value* end() const { return vals_.data() + n_; }
  bool operator==(const Tuple& o) const { return n_ == o.n_ && std::equal(begin(), end(), o.begin()); }

private:
  std::array<Value, kMaxArity> vals_{};
  std::uint8_t n_ = 0;
};

struct TupleHash {
  std::size_t operator()(const Tuple& t) const noexcept;
};

/// Set of tuples with lazily built hash indexes over bound positions.
/// Both the set and the indexes use open addressing over row numbers.
class Relation {
public:
  Relation() = default;
  Relation(const Relation& o) : rows_(o.rows_), slots_(o.slots_) {}
  Relation(Relation&&) noexcept = default;
  Relation& operator=(const Relation& o) {
    if (this != &o) {
      rows_ = o.rows_;
      slots_ = o.slots_;
      indexes_.clear();
    }
    return *this;
  }
  Relation& operator=(Relation&&) noexcept = default;

  bool insert(const Tuple& t);
  bool contains(const Tuple& t) const;
  std::size_t size() const { return rows_.size(); }
  const std::vector<Tuple>& rows() const { return rows_; }

  /// Calls `fn(row)` for each row whose positions in `mask` equal the
  /// entries of `probe` (which only holds the masked positions, in order).
  template <class Fn>
  void lookup(std::uint32_t mask, const Tuple& probe, Fn&& fn) const {
    const Index& idx = index_for(mask);
    if (idx.head.empty()) return;
    std::size_t h = TupleHash{}(probe) & (idx.head.size() - 1);
    for (std::int32_t r = idx.head[h]; r >= 0; r = idx.next[static_cast<std::size_t>(r)]) {
      const Tuple& row = rows_[static_cast<std::size_t>(r)];
      if (matches(row, mask, probe)) fn(row);
    }
  }

private:
  struct Index {
    std::uint32_t mask = 0;
    std::size_t built = 0;
    std::vector<std::int32_t> head;
    std::vector<std::int32_t> next;
  };
  static bool matches(const Tuple& row, std::uint32_t mask, const Tuple& probe);
  static Tuple project(const Tuple& row, std::uint32_t mask);
  const Index& index_for(std::uint32_t mask) const;
  void rehash(std::size_t cap);

  std::vector<Tuple> rows_;
  std::vector<std::int32_t> slots_; // row number + 1, 0 when empty
  mutable std::vector<std::unique_ptr<Index>> indexes_; // stable across nested lookups
};

/// Least model of a theory over one heap state (base facts included).
class Model {
public:
  Model() = default;
  Model(std::shared_ptr<const std::vector<std::string>> names, std::vector<Relation> rels);

  bool contains(const std::string& pred, const Tuple& t) const;
  const Relation* relation(const std::string& pred) const;
  /// Every atom rendered as `pred(a,b)`; base predicates excluded when
  /// `derived_only`.
  std::set<std::string> atoms(bool derived_only = false) const;

private:
  friend class Evaluator;
  std::shared_ptr<const std::vector<std::string>> names_;
  std::vector<Relation> rels_;
};

using Assignment = std::map<std::string, Value>;

/// Compiled stratified program; evaluation is const and thread-safe.
class Evaluator {
public:
  explicit Evaluator(const Theory& theory);

  Model evaluate(const HeapState& state) const;
  const Theory& theory() const { return theory_; }

  /// Enumerates assignments to the variables of a conjunctive query over a
  /// model. `is_var` decides which constant terms act as variables (used to
  /// treat knowledge node symbols as unknowns).
  std::vector<Assignment> solve(const std::vector<Literal>& body, const Model& model, const Assignment& fixed,
                                const std::function<bool(const Term&)>& is_var) const;

  struct CTerm {
    bool var = false;
    int idx = 0;
    Value c;
  };
  struct CLit {
    Literal::Kind kind = Literal::Kind::Positive;
    int pred = -1;
    std::vector<CTerm> args;
    CmpOp op = CmpOp::Less;
    CTerm lhs, rhs;
  };
  struct CRule {
    int head = -1;
    std::vector<CTerm> head_args;
    std::vector<CLit> body;
    int nvars = 0;
    std::vector<std::vector<int>> plans; // plans[0]: full; plans[i+1]: body[i] drawn from delta
  };

private:
  int pred_id(const std::string& name) const;

  Theory theory_;
  std::shared_ptr<std::vector<std::string>> names_;
  std::map<std::string, int> ids_;
  std::vector<std::vector<CRule>> strata_; // rules grouped by head stratum
  std::vector<std::set<int>> stratum_preds_;
  int edge_id_ = -1;
  int key_id_ = -1;
};

Model derive(const Theory& theory, const HeapState& state);

/// Truth of a knowledge literal under a binding; throws std::invalid_argument
/// when a node symbol or key variable is unbound.
bool holds(const Literal& lit, const Model& model, const Binding& binding, const Theory& theory);

/// Whether a constant in a knowledge literal names a node symbol.
bool is_node_symbol(const Term& t, const Theory& theory);

} // namespace cds
