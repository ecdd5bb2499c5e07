#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cds/ast.hpp"

namespace cds {

/// Label used for the successor of unlabelled (chain) edges.
inline const std::string kNextLabel = "next";

/// A concrete finite heap: nodes with immutable keys and one successor per
/// (node, label).
struct HeapState {
  std::map<std::string, std::int64_t> keys;
  std::map<std::pair<std::string, std::string>, std::string> succ;
  std::int64_t clock = 0;

  bool has_node(const std::string& n) const { return keys.count(n) != 0; }
  std::int64_t key(const std::string& n) const { return keys.at(n); }
  std::optional<std::string> successor(const std::string& n, const std::string& label) const;
  void add_node(const std::string& n, std::int64_t k) { keys[n] = k; }
  void set_succ(const std::string& from, const std::string& label, const std::string& to);
  void clear_succ(const std::string& from, const std::string& label);

  /// Identity of the heap ignoring the clock.
  std::string fingerprint() const;
  /// `edge(h,n1). key(n1,10).` style facts.
  std::string to_facts() const;

  bool same_heap(const HeapState& o) const { return keys == o.keys && succ == o.succ; }
  bool operator==(const HeapState&) const = default;
};

/// Id given to a fresh node carrying `key`; unique because fresh keys never
/// collide with existing keys.
std::string fresh_node_id(std::int64_t key);

/// Nodes ordered interior-first, then by natural name order (n2 < n10).
bool node_less(const HeapState& s, const std::string& a, const std::string& b);

/// Knowledge symbols bound to node ids and key variables bound to integers.
struct Binding {
  std::map<std::string, std::string> nodes;
  std::map<std::string, std::int64_t> keys;
  std::map<std::string, std::int64_t> fresh; // fresh symbol -> key of its new node

  std::optional<std::string> node(const std::string& sym) const;
  std::optional<std::int64_t> key(const std::string& var) const;
  std::string to_string() const;
  bool operator==(const Binding&) const = default;
  auto operator<=>(const Binding&) const = default;
};

/// Nodes to lock, kept in acquisition order (ascending key).
struct LockSet {
  std::vector<std::string> nodes;

  static LockSet of(const HeapState& s, std::vector<std::string> ns);
  bool contains(const std::string& n) const;
  bool intersects(const LockSet& o) const;
  bool empty() const { return nodes.empty(); }
  bool operator==(const LockSet&) const = default;
};

/// Adds the block's fresh nodes (with the keys recorded in the binding) to
/// a copy of `s`. Fresh nodes already present are left untouched.
HeapState prepare_fresh(const HeapState& s, const BlockSpec& block, const Binding& b);

/// Resolves a knowledge symbol (or sentinel constant) to a node id.
std::optional<std::string> resolve_node(const Binding& b, const std::string& sym, const Theory& th);

} // namespace cds
