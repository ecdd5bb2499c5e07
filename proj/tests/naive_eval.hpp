#pragma once

// Independent reference evaluator: naive iteration to a fixed point per
// stratum, strings for values, no indexes. Used to cross-check derive().

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cds/ast.hpp"
#include "cds/heap.hpp"

namespace naive {

using Row = std::vector<std::string>;
using Facts = std::map<std::string, std::set<Row>>;
using Env = std::map<std::string, std::string>;

inline bool is_int(const std::string& s) {
  return !s.empty() && std::all_of(s.begin() + (s[0] == '-' ? 1 : 0), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

inline std::optional<std::string> value(const cds::Term& t, const Env& env) {
  if (t.is_integer()) return std::to_string(t.value);
  if (t.is_constant()) return t.name;
  auto it = env.find(t.name);
  if (it == env.end()) return std::nullopt;
  return it->second;
}

inline void solve(const std::vector<cds::Literal>& pos, const std::vector<cds::Literal>& rest, std::size_t i,
                  Env& env, const Facts& facts, const std::function<void(const Env&)>& emit) {
  if (i < pos.size()) {
    const auto& a = pos[i].atom;
    auto it = facts.find(a.predicate);
    if (it == facts.end()) return;
    for (const auto& row : it->second) {
      if (row.size() != a.args.size()) continue;
      Env saved = env;
      bool ok = true;
      for (std::size_t j = 0; j < row.size() && ok; ++j) {
        auto v = value(a.args[j], env);
        if (v)
          ok = *v == row[j];
        else
          env[a.args[j].name] = row[j];
      }
      if (ok) solve(pos, rest, i + 1, env, facts, emit);
      env = saved;
    }
    return;
  }
  // Filters: evaluate whatever is bound; '=' may bind one side.
  Env local = env;
  std::vector<bool> done(rest.size(), false);
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t j = 0; j < rest.size(); ++j) {
      if (done[j]) continue;
      const auto& l = rest[j];
      if (l.kind == cds::Literal::Kind::Compare) {
        auto lv = value(l.cmp.lhs, local), rv = value(l.cmp.rhs, local);
        if (l.cmp.op == cds::CmpOp::Equal && (lv.has_value() != rv.has_value())) {
          if (lv)
            local[l.cmp.rhs.name] = *lv;
          else
            local[l.cmp.lhs.name] = *rv;
          done[j] = progress = true;
          continue;
        }
        if (!lv || !rv) continue;
        bool ok;
        if (l.cmp.op == cds::CmpOp::Equal)
          ok = *lv == *rv;
        else
          ok = is_int(*lv) && is_int(*rv) && std::stoll(*lv) < std::stoll(*rv);
        if (!ok) return;
        done[j] = progress = true;
      } else {
        Row row;
        bool bound = true;
        for (const auto& t : l.atom.args) {
          auto v = value(t, local);
          if (!v) bound = false;
          else row.push_back(*v);
        }
        if (!bound) continue;
        auto it = facts.find(l.atom.predicate);
        bool present = it != facts.end() && it->second.count(row);
        if (present) return;
        done[j] = progress = true;
      }
    }
  }
  if (std::find(done.begin(), done.end(), false) != done.end()) return;
  emit(local);
}

inline std::set<std::string> model(const cds::Theory& th, const cds::HeapState& s) {
  Facts facts;
  bool labelled = th.edge_arity() == 3;
  for (const auto& [e, to] : s.succ) {
    if (labelled && e.second != cds::kNextLabel)
      facts["edge"].insert({e.first, to, e.second});
    else if (!labelled && e.second == cds::kNextLabel)
      facts["edge"].insert({e.first, to});
  }
  for (const auto& [n, k] : s.keys) facts["key"].insert({n, std::to_string(k)});

  std::set<std::string> heads;
  for (const auto& r : th.rules)
    if (r.head) heads.insert(r.head->predicate);
  std::map<std::string, int> level;
  for (const auto& h : heads) level[h] = 0;
  for (std::size_t round = 0; round <= heads.size() + 1; ++round)
    for (const auto& r : th.rules) {
      if (!r.head) continue;
      int& lh = level[r.head->predicate];
      for (const auto& l : r.body) {
        if (!l.is_atom() || !heads.count(l.atom.predicate)) continue;
        int need = level[l.atom.predicate] + (l.kind == cds::Literal::Kind::Negative ? 1 : 0);
        lh = std::max(lh, need);
      }
    }
  int top = 0;
  for (const auto& [p, l] : level) top = std::max(top, l);

  for (int L = 0; L <= top; ++L) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& r : th.rules) {
        if (!r.head || level[r.head->predicate] != L) continue;
        std::vector<cds::Literal> pos, rest;
        for (const auto& l : r.body) (l.kind == cds::Literal::Kind::Positive ? pos : rest).push_back(l);
        std::vector<Row> out;
        Env env;
        solve(pos, rest, 0, env, facts, [&](const Env& e) {
          Row row;
          for (const auto& t : r.head->args) row.push_back(*value(t, e));
          out.push_back(row);
        });
        for (auto& row : out)
          if (facts[r.head->predicate].insert(row).second) changed = true;
      }
    }
  }
  std::set<std::string> atoms;
  for (const auto& [p, rows] : facts)
    for (const auto& row : rows) {
      std::string a = p;
      if (!row.empty()) {
        a += "(";
        for (std::size_t i = 0; i < row.size(); ++i) a += (i ? "," : "") + row[i];
        a += ")";
      }
      atoms.insert(a);
    }
  return atoms;
}

/// Random heap over at most `max_nodes` nodes (sentinels included) with
/// arbitrary, possibly malformed, successor links.
inline cds::HeapState random_heap(const cds::Theory& th, std::mt19937& rng, std::size_t max_nodes) {
  cds::HeapState s;
  std::vector<std::string> nodes;
  for (const auto& sn : th.sentinels) {
    s.add_node(sn.name, sn.max_key ? cds::kMaxKey : cds::kMinKey);
    nodes.push_back(sn.name);
  }
  std::size_t extra = std::uniform_int_distribution<std::size_t>(0, max_nodes - nodes.size())(rng);
  std::vector<std::int64_t> keys;
  for (std::int64_t k = 10; k < cds::kMaxKey && keys.size() < 40; k += 10) keys.push_back(k);
  std::shuffle(keys.begin(), keys.end(), rng);
  for (std::size_t i = 0; i < extra; ++i) {
    std::string n = "n" + std::to_string(i + 1);
    s.add_node(n, keys[i]);
    nodes.push_back(n);
  }
  std::vector<std::string> labels;
  if (th.edge_arity() == 3)
    labels = {"left", "right"};
  else
    labels = {cds::kNextLabel};
  std::uniform_int_distribution<std::size_t> pick(0, nodes.size());
  for (const auto& n : nodes)
    for (const auto& l : labels) {
      std::size_t j = pick(rng);
      if (j < nodes.size()) s.set_succ(n, l, nodes[j]);
    }
  return s;
}

} // namespace naive
