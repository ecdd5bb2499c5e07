#include "cds/tasks.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace cds {

int default_horizon(const BlockSpec& block) { return static_cast<int>(block.steps.size()) + 2; }

std::vector<Literal> fluent_conjuncts(const Theory& th, const BlockSpec& block) {
  std::vector<Literal> out;
  for (const auto& l : block.pre)
    if (l.is_atom() && th.is_fluent(l.atom.predicate)) out.push_back(l);
  return out;
}

FalsifyReport task1_unfalsify(const Context& ctx, const OperationSpec& op, const BlockSpec& block,
                              const HeapState& delta, const std::vector<Binding>& bindings, int horizon) {
  FalsifyReport r;
  r.op = op.name;
  r.block = block.id;
  r.horizon = horizon;
  r.bindings_checked = bindings.size();
  auto lits = fluent_conjuncts(ctx.theory(), block);
  for (const auto& l : lits) r.verdicts.push_back({l, false, std::nullopt, {}});
  InterferenceModel m = build_interference(ctx.kb());
  for (const auto& b : bindings) {
    HeapState start = prepare_fresh(delta, block, b);
    auto found = falsify_search(ctx, m, start, horizon, LockSet{}, lits, b);
    for (std::size_t i = 0; i < lits.size(); ++i) {
      if (r.verdicts[i].falsifiable || !found.witnesses[i]) continue;
      r.verdicts[i].falsifiable = true;
      r.verdicts[i].witness = std::move(found.witnesses[i]);
      r.verdicts[i].binding = b;
    }
  }
  for (const auto& v : r.verdicts)
    if (!v.falsifiable) r.unfalsify.push_back(v.literal);
  return r;
}

AdequacyReport task2_adequacy(const Context& ctx, const OperationSpec& op, const BlockSpec& block,
                              const HeapState& delta, const Binding& binding, const LockSet& locks, GuardMode guard,
                              const LockHeuristic& heuristic, int horizon) {
  AdequacyReport r;
  r.op = op.name;
  r.block = block.id;
  r.locks = locks;
  r.binding = binding;
  r.guard = guard;
  r.horizon = horizon;
  r.lock_symbols = heuristic_symbols(block, heuristic);
  auto lits = fluent_conjuncts(ctx.theory(), block);
  InterferenceModel m = build_interference(ctx.kb(), guard, heuristic);
  HeapState start = prepare_fresh(delta, block, binding);
  auto found = falsify_search(ctx, m, start, horizon, locks, lits, binding);
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (!found.witnesses[i]) continue;
    r.adequate = false;
    r.witness = std::move(found.witnesses[i]);
    r.falsified = lits[i];
    break;
  }
  return r;
}

AdequacyReport task2_adequacy_all(const Context& ctx, const OperationSpec& op, const BlockSpec& block,
                                  const HeapState& delta, const std::vector<Binding>& bindings, GuardMode guard,
                                  const LockHeuristic& heuristic, int horizon) {
  std::optional<AdequacyReport> first;
  for (const auto& b : bindings) {
    HeapState start = prepare_fresh(delta, block, b);
    LockSet locks = window_heuristic(block, b, start, ctx.theory(), heuristic);
    auto r = task2_adequacy(ctx, op, block, delta, b, locks, guard, heuristic, horizon);
    if (!r.adequate) return r;
    if (!first) first = std::move(r);
  }
  if (first) return *first;
  AdequacyReport empty;
  empty.op = op.name;
  empty.block = block.id;
  empty.guard = guard;
  empty.horizon = horizon;
  empty.lock_symbols = heuristic_symbols(block, heuristic);
  return empty;
}

std::optional<OrderRejection> check_order(const Context& ctx, const BlockSpec& block, const HeapState& delta,
                                          const Binding& binding, const ProgramOrder& order,
                                          const InvariantSpec& inv) {
  const Theory& th = ctx.theory();
  HeapState s = prepare_fresh(delta, block, binding);
  std::set<std::string> must_stay;
  if (inv.reach_persistence) {
    Model m0 = ctx.derive(s);
    std::set<std::string> exempt;
    for (const auto& l : block.post)
      if (l.kind == Literal::Kind::Negative && l.atom.predicate == "reach" && l.atom.args.size() == 1)
        if (auto n = resolve_node(binding, l.atom.args[0].name, th)) exempt.insert(*n);
    for (const auto& [n, k] : s.keys)
      if (m0.contains("reach", {Value::sym(n)}) && !exempt.count(n)) must_stay.insert(n);
  }
  auto reject = [&](std::size_t executed, std::string reason) {
    return OrderRejection{order, executed, s, std::move(reason)};
  };
  for (std::size_t i = 0; i < order.size(); ++i) {
    const LinkStep& st = block.steps.at(order[i] - 1);
    try {
      s = apply_step(th, s, st, binding);
    } catch (const std::invalid_argument& e) {
      return reject(i, e.what());
    }
    Model m = ctx.derive(s);
    if (inv.root && !ctx.root_holds(m))
      return reject(i + 1, th.root + " fails after " + to_string(st) + " (step " + std::to_string(order[i]) + ")");
    for (const auto& n : must_stay)
      if (!m.contains("reach", {Value::sym(n)}))
        return reject(i + 1, "reach(" + n + ") lost after " + to_string(st));
  }
  Model m = ctx.derive(s);
  for (const auto& l : block.post)
    if (!holds(l, m, binding, th)) return reject(order.size(), "post literal " + to_string(l) + " fails");
  return std::nullopt;
}

OrderReport task3_program_order(const Context& ctx, const OperationSpec& op, const BlockSpec& block,
                                const HeapState& delta, const Binding& binding, const InvariantSpec& inv) {
  OrderReport r;
  r.op = op.name;
  r.block = block.id;
  ProgramOrder perm(block.steps.size());
  std::iota(perm.begin(), perm.end(), std::size_t{1});
  // The identity permutation comes first lexicographically, so the
  // original order leads whenever it is valid.
  do {
    if (auto rej = check_order(ctx, block, delta, binding, perm, inv))
      r.rejected.push_back(std::move(*rej));
    else
      r.valid.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return r;
}

namespace {

class ModelCache {
public:
  explicit ModelCache(const Context& ctx) : ctx_(ctx) {}
  const Model& get(const HeapState& s) {
    auto fp = s.fingerprint();
    auto it = cache_.find(fp);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(fp, ctx_.derive(s)).first->second;
  }

private:
  const Context& ctx_;
  std::unordered_map<std::string, Model> cache_;
};

std::optional<std::string> deref(const Context& ctx, const Model& m, const std::string& cursor, std::int64_t key) {
  const TraversalSpec* tr = ctx.kb().traversal();
  Assignment fixed{{"X", Value::sym(cursor)}, {"K", Value::num(key)}};
  auto no_symbols = [](const Term&) { return false; };
  for (const auto& clause : tr->descend) {
    auto sols = ctx.evaluator().solve(clause, m, fixed, no_symbols);
    for (const auto& a : sols) {
      auto it = a.find("Y");
      if (it != a.end() && it->second.is_symbol()) return it->second.str();
    }
  }
  return std::nullopt;
}

std::vector<std::string> traverse_with(const Context& ctx, const Model& m, const HeapState& s, std::int64_t key) {
  std::vector<std::string> path{ctx.theory().start_sentinel()};
  while (path.size() <= s.keys.size() + 1) {
    auto next = deref(ctx, m, path.back(), key);
    if (!next) break;
    path.push_back(*next);
  }
  return path;
}

} // namespace

std::vector<std::string> oracle_traversal(const Context& ctx, const HeapState& s, std::int64_t key) {
  if (!ctx.kb().traversal()) throw std::invalid_argument("knowledge base has no traversal");
  return traverse_with(ctx, ctx.derive(s), s, key);
}

KeyMoveReport task4_keymove_on(const Context& ctx, const OperationSpec& op, const HeapState& start, int horizon,
                               bool reverse_actions) {
  if (!ctx.kb().traversal()) throw std::invalid_argument("knowledge base has no traversal");
  KeyMoveReport r;
  r.op = op.name;
  r.horizon = horizon;
  InterferenceModel m = restrict_to(build_interference(ctx.kb()), op.name);
  ModelCache cache(ctx);
  const Theory& th = ctx.theory();

  const Model& m0 = cache.get(start);
  std::vector<std::string> targets;
  for (const auto& [n, k] : start.keys)
    if (!th.is_sentinel(n) && m0.contains("reach", {Value::sym(n)}) && m0.contains("present", {Value::num(k)}))
      targets.push_back(n);
  std::sort(targets.begin(), targets.end(), [&](const auto& a, const auto& b) { return node_less(start, a, b); });

  for (const auto& target : targets) {
    const std::int64_t key = start.key(target);
    const Value pk = Value::num(key);
    auto sees = [&](const HeapState& s) {
      auto p = traverse_with(ctx, cache.get(s), s, key);
      return std::find(p.begin(), p.end(), target) != p.end();
    };
    std::unordered_set<std::string> memo;
    Trajectory traj;
    traj.states.push_back(start);
    std::vector<std::string> cursors{th.start_sentinel()};
    const int cap = horizon + static_cast<int>(start.keys.size()) + 4;

    std::function<bool(int, bool)> dfs = [&](int tick, bool seen) -> bool {
      const HeapState& s = traj.states.back();
      const std::string& cursor = cursors.back();
      std::string id = s.fingerprint() + "|" + cursor + "|" + std::to_string(tick) + (seen ? "|1" : "|0");
      if (!memo.insert(id).second) return false;
      ++r.explored;
      if (tick > cap) return false;
      auto next = deref(ctx, cache.get(s), cursor, key);
      if (!next) {
        if (!seen) return false;
        r.witness = KeyMoveWitness{"", traj, cursors, target, key};
        return true;
      }
      if (*next == target) return false;
      std::vector<ActionEvent> evs{ActionEvent::idle()};
      if (tick < horizon)
        for (auto& a : enabled_actions(ctx, m, s, LockSet{})) evs.push_back(ActionEvent::interference(std::move(a)));
      if (reverse_actions) std::reverse(evs.begin() + 1, evs.end());
      cursors.push_back(*next);
      for (const auto& e : evs) {
        HeapState after = apply_event(traj.states.back(), e);
        if (!cache.get(after).contains("present", {pk})) continue;
        bool seen2 = seen || sees(after);
        traj.states.push_back(std::move(after));
        traj.events.push_back(e);
        bool hit = dfs(tick + 1, seen2);
        if (hit) return true;
        traj.states.pop_back();
        traj.events.pop_back();
      }
      cursors.pop_back();
      return false;
    };
    if (dfs(0, sees(start))) {
      r.keymove = true;
      return r;
    }
  }
  return r;
}

KeyMoveReport task4_keymove(const Context& ctx, const OperationSpec& op, int depth, int horizon, bool reverse_actions) {
  if (!ctx.kb().traversal()) throw std::invalid_argument("knowledge base has no traversal");
  KeyMoveReport total;
  total.op = op.name;
  total.horizon = horizon;
  for (const auto& blk : op.blocks) {
    Delta d = least_delta_for_block(ctx, op, blk, depth);
    int h = horizon < 0 ? default_horizon(blk) : horizon;
    total.horizon = std::max(total.horizon, h);
    auto r = task4_keymove_on(ctx, op, d.state, h, reverse_actions);
    total.explored += r.explored;
    if (r.keymove) {
      total.keymove = true;
      total.witness = std::move(r.witness);
      total.witness->block = blk.id;
      return total;
    }
  }
  return total;
}

} // namespace cds
