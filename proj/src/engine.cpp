#include "cds/engine.hpp"

#include <memory>
#include <stdexcept>
#include <unordered_map>

namespace cds {

HeapState apply_step(const Theory& th, const HeapState& s, const LinkStep& step, const Binding& b) {
  GroundStep g = ground_step(step, b, th);
  if (th.shape == ShapeKind::Chain && th.sentinels.size() > 1 && g.from == th.sentinels[1].name)
    throw std::invalid_argument("cannot link from the tail sentinel " + g.from);
  HeapState out = s;
  apply_ground(out, g);
  ++out.clock;
  return out;
}

std::string ActionEvent::describe() const {
  switch (kind) {
  case Kind::Idle: return "idle";
  case Kind::Interference: return action->describe();
  case Kind::ProgramStep: return "self " + step->to_string();
  }
  return {};
}

HeapState apply_event(const HeapState& s, const ActionEvent& e) {
  switch (e.kind) {
  case ActionEvent::Kind::Interference: return apply_action(s, *e.action);
  case ActionEvent::Kind::ProgramStep: {
    HeapState out = s;
    apply_ground(out, *e.step);
    ++out.clock;
    return out;
  }
  case ActionEvent::Kind::Idle: break;
  }
  HeapState out = s;
  ++out.clock;
  return out;
}

void for_each_trajectory(const Context& ctx, const InterferenceModel& m, const HeapState& start, int horizon,
                         const LockSet& locks, const std::function<bool(const Trajectory&)>& visit) {
  Trajectory t;
  t.states.push_back(start);
  bool stop = false;
  std::function<void(int)> rec = [&](int remaining) {
    if (stop) return;
    if (remaining == 0) {
      if (!visit(t)) stop = true;
      return;
    }
    const HeapState cur = t.states.back(); // push_back below may reallocate
    std::vector<ActionEvent> evs{ActionEvent::idle()};
    for (auto& a : enabled_actions(ctx, m, cur, locks)) evs.push_back(ActionEvent::interference(std::move(a)));
    for (auto& e : evs) {
      t.states.push_back(apply_event(cur, e));
      t.events.push_back(std::move(e));
      rec(remaining - 1);
      t.states.pop_back();
      t.events.pop_back();
      if (stop) return;
    }
  };
  for (int len = 0; len <= horizon && !stop; ++len) rec(len);
}

std::optional<Trajectory> satisfiable(const Context& ctx, const InterferenceModel& m, const HeapState& start,
                                      int horizon, const LockSet& locks,
                                      const std::function<bool(const Trajectory&)>& cond) {
  std::optional<Trajectory> found;
  for_each_trajectory(ctx, m, start, horizon, locks, [&](const Trajectory& t) {
    if (!cond(t)) return true;
    found = t;
    return false;
  });
  return found;
}

bool falsifies(const Context& ctx, const Trajectory& t, const Literal& lit, const Binding& b) {
  if (t.states.empty()) return false;
  bool prev = holds(lit, ctx.derive(t.states[0]), b, ctx.theory());
  for (std::size_t i = 1; i < t.states.size(); ++i) {
    bool cur = holds(lit, ctx.derive(t.states[i]), b, ctx.theory());
    if (prev && !cur) return true;
    prev = cur;
  }
  return false;
}

FalsifySearch falsify_search(const Context& ctx, const InterferenceModel& m, const HeapState& start, int horizon,
                             const LockSet& locks, const std::vector<Literal>& lits, const Binding& b) {
  struct Node {
    HeapState state;
    std::vector<bool> truth;
    int parent;
    std::optional<ActionEvent> via;
    int depth;
    std::shared_ptr<const Model> model; // kept only while the node awaits expansion
  };
  FalsifySearch out;
  out.witnesses.resize(lits.size());
  std::size_t open = lits.size();
  // The matching model also answers the literals: candidate nodes are
  // unlinked and never bound by `b`.
  auto model_of = [&](const HeapState& s) { return std::make_shared<const Model>(ctx.derive(matching_state(ctx, s))); };
  auto truth_of = [&](const Model& md) {
    std::vector<bool> v;
    for (const auto& l : lits) v.push_back(holds(l, md, b, ctx.theory()));
    return v;
  };
  std::vector<Node> nodes;
  std::unordered_map<std::string, int> seen;
  {
    auto md = model_of(start);
    nodes.push_back({start, truth_of(*md), -1, std::nullopt, 0, md});
  }
  seen[start.fingerprint()] = 0;
  auto path_to = [&](int idx) {
    std::vector<int> chain;
    for (int i = idx; i >= 0; i = nodes[static_cast<std::size_t>(i)].parent) chain.push_back(i);
    Trajectory t;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      const Node& n = nodes[static_cast<std::size_t>(*it)];
      if (n.via) t.events.push_back(*n.via);
      t.states.push_back(n.state);
    }
    return t;
  };
  for (std::size_t q = 0; q < nodes.size() && open > 0; ++q) {
    std::shared_ptr<const Model> cur_model = std::move(nodes[q].model);
    if (nodes[q].depth >= horizon) continue;
    HeapState cur = nodes[q].state;
    std::vector<bool> cur_truth = nodes[q].truth;
    int depth = nodes[q].depth;
    for (auto& a : enabled_actions(ctx, m, cur, locks, cur_model.get())) {
      HeapState next = apply_action(cur, a);
      // Clocks differ along paths; identify states by heap only.
      std::string fp = next.fingerprint();
      auto it = seen.find(fp);
      std::shared_ptr<const Model> md;
      std::vector<bool> truth;
      if (it != seen.end()) {
        truth = nodes[static_cast<std::size_t>(it->second)].truth;
      } else if (depth + 1 < horizon) {
        md = model_of(next);
        truth = truth_of(*md);
      } else {
        // Frontier states are never expanded; the plain model suffices.
        truth = truth_of(ctx.derive(next));
      }
      ActionEvent ev = ActionEvent::interference(std::move(a));
      for (std::size_t i = 0; i < lits.size(); ++i) {
        if (out.witnesses[i] || !cur_truth[i] || truth[i]) continue;
        Trajectory t = path_to(static_cast<int>(q));
        t.events.push_back(ev);
        t.states.push_back(next);
        out.witnesses[i] = std::move(t);
        --open;
      }
      if (it != seen.end()) continue;
      seen[fp] = static_cast<int>(nodes.size());
      nodes.push_back({std::move(next), std::move(truth), static_cast<int>(q), std::move(ev), depth + 1, std::move(md)});
    }
  }
  out.states = nodes.size();
  return out;
}

} // namespace cds
