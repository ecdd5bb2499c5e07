#include "cds/interference.hpp"

#include <algorithm>
#include <stdexcept>

namespace cds {

std::string to_string(GuardMode g) { return g == GuardMode::Protocol ? "protocol" : "literal"; }

GuardMode parse_guard_mode(const std::string& s) {
  if (s == "protocol") return GuardMode::Protocol;
  if (s == "literal") return GuardMode::Literal;
  throw std::invalid_argument("unknown guard mode: " + s);
}

std::string GroundStep::to_string() const {
  std::string s = "link(" + from + "," + to;
  if (label != kNextLabel) s += "," + label;
  return s + ")";
}

GroundStep ground_step(const LinkStep& step, const Binding& b, const Theory& th) {
  auto from = resolve_node(b, step.from, th);
  if (!from) throw std::invalid_argument("unbound node symbol " + step.from);
  std::string to = "nil";
  if (step.to != "nil") {
    auto t = resolve_node(b, step.to, th);
    if (!t) throw std::invalid_argument("unbound node symbol " + step.to);
    to = *t;
  }
  return {*from, to, step.label.empty() ? kNextLabel : step.label};
}

std::vector<std::string> window_symbols(const BlockSpec& block) {
  std::vector<std::string> out;
  auto add = [&](const std::string& s) {
    if (s == "nil" || block.is_fresh(s)) return;
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  };
  for (const auto& st : block.steps) add(st.from);
  for (const auto& l : block.pre) {
    if (l.kind != Literal::Kind::Positive || l.atom.predicate != "edge") continue;
    const auto& a = l.atom.args;
    std::string label = a.size() == 3 ? a[2].name : "";
    bool invalidated = std::any_of(block.steps.begin(), block.steps.end(), [&](const LinkStep& st) {
      return st.from == a[0].name && st.label == label && st.to != a[1].name;
    });
    if (invalidated) {
      add(a[0].name);
      add(a[1].name);
    }
  }
  for (const auto& l : block.post)
    if (l.kind == Literal::Kind::Negative && l.atom.predicate == "reach" && l.atom.args.size() == 1)
      add(l.atom.args[0].name);
  return out;
}

std::vector<std::string> heuristic_symbols(const BlockSpec& block, const LockHeuristic& h) {
  if (!h.symbols) return window_symbols(block);
  auto syms = block.node_symbols();
  std::vector<std::string> out;
  for (const auto& s : *h.symbols)
    if (std::find(syms.begin(), syms.end(), s) != syms.end() && !block.is_fresh(s)) out.push_back(s);
  return out;
}

LockSet window_heuristic(const BlockSpec& block, const Binding& b, const HeapState& s, const Theory& th,
                         const LockHeuristic& h) {
  std::vector<std::string> nodes;
  for (const auto& sym : heuristic_symbols(block, h)) {
    auto n = resolve_node(b, sym, th);
    if (!n) throw std::invalid_argument("unbound node symbol " + sym);
    nodes.push_back(*n);
  }
  return LockSet::of(s, std::move(nodes));
}

InterferenceModel build_interference(const KnowledgeBase& kb, GuardMode guard, LockHeuristic heuristic) {
  InterferenceModel m;
  m.guard = guard;
  m.heuristic = std::move(heuristic);
  auto ops = kb.destructive_operations();
  std::stable_sort(ops.begin(), ops.end(), [](const auto* a, const auto* b) { return a->name < b->name; });
  for (const auto* op : ops)
    for (const auto& blk : op->blocks) m.templates.push_back({op->name, blk});
  return m;
}

InterferenceModel restrict_to(const InterferenceModel& m, const std::string& op) {
  InterferenceModel out = m;
  out.templates.clear();
  for (const auto& t : m.templates)
    if (t.op == op) out.templates.push_back(t);
  return out;
}

std::string InterferenceAction::describe() const {
  std::string s = "interfere(" + op + "/" + block + " " + binding.to_string() + ")";
  bool partial = std::find(enabled.begin(), enabled.end(), false) != enabled.end();
  if (partial) {
    s += " effects[";
    bool first = true;
    for (std::size_t i = 0; i < effects.size(); ++i) {
      if (!enabled[i]) continue;
      s += (first ? "" : ",") + effects[i].to_string();
      first = false;
    }
    s += "]";
  }
  return s;
}

std::vector<InterferenceAction> enabled_actions(const Context& ctx, const InterferenceModel& m, const HeapState& s,
                                                const LockSet& locks, const Model* model) {
  std::vector<InterferenceAction> out;
  if (m.templates.empty()) return out;
  std::optional<Model> own;
  if (!model) {
    own = ctx.derive(matching_state(ctx, s));
    model = &*own;
  }
  MatchOptions opts;
  opts.model = model;
  for (const auto& t : m.templates) {
    for (const auto& b : match_pre(ctx, t.block, s, opts)) {
      InterferenceAction a;
      a.op = t.op;
      a.block = t.block.id;
      a.binding = b;
      for (const auto& st : t.block.steps) a.effects.push_back(ground_step(st, b, ctx.theory()));
      for (const auto& [sym, key] : b.fresh) a.fresh[*b.node(sym)] = key;
      a.window = window_heuristic(t.block, b, s, ctx.theory(), m.heuristic);
      if (m.guard == GuardMode::Protocol) {
        if (a.window.intersects(locks)) continue;
        a.enabled.assign(a.effects.size(), true);
      } else {
        for (const auto& e : a.effects) a.enabled.push_back(!locks.contains(e.from));
        if (std::none_of(a.enabled.begin(), a.enabled.end(), [](bool e) { return e; })) continue;
      }
      out.push_back(std::move(a));
    }
  }
  return out;
}

void apply_ground(HeapState& s, const GroundStep& g) {
  if (!s.has_node(g.from)) throw std::invalid_argument("link from unknown node " + g.from);
  if (g.to == "nil") {
    s.clear_succ(g.from, g.label);
  } else {
    if (!s.has_node(g.to)) throw std::invalid_argument("link to unknown node " + g.to);
    s.set_succ(g.from, g.label, g.to);
  }
}

HeapState apply_action(const HeapState& s, const InterferenceAction& a) {
  if (std::none_of(a.enabled.begin(), a.enabled.end(), [](bool e) { return e; }))
    throw std::invalid_argument("action not enabled: " + a.describe());
  HeapState out = s;
  for (const auto& [id, key] : a.fresh)
    if (!out.has_node(id)) out.add_node(id, key);
  for (std::size_t i = 0; i < a.effects.size(); ++i)
    if (a.enabled[i]) apply_ground(out, a.effects[i]);
  ++out.clock;
  return out;
}

} // namespace cds
