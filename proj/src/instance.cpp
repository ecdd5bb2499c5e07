#include "cds/instance.hpp"

#include <algorithm>
#include <memory>
#include <set>

namespace cds {

namespace {

// Binary tree shape; children are null when absent.
struct Shape {
  std::shared_ptr<Shape> left, right;
};
using ShapePtr = std::shared_ptr<Shape>;

std::vector<ShapePtr> shapes(int n) {
  if (n == 0) return {nullptr};
  std::vector<ShapePtr> out;
  for (int i = 0; i < n; ++i)
    for (const auto& l : shapes(i))
      for (const auto& r : shapes(n - 1 - i)) out.push_back(std::make_shared<Shape>(Shape{l, r}));
  return out;
}

// Turns every missing child slot into a leaf, giving a full binary tree.
ShapePtr complete(const ShapePtr& s) {
  if (!s) return std::make_shared<Shape>();
  return std::make_shared<Shape>(Shape{complete(s->left), complete(s->right)});
}

// Names nodes n1.. in in-order with keys 10, 20, ..; returns the root id.
std::string build(const ShapePtr& s, HeapState& st, int& counter) {
  std::string l, r;
  if (s->left) l = build(s->left, st, counter);
  std::string id = "n" + std::to_string(++counter);
  st.add_node(id, 10 * counter);
  if (s->right) r = build(s->right, st, counter);
  if (!l.empty()) st.set_succ(id, "left", l);
  if (!r.empty()) st.set_succ(id, "right", r);
  return id;
}

std::int64_t sentinel_key(const Sentinel& s) { return s.max_key ? kMaxKey : kMinKey; }

std::vector<std::pair<HeapState, int>> raw_instances(const Theory& th, int max_depth) {
  std::vector<std::pair<HeapState, int>> out;
  const Sentinel& start = th.sentinels.front();
  auto with_start = [&] {
    HeapState s;
    s.add_node(start.name, sentinel_key(start));
    return s;
  };
  if (th.shape == ShapeKind::Chain) {
    if (th.sentinels.size() < 2) return out;
    const Sentinel& end = th.sentinels[1];
    for (int d = 0; d <= max_depth; ++d) {
      HeapState s = with_start();
      s.add_node(end.name, sentinel_key(end));
      std::string prev = start.name;
      for (int i = 1; i <= d; ++i) {
        std::string id = "n" + std::to_string(i);
        s.add_node(id, 10 * i);
        s.set_succ(prev, kNextLabel, id);
        prev = id;
      }
      s.set_succ(prev, kNextLabel, end.name);
      out.emplace_back(std::move(s), d);
    }
    return out;
  }
  for (int d = 0; d <= max_depth; ++d) {
    std::vector<ShapePtr> trees;
    if (th.shape == ShapeKind::Tree) {
      trees = shapes(d);
    } else {
      if (d == 0) trees.push_back(nullptr);
      for (const auto& sh : shapes(d)) trees.push_back(complete(sh));
    }
    for (const auto& t : trees) {
      HeapState s = with_start();
      if (t) {
        int counter = 0;
        s.set_succ(start.name, "left", build(t, s, counter));
      }
      out.emplace_back(std::move(s), d);
    }
  }
  return out;
}

std::vector<std::pair<HeapState, int>> filtered(const Theory& th, int max_depth) {
  if (max_depth < 0) throw std::invalid_argument("depth bound must be non-negative");
  Evaluator ev(th);
  std::vector<std::pair<HeapState, int>> out;
  for (auto& [s, d] : raw_instances(th, max_depth))
    if (ev.evaluate(s).contains(th.root, {})) out.emplace_back(std::move(s), d);
  return out;
}

bool is_variable_name(const std::string& s) { return !s.empty() && std::isupper(static_cast<unsigned char>(s[0])); }

// Fresh symbol whose key is the argument key, if the block has one.
std::optional<std::string> argument_fresh(const BlockSpec& b) {
  for (const auto& l : b.pre) {
    if (l.kind != Literal::Kind::Positive || l.atom.predicate != "key" || l.atom.args.size() != 2) continue;
    const auto& a = l.atom.args;
    if (a[0].is_constant() && b.is_fresh(a[0].name) && a[1].is_variable() && a[1].name == kArgKeyVar)
      return a[0].name;
  }
  return std::nullopt;
}

} // namespace

Context::Context(KnowledgeBase kb) : kb_(std::move(kb)), eval_(kb_.theory) {
  for (const auto& op : kb_.operations)
    for (const auto& b : op.blocks) max_fresh_ = std::max(max_fresh_, b.fresh.size());
}

std::vector<HeapState> unfold_instances(const Theory& theory, int max_depth) {
  std::vector<HeapState> out;
  for (auto& [s, d] : filtered(theory, max_depth)) out.push_back(std::move(s));
  return out;
}

std::vector<int> unfold_depths(const Theory& theory, int max_depth) {
  std::vector<int> out;
  for (auto& [s, d] : filtered(theory, max_depth)) out.push_back(d);
  return out;
}

std::vector<std::vector<std::int64_t>> fresh_key_candidates(const HeapState& s, std::size_t m,
                                                            const std::vector<std::int64_t>& extra) {
  if (m == 0) return {{}};
  std::set<std::int64_t> keys{kMinKey, kMaxKey};
  for (const auto& [n, k] : s.keys) keys.insert(k);
  keys.insert(extra.begin(), extra.end());
  std::vector<std::vector<std::int64_t>> out;
  std::int64_t prev = *keys.begin();
  for (auto it = std::next(keys.begin()); it != keys.end(); prev = *it, ++it) {
    std::int64_t a = prev, b = *it;
    std::vector<std::int64_t> pts;
    for (std::size_t j = 1; j <= m; ++j) pts.push_back(a + (b - a) * static_cast<std::int64_t>(j) / static_cast<std::int64_t>(m + 1));
    bool room = pts.front() > a && pts.back() < b && std::adjacent_find(pts.begin(), pts.end()) == pts.end();
    if (!room) continue;
    do {
      out.push_back(pts);
    } while (std::next_permutation(pts.begin(), pts.end()));
  }
  return out;
}

HeapState matching_state(const Context& ctx, const HeapState& state) {
  HeapState out = state;
  for (std::size_t m = 1; m <= ctx.max_fresh(); ++m)
    for (const auto& c : fresh_key_candidates(state, m))
      for (auto k : c)
        if (!state.has_node(fresh_node_id(k))) out.add_node(fresh_node_id(k), k);
  return out;
}

bool binding_less(const HeapState& s, const BlockSpec& block, const Binding& a, const Binding& b) {
  for (const auto& sym : block.node_symbols()) {
    auto na = a.node(sym), nb = b.node(sym);
    if (na == nb) continue;
    if (!na || !nb) return !na;
    return node_less(s, *na, *nb);
  }
  return a.keys < b.keys;
}

std::vector<Binding> match_pre(const Context& ctx, const BlockSpec& block, const HeapState& state,
                               const MatchOptions& opts) {
  const Theory& th = ctx.theory();
  const auto& fresh = block.fresh;
  auto arg_sym = argument_fresh(block);
  auto id_of = [&](const std::string& sym, std::int64_t k) {
    return opts.fresh_id ? opts.fresh_id(sym, k) : fresh_node_id(k);
  };

  // Each candidate assigns one key per fresh symbol, in block.fresh order.
  std::vector<std::vector<std::int64_t>> cands;
  if (opts.arg_key && arg_sym) {
    std::size_t pos = static_cast<std::size_t>(std::find(fresh.begin(), fresh.end(), *arg_sym) - fresh.begin());
    for (auto rest : fresh_key_candidates(state, fresh.size() - 1, {*opts.arg_key})) {
      rest.insert(rest.begin() + static_cast<std::ptrdiff_t>(pos), *opts.arg_key);
      cands.push_back(std::move(rest));
    }
  } else {
    cands = fresh_key_candidates(state, fresh.size());
  }

  auto augment = [&](HeapState& s, const std::vector<std::int64_t>& keys) {
    for (std::size_t i = 0; i < fresh.size(); ++i) {
      std::string id = id_of(fresh[i], keys[i]);
      if (!state.has_node(id)) s.add_node(id, keys[i]);
    }
  };

  // Default ids depend on the key only, so all candidates can share one
  // augmented state: unlinked fresh nodes do not affect facts about others.
  std::optional<Model> shared;
  if (!opts.fresh_id && !opts.model) {
    HeapState all = state;
    for (const auto& c : cands) augment(all, c);
    shared = ctx.derive(all);
  }

  auto is_var = [&](const Term& t) { return is_node_symbol(t, th); };
  std::set<Binding> found;
  for (const auto& c : cands) {
    bool clash = false;
    for (std::size_t i = 0; i < fresh.size(); ++i) {
      std::string id = id_of(fresh[i], c[i]);
      if (state.has_node(id)) clash = true;
    }
    if (clash) continue;
    std::optional<Model> own;
    if (!shared && !opts.model) {
      HeapState s = state;
      augment(s, c);
      own = ctx.derive(s);
    }
    const Model& model = opts.model ? *opts.model : shared ? *shared : *own;
    Assignment fixed;
    for (std::size_t i = 0; i < fresh.size(); ++i) fixed[fresh[i]] = Value::sym(id_of(fresh[i], c[i]));
    if (opts.arg_key) fixed[kArgKeyVar] = Value::num(*opts.arg_key);
    for (const auto& a : ctx.evaluator().solve(block.pre, model, fixed, is_var)) {
      Binding b;
      std::set<std::string> used;
      bool ok = true;
      for (const auto& [name, v] : a) {
        if (is_variable_name(name)) {
          if (v.is_symbol()) {
            ok = false;
            break;
          }
          b.keys[name] = v.integer();
          continue;
        }
        if (!v.is_symbol()) {
          ok = false;
          break;
        }
        std::string id = v.str();
        if (!block.is_fresh(name) && !state.has_node(id)) ok = false;
        if (!used.insert(id).second) ok = false;
        b.nodes[name] = id;
      }
      if (!ok) continue;
      for (std::size_t i = 0; i < fresh.size(); ++i) {
        b.nodes[fresh[i]] = id_of(fresh[i], c[i]);
        b.fresh[fresh[i]] = c[i];
      }
      if (opts.arg_key && !b.keys.count(kArgKeyVar)) b.keys[kArgKeyVar] = *opts.arg_key;
      found.insert(std::move(b));
    }
  }
  std::vector<Binding> out(found.begin(), found.end());
  std::stable_sort(out.begin(), out.end(),
                   [&](const Binding& x, const Binding& y) { return binding_less(state, block, x, y); });
  return out;
}

namespace {

Delta scan(const Context& ctx, int max_depth, const OperationSpec* focus_op, const BlockSpec* focus_block) {
  auto inst = filtered(ctx.theory(), max_depth);
  auto ops = ctx.kb().destructive_operations();
  std::set<std::string> ever;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const HeapState& s = inst[i].first;
    Delta d{s, inst[i].second, i, {}};
    bool all = true;
    for (const auto* op : ops) {
      std::optional<OpBinding> chosen;
      if (op == focus_op) {
        auto bs = match_pre(ctx, *focus_block, s);
        if (!bs.empty()) chosen = OpBinding{focus_block->id, bs.front()};
      } else {
        for (const auto& blk : op->blocks) {
          auto bs = match_pre(ctx, blk, s);
          if (!bs.empty()) {
            chosen = OpBinding{blk.id, bs.front()};
            break;
          }
        }
      }
      if (chosen) {
        ever.insert(op->name);
        d.bindings[op->name] = std::move(*chosen);
      } else {
        all = false;
      }
    }
    if (all) return d;
  }
  std::string missing;
  for (const auto* op : ops) {
    std::string label = op == focus_op ? op->name + "/" + focus_block->id : op->name;
    if (!ever.count(op->name)) missing += (missing.empty() ? "" : ", ") + label;
  }
  if (missing.empty()) missing = "all operations jointly";
  throw DeltaError("no instance within depth " + std::to_string(max_depth) + " admits " + missing);
}

} // namespace

Delta least_delta(const Context& ctx, int max_depth) { return scan(ctx, max_depth, nullptr, nullptr); }

Delta least_delta_for_block(const Context& ctx, const OperationSpec& op, const BlockSpec& block, int max_depth) {
  const OperationSpec* focus = ctx.kb().operation(op.name);
  if (!focus) throw std::invalid_argument("unknown operation " + op.name);
  const BlockSpec* blk = focus->block(block.id);
  if (!blk) throw std::invalid_argument("unknown block " + block.id);
  return scan(ctx, max_depth, focus, blk);
}

} // namespace cds
