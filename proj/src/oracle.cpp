#include "cds/oracle.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace cds {

using nlohmann::json;

std::string thread_fresh_id(int thread, const std::string& sym) { return sym + std::to_string(thread); }

namespace {

MatchOptions thread_options(int thread, std::int64_t key) {
  MatchOptions o;
  o.arg_key = key;
  o.fresh_id = [thread](const std::string& sym, std::int64_t) { return thread_fresh_id(thread, sym); };
  return o;
}

// Fluent pre literals a thread watches, ground under its binding.
struct Watch {
  std::vector<Literal> unfalsify;
  std::vector<Literal> pre;
};

std::string ground_literal(const Literal& l, const Binding& b) {
  return to_string(l) + " under " + b.to_string();
}

} // namespace

Oracle::Oracle(const Context& ctx, std::vector<ThreadProgram> programs) : ctx_(ctx), programs_(std::move(programs)) {
  for (const auto& p : programs_) {
    const OperationSpec* op = ctx_.kb().operation(p.ir.op);
    if (!op) throw std::invalid_argument("code IR for unknown operation " + p.ir.op);
    for (const auto& b : p.ir.blocks)
      if (!op->block(b.block)) throw std::invalid_argument("code IR names unknown block " + p.ir.op + "/" + b.block);
  }
}

const BlockSpec& Oracle::spec_of(int t, int block) const {
  const auto& ir = programs_[static_cast<std::size_t>(t)].ir;
  return *ctx_.kb().operation(ir.op)->block(ir.blocks[static_cast<std::size_t>(block)].block);
}

OracleConfig Oracle::initial(const HeapState& start) const {
  OracleConfig c;
  c.state = start;
  c.threads.resize(programs_.size());
  return c;
}

std::size_t Oracle::max_steps(int t) const {
  std::size_t best = 0;
  for (const auto& b : programs_[static_cast<std::size_t>(t)].ir.blocks)
    best = std::max(best, 2 * b.locks.size() + 1 + b.steps.size());
  return best + 1;
}

std::vector<int> Oracle::runnable(const OracleConfig& c) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < c.threads.size(); ++i) {
    const ThreadState& th = c.threads[i];
    if (th.phase == ThreadState::Phase::Done) continue;
    if (th.phase == ThreadState::Phase::Acquire) {
      const std::string& n = th.lock_nodes[th.held.size()];
      bool taken = false;
      for (std::size_t j = 0; j < c.threads.size(); ++j)
        if (j != i && std::count(c.threads[j].held.begin(), c.threads[j].held.end(), n)) taken = true;
      if (taken) continue;
    }
    out.push_back(static_cast<int>(i));
  }
  return out;
}

std::string Oracle::step(OracleConfig& c, int t) const {
  auto rs = runnable(c);
  if (std::find(rs.begin(), rs.end(), t) == rs.end())
    throw std::invalid_argument("thread " + std::to_string(t) + " cannot run");
  const ThreadProgram& prog = programs_[static_cast<std::size_t>(t)];
  ThreadState& th = c.threads[static_cast<std::size_t>(t)];
  const Theory& theory = ctx_.theory();
  const std::string who = "t" + std::to_string(prog.id) + " ";
  using Phase = ThreadState::Phase;

  auto settle = [&] {
    if (th.phase == Phase::Acquire && th.held.size() == th.lock_nodes.size()) th.phase = Phase::Validate;
    if (th.phase == Phase::Link && th.next_step == prog.ir.blocks[static_cast<std::size_t>(th.block)].steps.size())
      th.phase = Phase::Release;
    if (th.phase == Phase::Release && th.held.empty()) th.phase = Phase::Done;
  };

  switch (th.phase) {
  case Phase::Resolve: {
    std::string ev = who + prog.ir.op + "(" + std::to_string(prog.key) + ") ";
    if (prog.ir.outcome != Outcome::Success) {
      th.phase = Phase::Done;
      th.no_window = true;
      return ev + "has no synthesized fragment";
    }
    for (std::size_t b = 0; b < prog.ir.blocks.size(); ++b) {
      const BlockSpec& spec = spec_of(t, static_cast<int>(b));
      auto bs = match_pre(ctx_, spec, c.state, thread_options(prog.id, prog.key));
      if (bs.empty()) continue;
      th.block = static_cast<int>(b);
      th.binding = bs.front();
      c.state = prepare_fresh(c.state, spec, th.binding);
      std::vector<std::string> nodes;
      for (const auto& sym : prog.ir.blocks[b].locks) {
        auto n = resolve_node(th.binding, sym, theory);
        if (!n) throw std::invalid_argument("lock symbol " + sym + " is unbound");
        nodes.push_back(*n);
      }
      th.lock_nodes = LockSet::of(c.state, std::move(nodes)).nodes;
      th.phase = Phase::Acquire;
      settle();
      return ev + "resolves " + spec.id + " " + th.binding.to_string();
    }
    th.phase = Phase::Done;
    th.no_window = true;
    return ev + "finds no window";
  }
  case Phase::Acquire: {
    const std::string n = th.lock_nodes[th.held.size()];
    th.held.push_back(n);
    settle();
    return who + "lock(" + n + ")";
  }
  case Phase::Validate: {
    Model m = ctx_.derive(c.state);
    bool ok = true;
    for (const auto& l : prog.ir.blocks[static_cast<std::size_t>(th.block)].validate)
      if (!holds(l, m, th.binding, theory)) ok = false;
    if (ok) {
      th.validated = true;
      th.phase = Phase::Link;
    } else {
      th.aborted = true;
      th.phase = Phase::Release;
    }
    settle();
    return who + (ok ? "validate ok" : "validate failed, abort");
  }
  case Phase::Link: {
    const LinkStep& st = prog.ir.blocks[static_cast<std::size_t>(th.block)].steps[th.next_step++];
    GroundStep g = ground_step(st, th.binding, theory);
    HeapState next = apply_step(theory, c.state, st, th.binding);
    next.clock = c.state.clock;
    c.state = std::move(next);
    settle();
    return who + g.to_string();
  }
  case Phase::Release: {
    std::string n = th.held.back();
    th.held.pop_back();
    settle();
    return who + "unlock(" + n + ")";
  }
  case Phase::Done: break;
  }
  throw std::invalid_argument("thread already finished");
}

std::vector<CompletedOp> Oracle::completed(const OracleConfig& c) const {
  std::vector<CompletedOp> out;
  for (std::size_t i = 0; i < c.threads.size(); ++i)
    if (c.threads[i].committed()) out.push_back({programs_[i].id, programs_[i].ir.op, programs_[i].key});
  return out;
}

OracleTrace Oracle::run_schedule(const HeapState& start, const Schedule& schedule) const {
  OracleTrace tr;
  OracleConfig c = initial(start);
  tr.states.push_back(c.state);
  for (int t : schedule) {
    if (t < 0 || static_cast<std::size_t>(t) >= programs_.size())
      throw std::invalid_argument("schedule names unknown thread " + std::to_string(t));
    tr.events.push_back(step(c, t));
    tr.states.push_back(c.state);
  }
  tr.completed = completed(c);
  tr.final = std::move(c);
  return tr;
}

namespace {

std::string config_key(const OracleConfig& c) {
  std::string k = c.state.fingerprint();
  for (const auto& t : c.threads) {
    k += "|" + std::to_string(static_cast<int>(t.phase)) + "," + std::to_string(t.block) + "," +
         std::to_string(t.held.size()) + "," + std::to_string(t.next_step) + (t.validated ? "v" : "") +
         (t.aborted ? "a" : "") + (t.no_window ? "n" : "") + t.binding.to_string();
  }
  return k;
}

} // namespace

Verdict Oracle::explore(const HeapState& start, std::size_t step_bound, std::size_t state_budget) const {
  Verdict v;
  const Theory& theory = ctx_.theory();
  std::size_t total = 0;
  for (std::size_t i = 0; i < programs_.size(); ++i) total += max_steps(static_cast<int>(i));
  if (step_bound == 0) step_bound = total;
  if (step_bound < total) throw std::invalid_argument("step bound below the programs' micro-step total");

  std::unordered_map<std::string, std::shared_ptr<const Model>> models;
  auto model_of = [&](const HeapState& s) {
    auto fp = s.fingerprint();
    auto it = models.find(fp);
    if (it != models.end()) return it->second;
    auto m = std::make_shared<const Model>(ctx_.derive(s));
    models.emplace(fp, m);
    return m;
  };

  std::vector<Watch> watches(programs_.size());
  auto watch_of = [&](std::size_t t, const ThreadState& th) -> const Watch& {
    Watch& w = watches[t];
    w = {};
    if (th.block < 0) return w;
    const BlockSpec& spec = spec_of(static_cast<int>(t), th.block);
    const auto& validate = programs_[t].ir.blocks[static_cast<std::size_t>(th.block)].validate;
    for (const auto& l : fluent_conjuncts(theory, spec)) {
      w.pre.push_back(l);
      if (std::find(validate.begin(), validate.end(), l) == validate.end()) w.unfalsify.push_back(l);
    }
    return w;
  };

  Schedule sched;
  std::vector<std::string> events;
  std::vector<HeapState> states{start};
  auto fail = [&](bool& flag, std::string property, std::string detail) {
    flag = false;
    v.counterexample = Counterexample{std::move(property), std::move(detail), sched, events, states};
  };

  if (!ctx_.root_holds(*model_of(start))) {
    fail(v.invariant_ok, "invariant", theory.root + " fails on the start state");
    return v;
  }

  std::unordered_set<std::string> seen;
  std::function<void(const OracleConfig&)> dfs = [&](const OracleConfig& c) {
    if (v.counterexample || v.budget_exceeded) return;
    if (!seen.insert(config_key(c)).second) return;
    ++v.states;
    if (v.states > state_budget || sched.size() > step_bound) {
      v.budget_exceeded = true;
      return;
    }
    auto rs = runnable(c);
    if (rs.empty()) {
      ++v.finals;
      bool blocked = std::any_of(c.threads.begin(), c.threads.end(),
                                 [](const ThreadState& t) { return t.phase != ThreadState::Phase::Done; });
      if (blocked) {
        ++v.deadlocks;
        return;
      }
      if (!linearization_exists(ctx_, start, c.state, completed(c)))
        fail(v.linearizable, "linearizability", "final state matches no sequential order of the completed operations");
      return;
    }
    auto before = model_of(c.state);
    for (int t : rs) {
      OracleConfig next = c;
      std::string ev = step(next, t);
      sched.push_back(t);
      events.push_back(ev);
      states.push_back(next.state);
      auto after = model_of(next.state);

      if (!ctx_.root_holds(*after)) fail(v.invariant_ok, "invariant", theory.root + " fails after " + ev);
      std::map<std::string, int> owner;
      for (std::size_t i = 0; i < next.threads.size() && !v.counterexample; ++i)
        for (const auto& n : next.threads[i].held)
          if (!owner.emplace(n, static_cast<int>(i)).second)
            fail(v.mutual_exclusion_ok, "mutual-exclusion", "lock on " + n + " held twice");
      // Interference checks: another thread's micro-step must not falsify
      // a watched literal of a thread inside its window.
      for (std::size_t u = 0; u < c.threads.size() && !v.counterexample; ++u) {
        if (static_cast<int>(u) == t) continue;
        const ThreadState& tu = c.threads[u];
        if (tu.block < 0 || tu.phase == ThreadState::Phase::Done || tu.phase == ThreadState::Phase::Release) continue;
        const Watch& w = watch_of(u, tu);
        for (const auto& l : w.unfalsify)
          if (holds(l, *before, tu.binding, theory) && !holds(l, *after, tu.binding, theory)) {
            fail(v.lemma1_ok, "lemma1", "unfalsifiable " + ground_literal(l, tu.binding) + " falsified by " + ev);
            break;
          }
        if (v.counterexample || !tu.validated || tu.phase != ThreadState::Phase::Link) continue;
        for (const auto& l : w.pre)
          if (holds(l, *before, tu.binding, theory) && !holds(l, *after, tu.binding, theory)) {
            fail(v.lemma2_ok, "lemma2", "pre " + ground_literal(l, tu.binding) + " falsified under locks by " + ev);
            break;
          }
      }
      if (!v.counterexample) dfs(next);
      sched.pop_back();
      events.pop_back();
      states.pop_back();
      if (v.counterexample || v.budget_exceeded) return;
    }
  };
  dfs(initial(start));
  return v;
}

std::vector<std::string> key_edges(const Theory& th, const HeapState& s) {
  std::set<std::string> out;
  std::set<std::string> seen;
  std::vector<std::string> stack{th.start_sentinel()};
  while (!stack.empty()) {
    std::string n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second || !s.has_node(n)) continue;
    for (const auto& [e, to] : s.succ) {
      if (e.first != n || !s.has_node(to)) continue;
      out.insert(std::to_string(s.key(n)) + " " + e.second + " " + std::to_string(s.key(to)));
      stack.push_back(to);
    }
  }
  return {out.begin(), out.end()};
}

HeapState apply_sequential(const Context& ctx, const HeapState& s, const CompletedOp& op) {
  const OperationSpec* spec = ctx.kb().operation(op.op);
  if (!spec) throw std::invalid_argument("unknown operation " + op.op);
  for (const auto& blk : spec->blocks) {
    auto bs = match_pre(ctx, blk, s, thread_options(op.thread, op.key));
    if (bs.empty()) continue;
    HeapState out = prepare_fresh(s, blk, bs.front());
    for (const auto& st : blk.steps) out = apply_step(ctx.theory(), out, st, bs.front());
    return out;
  }
  return s;
}

bool linearization_exists(const Context& ctx, const HeapState& start, const HeapState& final,
                          const std::vector<CompletedOp>& ops) {
  const auto target = key_edges(ctx.theory(), final);
  std::vector<std::size_t> perm(ops.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  do {
    HeapState s = start;
    for (std::size_t i : perm) s = apply_sequential(ctx, s, ops[i]);
    if (key_edges(ctx.theory(), s) == target) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

std::vector<ThreadProgram> default_threads(const Context& ctx, const std::vector<CodeIR>& irs, int k,
                                           const HeapState& start) {
  std::vector<ThreadProgram> out;
  if (irs.empty() || k <= 0) return out;
  std::map<std::string, std::vector<std::int64_t>> keys;
  std::map<std::string, std::size_t> used;
  for (const auto& ir : irs) {
    if (keys.count(ir.op)) continue;
    auto& ks = keys[ir.op];
    const OperationSpec* op = ctx.kb().operation(ir.op);
    if (!op) throw std::invalid_argument("code IR for unknown operation " + ir.op);
    for (const auto& blk : op->blocks)
      for (const auto& b : match_pre(ctx, blk, start))
        if (auto kv = b.key(kArgKeyVar); kv && std::find(ks.begin(), ks.end(), *kv) == ks.end()) ks.push_back(*kv);
  }
  for (int i = 0; i < k; ++i) {
    const CodeIR& ir = irs[static_cast<std::size_t>(i) % irs.size()];
    const auto& ks = keys[ir.op];
    std::size_t j = used[ir.op]++;
    std::int64_t key = ks.empty() ? 0 : ks[j % ks.size()];
    out.push_back({i + 1, ir, key});
  }
  return out;
}

json to_json(const Verdict& v) {
  json j{{"invariant_ok", v.invariant_ok},
         {"mutual_exclusion_ok", v.mutual_exclusion_ok},
         {"linearizable", v.linearizable},
         {"lemma1_ok", v.lemma1_ok},
         {"lemma2_ok", v.lemma2_ok},
         {"all_ok", v.all_ok()},
         {"states", v.states},
         {"finals", v.finals},
         {"deadlocks", v.deadlocks},
         {"budget_exceeded", v.budget_exceeded},
         {"lemma_window", "lemma1: resolve through last link; lemma2: validate success through last link"}};
  if (v.counterexample) {
    const auto& c = *v.counterexample;
    json states = json::array();
    for (const auto& s : c.states) states.push_back(s.to_facts());
    j["counterexample"] = json{{"property", c.property},
                               {"detail", c.detail},
                               {"schedule", c.schedule},
                               {"events", c.events},
                               {"states", states}};
  } else {
    j["counterexample"] = nullptr;
  }
  return j;
}

} // namespace cds
