// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "cds/dsl.hpp"
#include "cds/oracle.hpp"
#include "naive_eval.hpp"

using namespace cds;

namespace {

struct Result {
  bool ok = true;
  std::string detail;
};

struct Check {
  Result& r;
  void operator()(bool cond, const std::string& what) {
    if (cond) return;
    r.ok = false;
    r.detail += (r.detail.empty() ? "" : "; ") + what;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Shared between criteria 5, 6 and 9.
struct Exploration {
  std::string label;
  Verdict verdict;
  double seconds = 0;
};

std::vector<Exploration>& explorations() {
  static std::vector<Exploration> runs = [] {
    std::vector<Exploration> out;
    for (const std::string name : {"linked_list", "external_bst"}) {
      Bundle b = builtin_bundle(name);
      Context ctx(b.knowledge);
      SynthesisConfig cfg;
      cfg.ops = {"ins", "del"};
      auto rep = synthesize(ctx, cfg, name);
      std::map<std::string, CodeIR> irs;
      for (const auto& o : rep.ops) irs[o.op] = *o.ir;
      const HeapState& start = rep.delta->state;
      std::vector<std::vector<std::string>> mixes{{"ins", "del"}, {"ins"}, {"del"}};
      if (name == "linked_list") mixes.push_back({"del", "ins"});
      for (const auto& mix : mixes) {
        std::vector<CodeIR> chosen;
        for (const auto& op : mix) chosen.push_back(irs.at(op));
        auto t0 = std::chrono::steady_clock::now();
        Oracle o(ctx, default_threads(ctx, chosen, 2, start));
        Exploration e;
        e.label = name + ":";
        for (const auto& p : o.programs()) e.label += " " + p.ir.op + "(" + std::to_string(p.key) + ")";
        e.verdict = o.explore(start);
        e.seconds = seconds_since(t0);
        out.push_back(std::move(e));
      }
    }
    return out;
  }();
  return runs;
}

Result criterion1() {
  Result r;
  Check check{r};
  auto t0 = std::chrono::steady_clock::now();
  const std::map<std::string, std::map<std::string, std::string>> expected{
      {"linked_list", {{"member", "Unchanged"}, {"ins", "Success"}, {"del", "Success"}}},
      {"external_bst", {{"member", "Unchanged"}, {"ins", "Success"}, {"del", "Success"}}},
      {"internal_bst", {{"member", "Unchanged"}, {"ins", "Success"}, {"del", "RCU"}}}};
  for (const auto& [name, want] : expected) {
    Bundle b = builtin_bundle(name);
    Context ctx(b.knowledge);
    auto rep = synthesize(ctx, {}, name);
    auto row = outcome_row(rep);
    for (const auto& [op, outcome] : want)
      check(row.value(op, std::string()) == outcome, name + " " + op + " is " + row.value(op, std::string("missing")));
    check(row.size() == want.size(), name + " has extra operations");
    for (const auto& o : rep.ops)
      if (name == "internal_bst" && o.op == "del")
        check(o.rcu && o.rcu->cause == RcuCause::KeyMovement, "internal_bst del cause is not key-movement");
  }
  double s = seconds_since(t0);
  check(s < 60, "synthesis took " + std::to_string(s) + " s");
  if (r.ok) r.detail = "operation outcomes in " + std::to_string(static_cast<int>(s)) + " s";
  return r;
}

Result criterion2() {
  Result r;
  Check check{r};
  Bundle b = builtin_bundle("linked_list");
  Context ctx(b.knowledge);
  auto o = generate_concurrent_code(ctx, *b.knowledge.operation("ins"), {});
  check(o.outcome == Outcome::Success && o.ir && o.ir->blocks.size() == 1, "insert did not synthesize one block");
  if (!r.ok) return r;
  const auto& bc = o.ir->blocks[0];
  check(bc.locks == std::vector<std::string>{"x", "y"}, "locks differ");
  std::set<std::string> validate;
  for (const auto& l : bc.validate) validate.insert(to_string(l));
  check(validate == std::set<std::string>{"reach(x)", "edge(x,y)", "Kx < Kt", "Kt < Ky"}, "validate set differs");
  check(bc.steps.size() == 2 && to_string(bc.steps[0]) == "link(tau,y)" && to_string(bc.steps[1]) == "link(x,tau)",
        "step order differs");
  std::string golden = read_file(std::string(CDS_SOURCE_DIR) + "/tests/golden/ins.txt");
  check(!golden.empty() && render_text(*o.ir) == golden, "text differs from golden file");
  if (r.ok) r.detail = "locks {x,y}, validate without suffix(y), steps [link(tau,y), link(x,tau)]";
  return r;
}

Result criterion3() {
  Result r;
  Check check{r};
  Bundle b = builtin_bundle("linked_list");
  Context ctx(b.knowledge);
  const auto& op = *b.knowledge.operation("ins");
  Delta d = least_delta(ctx, 4);
  auto bs = match_pre(ctx, op.blocks[0], d.state);
  auto rep = task3_program_order(ctx, op, op.blocks[0], d.state, bs.at(0));
  check(rep.valid == std::vector<ProgramOrder>{{2, 1}}, "valid orders differ");
  bool witnessed = false;
  for (const auto& rej : rep.rejected)
    if (rej.order == ProgramOrder{1, 2}) witnessed = !ctx.root_holds(ctx.derive(rej.state));
  check(witnessed, "no broken-list state for <1,2>");
  if (r.ok) r.detail = "valid {<2,1>}; <1,2> breaks list";
  return r;
}

Result criterion4() {
  Result r;
  Check check{r};
  Bundle b = builtin_bundle("linked_list");
  Context ctx(b.knowledge);
  const auto& op = *b.knowledge.operation("ins");
  Delta d = least_delta(ctx, 4);
  auto bs = match_pre(ctx, op.blocks[0], d.state);
  auto rep = task1_unfalsify(ctx, op, op.blocks[0], d.state, bs, default_horizon(op.blocks[0]));
  std::map<std::string, bool> falsifiable;
  for (const auto& v : rep.verdicts) {
    falsifiable[to_string(v.literal)] = v.falsifiable;
    if (v.falsifiable)
      check(v.witness && falsifies(ctx, *v.witness, v.literal, v.binding),
            to_string(v.literal) + " witness does not replay");
  }
  check(falsifiable.count("suffix(y)") && !falsifiable["suffix(y)"], "suffix(y) not unfalsifiable");
  check(falsifiable["reach(x)"], "reach(x) not falsifiable");
  check(falsifiable["edge(x,y)"], "edge(x,y) not falsifiable");
  check(rep.unfalsify.size() == 1, "Unfalsify is not exactly {suffix(y)}");
  if (r.ok) r.detail = "Unfalsify {suffix(y)}; reach(x), edge(x,y) witnesses replay";
  return r;
}

Result criterion5() {
  Result r;
  Check check{r};
  std::size_t states = 0;
  double secs = 0;
  for (const auto& e : explorations()) {
    check(e.verdict.lemma1_ok, e.label + " lemma1 violated");
    check(!e.verdict.budget_exceeded, e.label + " exceeded the state budget");
    check(e.seconds < 30, e.label + " took " + std::to_string(e.seconds) + " s");
    states += e.verdict.states;
    secs += e.seconds;
  }
  if (r.ok)
    r.detail = std::to_string(explorations().size()) + " explorations, " + std::to_string(states) +
               " states, 0 violations, " + std::to_string(secs).substr(0, 4) + " s";
  return r;
}

Result criterion6() {
  Result r;
  Check check{r};
  Bundle b = builtin_bundle("linked_list");
  Context ctx(b.knowledge);
  Delta d = least_delta(ctx, 4);
  for (const char* name : {"ins", "del"}) {
    const auto& op = *b.knowledge.operation(name);
    const auto& blk = op.blocks[0];
    auto bs = match_pre(ctx, blk, d.state);
    int h = default_horizon(blk);
    LockHeuristic xy{std::vector<std::string>{"x", "y"}};
    check(task2_adequacy_all(ctx, op, blk, d.state, bs, GuardMode::Protocol, xy, h).adequate,
          std::string(name) + " inadequate under {x,y}");
    for (const auto& locks : {std::vector<std::string>{}, std::vector<std::string>{"x"}}) {
      auto rep = task2_adequacy_all(ctx, op, blk, d.state, bs, GuardMode::Protocol, LockHeuristic{locks}, h);
      std::string tag = std::string(name) + (locks.empty() ? " with {}" : " with {x}");
      check(!rep.adequate, tag + " reported adequate");
      check(rep.witness && rep.falsified && falsifies(ctx, *rep.witness, *rep.falsified, rep.binding),
            tag + " witness does not replay");
    }
  }
  for (const auto& e : explorations())
    if (e.label.rfind("linked_list", 0) == 0) check(e.verdict.lemma2_ok, e.label + " lemma2 violated");
  if (r.ok) r.detail = "{x,y} adequate, {} and {x} refuted with replaying witnesses, oracle lemma2 ok";
  return r;
}

Result criterion7() {
  Result r;
  Check check{r};
  Bundle ib = builtin_bundle("internal_bst");
  Context ictx(ib.knowledge);
  auto rep = task4_keymove(ictx, *ib.knowledge.operation("del"), 4);
  check(rep.keymove && rep.witness.has_value(), "internal_bst del shows no key movement");
  if (rep.witness) {
    const auto& w = *rep.witness;
    bool relocated = false;
    for (const auto& ev : w.trajectory.events)
      if (ev.action && ev.action->op == "del" && ev.action->block == "two_child")
        relocated = relocated || ev.action->binding.node("s") == w.missed_node;
    check(relocated, "missed node " + w.missed_node + " is not the relocated successor");
    check(!w.trajectory.states.empty() && w.trajectory.states.front().key(w.missed_node) == w.key,
          "witness key does not belong to the missed node");
    if (r.ok) r.detail = "missed " + w.missed_node + " (key " + std::to_string(w.key) + ") relocated by two_child";
  }
  Bundle lb = builtin_bundle("linked_list");
  Context lctx(lb.knowledge);
  for (const char* op : {"ins", "del"})
    for (int h = 0; h <= 4; ++h)
      check(!task4_keymove(lctx, *lb.knowledge.operation(op), 4, h).keymove,
            std::string("linked_list ") + op + " key movement at horizon " + std::to_string(h));
  return r;
}

Result criterion8() {
  Result r;
  Check check{r};
  std::mt19937 rng(7);
  std::size_t checked = 0, mismatched = 0;
  for (const auto& name : builtin_bundle_names()) {
    Bundle b = builtin_bundle(name);
    Context ctx(b.knowledge);
    std::vector<HeapState> cases = unfold_instances(b.theory, 2);
    for (int i = 0; i < 100; ++i) cases.push_back(naive::random_heap(b.theory, rng, 6));
    for (const auto& s : cases) {
      if (s.keys.size() > 6) continue;
      ++checked;
      if (ctx.derive(s).atoms() != naive::model(b.theory, s)) ++mismatched;
    }
  }
  check(checked >= 100, "only " + std::to_string(checked) + " instances");
  check(mismatched == 0, std::to_string(mismatched) + " mismatching instances");
  if (r.ok) r.detail = std::to_string(checked) + " instances agree atom-for-atom";
  return r;
}

Result criterion9() {
  Result r;
  Check check{r};
  std::size_t finals = 0;
  for (const auto& e : explorations()) {
    check(e.verdict.linearizable, e.label + " has a non-linearizable final state");
    check(e.verdict.invariant_ok && e.verdict.mutual_exclusion_ok, e.label + " broke the invariant or exclusion");
    finals += e.verdict.finals;
  }
  if (r.ok) r.detail = std::to_string(finals) + " final states linearizable";
  return r;
}

} // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
      {"operation outcomes", criterion1},      {"insert fragment", criterion2},
      {"program order", criterion3},          {"falsification", criterion4},
      {"Unfalsify preserved", criterion5},  {"lock adequacy", criterion6},
      {"key movement", criterion7},           {"engine vs naive evaluator", criterion8},
      {"linearizability", criterion9}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Result res;
    try {
      res = criteria[i].second();
    } catch (const std::exception& e) {
      res = {false, std::string("exception: ") + e.what()};
    }
    failed += !res.ok;
    std::cout << (res.ok ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " - "
              << res.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
