#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cds/dsl.hpp"
#include "cds/oracle.hpp"

using namespace cds;

namespace {

struct ListSetup {
  Bundle b = builtin_bundle("linked_list");
  Context ctx{b.knowledge};
  CodeIR ins = *generate_concurrent_code(ctx, *b.knowledge.operation("ins"), {}).ir;
  CodeIR del = *generate_concurrent_code(ctx, *b.knowledge.operation("del"), {}).ir;
  HeapState start = least_delta(ctx, 4).state; // h -> n1(10) -> t
};

HeapState four_node_list() {
  HeapState s;
  s.add_node("h", kMinKey);
  s.add_node("n1", 10);
  s.add_node("n2", 20);
  s.add_node("t", kMaxKey);
  s.set_succ("h", kNextLabel, "n1");
  s.set_succ("n1", kNextLabel, "n2");
  s.set_succ("n2", kNextLabel, "t");
  return s;
}

Schedule run_to_end(const Oracle& o, const HeapState& start, std::vector<int> prefer) {
  OracleConfig c = o.initial(start);
  Schedule s;
  for (;;) {
    auto r = o.runnable(c);
    if (r.empty()) break;
    int t = r.front();
    for (int p : prefer)
      if (std::find(r.begin(), r.end(), p) != r.end()) {
        t = p;
        break;
      }
    o.step(c, t);
    s.push_back(t);
  }
  return s;
}

} // namespace

TEST_CASE("single thread matches sequential application") {
  ListSetup f;
  Oracle o(f.ctx, {ThreadProgram{0, f.ins, 5}});
  Schedule s = run_to_end(o, f.start, {0});
  CHECK(s.size() <= o.max_steps(0));
  auto tr = o.run_schedule(f.start, s);
  REQUIRE(tr.completed.size() == 1);
  HeapState seq = apply_sequential(f.ctx, f.start, {0, "ins", 5});
  CHECK(key_edges(f.b.theory, tr.final.state) == key_edges(f.b.theory, seq));
  CHECK(f.ctx.root_holds(f.ctx.derive(tr.final.state)));
  CHECK(tr.final.state.has_node(thread_fresh_id(0, "tau")));
}

TEST_CASE("a delete that wins the window makes the insert abort") {
  ListSetup f;
  // del removes n1 (key 10); ins targets key 5 between h and n1.
  Oracle o(f.ctx, {ThreadProgram{0, f.ins, 5}, ThreadProgram{1, f.del, 10}});
  OracleConfig c = o.initial(f.start);
  o.step(c, 0); // ins resolves its window {h, n1}
  while (!o.runnable(c).empty() && c.threads[1].phase != ThreadState::Phase::Done) o.step(c, 1);
  REQUIRE(c.threads[1].committed());
  while (!o.runnable(c).empty()) o.step(c, 0);
  CHECK(c.threads[0].aborted);
  CHECK_FALSE(c.threads[0].committed());
  CHECK(f.ctx.root_holds(f.ctx.derive(c.state)));
  auto done = o.completed(c);
  REQUIRE(done.size() == 1);
  CHECK(done[0].op == "del");
}

TEST_CASE("disjoint inserts both commit") {
  ListSetup f;
  HeapState s = four_node_list();
  Oracle o(f.ctx, {ThreadProgram{0, f.ins, 5}, ThreadProgram{1, f.ins, 25}});
  Schedule sched = run_to_end(o, s, {1, 0});
  auto tr = o.run_schedule(s, sched);
  CHECK(tr.completed.size() == 2);
  CHECK(linearization_exists(f.ctx, s, tr.final.state, tr.completed));
  Verdict v = o.explore(s);
  CHECK(v.all_ok());
  CHECK(v.deadlocks == 0);
}

TEST_CASE("exhaustive exploration of the synthesized list fragments") {
  ListSetup f;
  auto threads = default_threads(f.ctx, {f.ins, f.del}, 2, f.start);
  REQUIRE(threads.size() == 2);
  Oracle o(f.ctx, threads);
  Verdict v = o.explore(f.start);
  CHECK(v.all_ok());
  CHECK_FALSE(v.counterexample);
  CHECK(v.states > 10);
  CHECK(v.finals > 0);
  auto j = to_json(v);
  CHECK(j["linearizable"] == true);
}

TEST_CASE("wrong link order is caught") {
  ListSetup f;
  CodeIR broken = f.ins;
  std::swap(broken.blocks[0].steps[0], broken.blocks[0].steps[1]);
  broken.blocks[0].order = {1, 2};
  Oracle o(f.ctx, {ThreadProgram{0, broken, 5}});
  Verdict v = o.explore(f.start);
  CHECK_FALSE(v.invariant_ok);
  REQUIRE(v.counterexample);
  CHECK(v.counterexample->property == "invariant");
  CHECK_FALSE(v.counterexample->schedule.empty());
}

TEST_CASE("no threads") {
  ListSetup f;
  Oracle o(f.ctx, {});
  Verdict v = o.explore(f.start);
  CHECK(v.all_ok());
  CHECK(v.finals == 1);
  CHECK(default_threads(f.ctx, {}, 3, f.start).empty());
}

TEST_CASE("RCU fragments halt") {
  ListSetup f;
  CodeIR rcu;
  rcu.op = "ins";
  rcu.outcome = Outcome::RCU;
  rcu.rcu = RcuCause::KeyMovement;
  Oracle o(f.ctx, {ThreadProgram{0, rcu, 5}});
  auto tr = o.run_schedule(f.start, run_to_end(o, f.start, {}));
  CHECK(tr.completed.empty());
  CHECK(tr.final.state.same_heap(f.start));
}

TEST_CASE("linearization checks") {
  ListSetup f;
  HeapState after_ins = apply_sequential(f.ctx, f.start, {0, "ins", 5});
  CHECK(linearization_exists(f.ctx, f.start, after_ins, {{0, "ins", 5}}));
  CHECK_FALSE(linearization_exists(f.ctx, f.start, f.start, {{0, "ins", 5}}));
  HeapState both = apply_sequential(f.ctx, after_ins, {1, "del", 10});
  CHECK(linearization_exists(f.ctx, f.start, both, {{1, "del", 10}, {0, "ins", 5}}));
  // Deleting an absent key leaves the structure alone.
  CHECK(key_edges(f.b.theory, apply_sequential(f.ctx, f.start, {0, "del", 30})) == key_edges(f.b.theory, f.start));
}

TEST_CASE("invalid schedules throw") {
  ListSetup f;
  Oracle o(f.ctx, {ThreadProgram{0, f.ins, 5}});
  CHECK_THROWS_AS(o.run_schedule(f.start, {1}), std::invalid_argument);
  Schedule s = run_to_end(o, f.start, {0});
  s.push_back(0);
  CHECK_THROWS_AS(o.run_schedule(f.start, s), std::invalid_argument);
}
