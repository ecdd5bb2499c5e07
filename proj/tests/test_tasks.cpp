#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cds/dsl.hpp"
#include "cds/tasks.hpp"

using namespace cds;

namespace {

struct ListFixture {
  Bundle b = builtin_bundle("linked_list");
  Context ctx{b.knowledge};
  Delta d = least_delta(ctx, 4);
  const OperationSpec& ins = *b.knowledge.operation("ins");
  const OperationSpec& del = *b.knowledge.operation("del");
  const BlockSpec& ins_blk = ins.blocks[0];
  const BlockSpec& del_blk = del.blocks[0];
  std::vector<Binding> ins_bs = match_pre(ctx, ins_blk, d.state);
  std::vector<Binding> del_bs = match_pre(ctx, del_blk, d.state);

  const Literal& lit(const std::string& text) const {
    static std::vector<Literal> keep;
    keep.push_back(parse_literal(text, b.theory));
    return keep.back();
  }
};

bool contains(const std::vector<Literal>& ls, const Literal& l) { return std::find(ls.begin(), ls.end(), l) != ls.end(); }

} // namespace

TEST_CASE("guard modes parse") {
  CHECK(parse_guard_mode("protocol") == GuardMode::Protocol);
  CHECK(parse_guard_mode("literal") == GuardMode::Literal);
  CHECK_THROWS_AS(parse_guard_mode("strict"), std::invalid_argument);
}

TEST_CASE("window heuristic picks the modified neighbourhood") {
  ListFixture f;
  CHECK(window_symbols(f.ins_blk) == std::vector<std::string>{"x", "y"});
  CHECK(window_symbols(f.del_blk) == std::vector<std::string>{"x", "y"});
  LockHeuristic only_x{std::vector<std::string>{"x", "nonexistent"}};
  CHECK(heuristic_symbols(f.ins_blk, only_x) == std::vector<std::string>{"x"});
  HeapState start = prepare_fresh(f.d.state, f.ins_blk, f.ins_bs[0]);
  LockSet locks = window_heuristic(f.ins_blk, f.ins_bs[0], start, f.b.theory);
  CHECK(locks.nodes == std::vector<std::string>{"n1", "t"});
}

TEST_CASE("interference actions honour locks") {
  ListFixture f;
  InterferenceModel m = build_interference(f.ctx.kb());
  REQUIRE(m.templates.size() == 2);
  CHECK(m.templates[0].op == "del");
  auto free = enabled_actions(f.ctx, m, f.d.state, {});
  CHECK(free.size() == 3); // delete n1, insert before or after n1
  LockSet n1{{"n1"}};
  auto locked = enabled_actions(f.ctx, m, f.d.state, n1);
  CHECK(locked.empty());

  InterferenceModel lit = build_interference(f.ctx.kb(), GuardMode::Literal);
  auto partial = enabled_actions(f.ctx, lit, f.d.state, n1);
  // Effects leaving n1 are disabled; everything else stays.
  REQUIRE(partial.size() == 3);
  std::size_t disabled = 0;
  for (const auto& a : partial)
    for (std::size_t i = 0; i < a.effects.size(); ++i) {
      CHECK(a.enabled[i] == (a.effects[i].from != "n1"));
      disabled += !a.enabled[i];
    }
  CHECK(disabled == 1);

  HeapState after = apply_action(f.d.state, free[0]);
  CHECK(after.clock == f.d.state.clock + 1);
  CHECK_FALSE(after.same_heap(f.d.state));
  InterferenceAction none = free[0];
  none.enabled.assign(none.effects.size(), false);
  CHECK_THROWS_AS(apply_action(f.d.state, none), std::invalid_argument);
}

TEST_CASE("trajectory enumeration is length-major with idle first") {
  ListFixture f;
  InterferenceModel m = build_interference(f.ctx.kb());
  std::vector<std::size_t> lengths;
  for_each_trajectory(f.ctx, m, f.d.state, 1, {}, [&](const Trajectory& t) {
    lengths.push_back(t.length());
    return true;
  });
  REQUIRE(lengths.size() == 1 + 4);
  CHECK(lengths[0] == 0);
  auto sat = satisfiable(f.ctx, m, f.d.state, 2, {}, [&](const Trajectory& t) {
    return !f.ctx.derive(t.states.back()).contains("reach", {Value::sym("n1")});
  });
  REQUIRE(sat);
  CHECK(sat->length() == 1);
}

TEST_CASE("task 1 on linked-list insert and delete") {
  ListFixture f;
  auto r = task1_unfalsify(f.ctx, f.ins, f.ins_blk, f.d.state, f.ins_bs, default_horizon(f.ins_blk));
  CHECK(r.unfalsify == std::vector<Literal>{f.lit("suffix(y)")});
  for (const auto& v : r.verdicts) {
    if (!v.falsifiable) continue;
    REQUIRE(v.witness);
    CHECK(falsifies(f.ctx, *v.witness, v.literal, v.binding));
  }
  auto rd = task1_unfalsify(f.ctx, f.del, f.del_blk, f.d.state, f.del_bs, default_horizon(f.del_blk));
  CHECK(contains(rd.unfalsify, f.lit("suffix(z)")));
  CHECK_FALSE(contains(rd.unfalsify, f.lit("edge(x,y)")));

  auto zero = task1_unfalsify(f.ctx, f.ins, f.ins_blk, f.d.state, f.ins_bs, 0);
  CHECK(zero.degenerate());
  CHECK(zero.unfalsify.size() == fluent_conjuncts(f.b.theory, f.ins_blk).size());
}

TEST_CASE("task 2 adequacy with default, reduced and literal locks") {
  ListFixture f;
  const int h = default_horizon(f.ins_blk);
  auto full = task2_adequacy_all(f.ctx, f.ins, f.ins_blk, f.d.state, f.ins_bs, GuardMode::Protocol, {}, h);
  CHECK(full.adequate);
  CHECK(full.lock_symbols == std::vector<std::string>{"x", "y"});

  LockHeuristic only_x{std::vector<std::string>{"x"}};
  auto partial = task2_adequacy_all(f.ctx, f.ins, f.ins_blk, f.d.state, f.ins_bs, GuardMode::Protocol, only_x, h);
  CHECK_FALSE(partial.adequate);
  REQUIRE(partial.witness);
  REQUIRE(partial.falsified);
  CHECK(falsifies(f.ctx, *partial.witness, *partial.falsified, partial.binding));

  auto del_full = task2_adequacy_all(f.ctx, f.del, f.del_blk, f.d.state, f.del_bs, GuardMode::Protocol, {}, h);
  CHECK(del_full.adequate);

  auto lit = task2_adequacy_all(f.ctx, f.ins, f.ins_blk, f.d.state, f.ins_bs, GuardMode::Literal, {}, h);
  CHECK(lit.guard == GuardMode::Literal);
}

TEST_CASE("task 3 program orders") {
  ListFixture f;
  auto r = task3_program_order(f.ctx, f.ins, f.ins_blk, f.d.state, f.ins_bs[0]);
  REQUIRE(r.valid.size() == 1);
  CHECK(r.valid[0] == ProgramOrder{2, 1});
  REQUIRE(r.rejected.size() == 1);
  CHECK(r.rejected[0].order == ProgramOrder{1, 2});
  CHECK(r.rejected[0].executed == 1);
  CHECK_FALSE(f.ctx.root_holds(f.ctx.derive(r.rejected[0].state)));

  auto rd = task3_program_order(f.ctx, f.del, f.del_blk, f.d.state, f.del_bs[0]);
  CHECK(rd.valid == std::vector<ProgramOrder>{{1}});

  InvariantSpec strict{true, true};
  auto rs = task3_program_order(f.ctx, f.ins, f.ins_blk, f.d.state, f.ins_bs[0], strict);
  CHECK(rs.valid == std::vector<ProgramOrder>{{2, 1}});
}

TEST_CASE("task 4 key movement") {
  ListFixture f;
  for (int h = 0; h <= 4; ++h) {
    CHECK_FALSE(task4_keymove(f.ctx, f.ins, 4, h).keymove);
    CHECK_FALSE(task4_keymove(f.ctx, f.del, 4, h).keymove);
  }
  CHECK(oracle_traversal(f.ctx, f.d.state, 10) == std::vector<std::string>{"h", "n1"});

  Bundle ib = builtin_bundle("internal_bst");
  Context ictx(ib.knowledge);
  auto r = task4_keymove(ictx, *ib.knowledge.operation("del"), 4);
  REQUIRE(r.keymove);
  REQUIRE(r.witness);
  CHECK(r.witness->block == "two_child");
  // The missed node is the relocated successor and stays present throughout.
  const auto& w = *r.witness;
  for (const auto& s : w.trajectory.states) CHECK(ictx.derive(s).contains("present", {Value::num(w.key)}));
  CHECK(std::find(w.cursor_path.begin(), w.cursor_path.end(), w.missed_node) == w.cursor_path.end());
  CHECK_FALSE(task4_keymove(ictx, *ib.knowledge.operation("ins"), 4).keymove);
}
