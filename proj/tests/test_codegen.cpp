#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <set>
#include <sstream>

#include "cds/codegen.hpp"
#include "cds/dsl.hpp"

using namespace cds;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

OpSynthesis synth_op(const Bundle& b, const std::string& op, SynthesisConfig cfg = {}) {
  Context ctx(b.knowledge);
  return generate_concurrent_code(ctx, *b.knowledge.operation(op), cfg);
}

} // namespace

TEST_CASE("enum strings round trip") {
  for (auto o : {Outcome::Success, Outcome::RCU, Outcome::Unchanged}) CHECK(parse_outcome(to_string(o)) == o);
  for (auto c : {RcuCause::NoValidOrder, RcuCause::KeyMovement, RcuCause::InadequateLocks})
    CHECK(parse_rcu_cause(to_string(c)) == c);
  CHECK(to_string(RcuCause::KeyMovement) == "key-movement");
  CHECK_THROWS_AS(parse_outcome("maybe"), std::invalid_argument);
}

TEST_CASE("linked-list insert fragment") {
  Bundle b = builtin_bundle("linked_list");
  auto r = synth_op(b, "ins");
  REQUIRE(r.outcome == Outcome::Success);
  REQUIRE(r.ir);
  const CodeIR& ir = *r.ir;
  REQUIRE(ir.blocks.size() == 1);
  const BlockCode& bc = ir.blocks[0];
  CHECK(bc.fresh == std::vector<std::string>{"tau"});
  CHECK(bc.locks == std::vector<std::string>{"x", "y"});
  CHECK(bc.unlocks == std::vector<std::string>{"y", "x"});
  CHECK(bc.order == ProgramOrder{2, 1});
  REQUIRE(bc.steps.size() == 2);
  CHECK(render_step(bc.steps[0]) == "tau.next := y;");
  CHECK(render_step(bc.steps[1]) == "x.next := tau;");
  std::set<std::string> validate;
  for (const auto& l : bc.validate) validate.insert(to_string(l));
  CHECK(validate == std::set<std::string>{"reach(x)", "edge(x,y)", "Kx < Kt", "Kt < Ky"});
  CHECK(render_text(ir) == read_file(std::string(CDS_SOURCE_DIR) + "/tests/golden/ins.txt"));
}

TEST_CASE("IR JSON round trip") {
  Bundle b = builtin_bundle("linked_list");
  for (const char* op : {"ins", "del", "member"}) {
    auto r = synth_op(b, op);
    REQUIRE(r.ir);
    auto j = to_json(*r.ir);
    CHECK(j["schema_version"] == kSchemaVersion);
    CodeIR back = code_ir_from_json(nlohmann::json::parse(j.dump()), b.theory);
    CHECK(back == *r.ir);
  }
  auto j = to_json(*synth_op(b, "ins").ir);
  j["schema_version"] = kSchemaVersion + 1;
  CHECK_THROWS_AS(code_ir_from_json(j, b.theory), std::invalid_argument);
  auto bad = to_json(*synth_op(b, "ins").ir);
  bad["blocks"][0]["validate"][0] = "reach(";
  CHECK_THROWS(code_ir_from_json(bad, b.theory));
}

TEST_CASE("distinct operations give distinct fragments") {
  Bundle b = builtin_bundle("linked_list");
  auto ins = synth_op(b, "ins"), del = synth_op(b, "del");
  REQUIRE(ins.ir);
  REQUIRE(del.ir);
  CHECK(render_text(*ins.ir) != render_text(*del.ir));
  CHECK_FALSE(*ins.ir == *del.ir);
  REQUIRE(del.ir->blocks.size() == 1);
  CHECK(del.ir->blocks[0].steps.size() == 1);
  CHECK(render_step(del.ir->blocks[0].steps[0]) == "x.next := z;");
}

TEST_CASE("member keeps its traversal") {
  Bundle b = builtin_bundle("linked_list");
  auto r = synth_op(b, "member");
  CHECK(r.outcome == Outcome::Unchanged);
  REQUIRE(r.ir);
  CHECK(r.ir->traversal);
  CHECK(r.ir->blocks.empty());
  CHECK(render_text(*r.ir) == "op member\ntraversal unchanged\n");
}

TEST_CASE("internal tree delete recommends RCU for key movement") {
  Bundle b = builtin_bundle("internal_bst");
  auto r = synth_op(b, "del");
  CHECK(r.outcome == Outcome::RCU);
  REQUIRE(r.rcu);
  CHECK(r.rcu->cause == RcuCause::KeyMovement);
  REQUIRE(r.rcu->keymove);
  CHECK(r.rcu->keymove->keymove);
  REQUIRE(r.ir);
  CHECK(r.ir->rcu == RcuCause::KeyMovement);
  CHECK(render_text(*r.ir) == "op del\nrcu(key-movement)\n");
}

TEST_CASE("empty lock set is inadequate") {
  Bundle b = builtin_bundle("linked_list");
  SynthesisConfig cfg;
  cfg.heuristic.symbols = std::vector<std::string>{};
  auto r = synth_op(b, "ins", cfg);
  CHECK(r.outcome == Outcome::RCU);
  REQUIRE(r.rcu);
  CHECK(r.rcu->cause == RcuCause::InadequateLocks);
  REQUIRE(r.rcu->adequacy);
  CHECK(r.rcu->adequacy->witness);
}

TEST_CASE("block without a valid order") {
  Bundle b = builtin_bundle("linked_list");
  KnowledgeBase kb = parse_knowledge(R"(
#op member.
#op half block1
    pre [reach(x), suffix(y), edge(x,y), key(x,Kx), key(y,Ky), key(tau,Kt), Kx < Kt, Kt < Ky]
    post [reach(tau), edge(x,tau)]
    steps [link(x,tau)].
#traverse member descend [edge(X,Y), key(X,Kx), Kx < K].
)",
                                     b.theory);
  Context ctx(kb);
  auto r = generate_concurrent_code(ctx, *kb.operation("half"), {});
  CHECK(r.outcome == Outcome::RCU);
  REQUIRE(r.rcu);
  CHECK(r.rcu->cause == RcuCause::NoValidOrder);
  CHECK(r.rcu->block == "block1");
  CHECK_FALSE(r.rcu->rejected.empty());
  // Later gates are skipped unless every task is requested.
  CHECK_FALSE(r.blocks[0].task2);
  SynthesisConfig all;
  all.all_tasks = true;
  auto full = generate_concurrent_code(ctx, *kb.operation("half"), all);
  CHECK(full.outcome == Outcome::RCU);
  CHECK(full.blocks[0].task2);
}

TEST_CASE("synthesis report") {
  Bundle b = builtin_bundle("linked_list");
  Context ctx(b.knowledge);
  SynthesisConfig cfg;
  auto rep = synthesize(ctx, cfg, "linked_list");
  CHECK_FALSE(rep.any_rcu());
  auto row = outcome_row(rep);
  CHECK(row["ins"] == "Success");
  CHECK(row["del"] == "Success");
  CHECK(row["member"] == "Unchanged");
  auto j = render_report(rep);
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["ops"].size() == 3);

  cfg.ops = {"nope"};
  CHECK_THROWS_AS(synthesize(ctx, cfg), std::invalid_argument);

  SynthesisConfig zero;
  zero.horizon = 0;
  zero.ops = {"ins"};
  auto z = synthesize(ctx, zero);
  REQUIRE(z.ops.size() == 1);
  REQUIRE(z.ops[0].blocks[0].task1);
  CHECK(z.ops[0].blocks[0].task1->degenerate());
}
