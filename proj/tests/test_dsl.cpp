#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cds/dsl.hpp"

using namespace cds;

namespace {

const char* kTinyTheory = R"(#fluent edge/2 reach/1 ok/0.
#static key/2.
#sentinel h t.
#root ok.
reach(h).
reach(X) :- edge(Y, X), reach(Y).
ok :- reach(t).
)";

Theory with_rule(const std::string& rule) { return parse_theory(std::string(kTinyTheory) + rule + "\n"); }

} // namespace

TEST_CASE("builtin bundles parse and round-trip through the renderer") {
  for (const auto& name : builtin_bundle_names()) {
    CAPTURE(name);
    Bundle b = builtin_bundle(name);
    Theory again = parse_theory(render_theory(b.theory));
    CHECK(again == b.theory);
    KnowledgeBase kb = parse_knowledge(render_knowledge(b.knowledge), again);
    CHECK(kb.operations == b.knowledge.operations);
    CHECK(render_knowledge(kb) == render_knowledge(b.knowledge));
  }
  CHECK_THROWS_AS(builtin_bundle("skip_list"), std::invalid_argument);
}

TEST_CASE("linked list knowledge has the expected shape") {
  Bundle b = builtin_bundle("linked_list");
  const auto* ins = b.knowledge.operation("ins");
  REQUIRE(ins);
  REQUIRE(ins->blocks.size() == 1);
  CHECK(ins->blocks[0].fresh == std::vector<std::string>{"tau"});
  CHECK(ins->blocks[0].steps.size() == 2);
  CHECK(b.knowledge.operation("member")->destructive() == false);
  CHECK(b.knowledge.traversal() != nullptr);
  CHECK(b.theory.root == "list");
}

TEST_CASE("unsafe rules are rejected") {
  CHECK_THROWS_AS(with_rule("bad(X) :- not reach(X)."), ParseError);
  CHECK_THROWS_AS(with_rule("bad(X) :- reach(Y)."), ParseError);
  CHECK_THROWS_AS(with_rule("bad :- reach(X), K < Kx."), ParseError);
  CHECK_NOTHROW(with_rule("ok :- reach(X), not edge(X, t)."));
}

TEST_CASE("negation cycles are rejected") {
  const char* cyclic = R"(#fluent edge/2 p/0 q/0.
#static key/2.
#sentinel h t.
#root p.
p :- edge(h, t), not q.
q :- edge(h, t), not p.
p :- p, edge(h, t).
)";
  CHECK_THROWS_AS(parse_theory(cyclic), ParseError);
}

TEST_CASE("parse errors carry a position") {
  try {
    parse_theory("#fluent edge/2.\n#static key/2.\nreach(X :- edge(X).\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse_theory("reach(h)."), ParseError);
}

TEST_CASE("undeclared predicates and arity mismatches are rejected") {
  CHECK_THROWS_AS(with_rule("ok :- foo(h)."), ParseError);
  CHECK_THROWS_AS(with_rule("ok :- reach(h, t)."), ParseError);
  CHECK_THROWS_AS(with_rule("edge(h, t) :- reach(h)."), ParseError);
}

TEST_CASE("knowledge validation") {
  Theory th = builtin_bundle("linked_list").theory;
  CHECK_THROWS_AS(parse_knowledge("#op ins b pre [reach(x), nope(x)] post [reach(x)] steps [link(x,y)].", th), ParseError);
  CHECK_THROWS_AS(parse_knowledge("#op ins b pre [reach(x)] post [Kx < Ky] steps [link(x,y)].", th), ParseError);
  CHECK_NOTHROW(parse_knowledge("#op ins b pre [reach(x), edge(x,y)] post [edge(x,y)] steps [link(x,y)].", th));
}

TEST_CASE("single literals parse with sentinels marked") {
  Theory th = builtin_bundle("linked_list").theory;
  Literal l = parse_literal("edge(h,y)", th);
  REQUIRE(l.kind == Literal::Kind::Positive);
  CHECK(l.atom.args[0].sentinel);
  CHECK_FALSE(l.atom.args[1].sentinel);
  CHECK(to_string(parse_literal("not reach(y)", th)) == "not reach(y)");
  CHECK(to_string(parse_literal("Kx < Kt", th)) == "Kx < Kt");
  CHECK_THROWS_AS(parse_literal("reach(x) extra", th), ParseError);
}

TEST_CASE("strata order negation below its user") {
  Theory th = builtin_bundle("internal_bst").theory;
  CHECK(check_stratification(th));
  auto layers = strata(th);
  auto layer_of = [&](const std::string& p) {
    for (std::size_t i = 0; i < layers.size(); ++i)
      if (std::find(layers[i].begin(), layers[i].end(), p) != layers[i].end()) return static_cast<int>(i);
    return -1;
  };
  CHECK(layer_of("bad") < layer_of("tree"));
  CHECK(layer_of("reach") >= 0);
}
