#include "cds/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace cds {

ParseError::ParseError(const std::string& msg, int line, int column)
    : std::runtime_error(line > 0 ? std::to_string(line) + ":" + std::to_string(column) + ": " + msg
                                  : msg),
      line_(line), column_(column) {}

namespace {

enum class Tok { Ident, Int, Directive, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  std::int64_t value = 0;
  int line = 0;
  int column = 0;
};

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '%') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t{Tok::Punct, {}, 0, line, col};
    auto ident_char = [&](std::size_t k) {
      return k < src.size() && (std::isalnum(static_cast<unsigned char>(src[k])) || src[k] == '_');
    };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (ident_char(j)) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '-' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i + 1;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::Int;
      t.text = std::string(src.substr(i, j - i));
      t.value = std::stoll(t.text);
      advance(j - i);
    } else if (c == '#') {
      std::size_t j = i + 1;
      while (ident_char(j)) ++j;
      if (j == i + 1) throw ParseError("expected directive name after '#'", line, col);
      t.kind = Tok::Directive;
      t.text = std::string(src.substr(i + 1, j - i - 1));
      advance(j - i);
    } else if (c == ':' && i + 1 < src.size() && src[i + 1] == '-') {
      t.text = ":-";
      advance(2);
    } else if (std::string_view("(),.[]<=/").find(c) != std::string_view::npos) {
      t.text = std::string(1, c);
      advance(1);
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    out.push_back(std::move(t));
  }
  out.push_back({Tok::End, {}, 0, line, col});
  return out;
}

bool is_variable_name(const std::string& s) {
  return !s.empty() && (std::isupper(static_cast<unsigned char>(s[0])) || s[0] == '_');
}

class Parser {
public:
  explicit Parser(std::string_view src) : toks_(tokenize(src)) {}

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == Tok::End; }
  Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  bool is_punct(const char* p, std::size_t k = 0) const {
    return peek(k).kind == Tok::Punct && peek(k).text == p;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, peek().line, peek().column);
  }

  void expect(const char* p) {
    if (!is_punct(p)) fail(std::string("expected '") + p + "' but found '" + describe(peek()) + "'");
    next();
  }

  std::string expect_ident() {
    if (peek().kind != Tok::Ident) fail("expected identifier but found '" + describe(peek()) + "'");
    return next().text;
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Directive: return "#" + t.text;
    default: return t.text;
    }
  }

  Term parse_term() {
    const Token& t = peek();
    if (t.kind == Tok::Int) return Term::integer(next().value);
    if (t.kind == Tok::Ident) {
      std::string n = next().text;
      return is_variable_name(n) ? Term::variable(n) : Term::constant(n);
    }
    fail("expected term but found '" + describe(t) + "'");
  }

  Atom parse_atom() {
    Atom a;
    std::string name = expect_ident();
    if (is_variable_name(name)) fail("predicate name must be lowercase: " + name);
    a.predicate = name;
    if (is_punct("(")) {
      next();
      if (!is_punct(")")) {
        a.args.push_back(parse_term());
        while (is_punct(",")) {
          next();
          a.args.push_back(parse_term());
        }
      }
      expect(")");
    }
    return a;
  }

  Literal parse_literal() {
    const Token& t = peek();
    if (t.kind == Tok::Ident && t.text == "not" && peek(1).kind == Tok::Ident) {
      next();
      return Literal::negative(parse_atom());
    }
    bool comparison = t.kind == Tok::Int || (t.kind == Tok::Ident && is_variable_name(t.text)) ||
                      (t.kind == Tok::Ident && (is_punct("<", 1) || is_punct("=", 1)));
    if (comparison) {
      Comparison c;
      c.lhs = parse_term();
      if (is_punct("<")) {
        c.op = CmpOp::Less;
      } else if (is_punct("=")) {
        c.op = CmpOp::Equal;
      } else {
        fail("expected '<' or '=' in comparison");
      }
      next();
      c.rhs = parse_term();
      return Literal::compare(c);
    }
    return Literal::positive(parse_atom());
  }

  std::vector<Literal> parse_body(std::initializer_list<const char*> terminators) {
    std::vector<Literal> body;
    auto at_term = [&] {
      for (auto* t : terminators)
        if (is_punct(t)) return true;
      return false;
    };
    if (at_term()) return body;
    body.push_back(parse_literal());
    while (is_punct(",")) {
      next();
      body.push_back(parse_literal());
    }
    return body;
  }

  std::vector<Literal> parse_bracket_literals() {
    expect("[");
    auto lits = parse_body({"]"});
    expect("]");
    return lits;
  }

private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

struct PredDecl {
  std::string name;
  std::size_t arity;
};

std::vector<PredDecl> parse_decls(Parser& p) {
  std::vector<PredDecl> out;
  while (!p.is_punct(".")) {
    std::string name = p.expect_ident();
    p.expect("/");
    if (p.peek().kind != Tok::Int) p.fail("expected arity after '/'");
    out.push_back({name, static_cast<std::size_t>(p.next().value)});
  }
  p.expect(".");
  return out;
}

void mark_sentinels(Term& t, const Theory& th) {
  if (t.is_constant()) t.sentinel = th.is_sentinel(t.name);
}

void mark_sentinels(Literal& l, const Theory& th) {
  if (l.is_atom()) {
    for (auto& t : l.atom.args) mark_sentinels(t, th);
  } else {
    mark_sentinels(l.cmp.lhs, th);
    mark_sentinels(l.cmp.rhs, th);
  }
}

std::set<std::string> vars_of(const Atom& a) {
  std::set<std::string> v;
  for (const auto& t : a.args)
    if (t.is_variable()) v.insert(t.name);
  return v;
}

struct DepEdge {
  std::string to;
  bool negative;
};

std::map<std::string, std::vector<DepEdge>> dependency_graph(const Theory& th) {
  std::map<std::string, std::vector<DepEdge>> g;
  for (const auto& r : th.rules) {
    if (!r.head) continue;
    auto& edges = g[r.head->predicate];
    for (const auto& l : r.body) {
      if (!l.is_atom()) continue;
      edges.push_back({l.atom.predicate, l.kind == Literal::Kind::Negative});
      g.try_emplace(l.atom.predicate);
    }
  }
  return g;
}

// Tarjan SCC; components are emitted in reverse topological order of the
// "depends on" relation, i.e. dependencies first.
std::vector<std::vector<std::string>> sccs(const std::map<std::string, std::vector<DepEdge>>& g) {
  std::map<std::string, int> index, low;
  std::set<std::string> on_stack;
  std::vector<std::string> stack;
  std::vector<std::vector<std::string>> out;
  int counter = 0;
  std::function<void(const std::string&)> visit = [&](const std::string& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack.insert(v);
    for (const auto& e : g.at(v)) {
      if (!index.count(e.to)) {
        visit(e.to);
        low[v] = std::min(low[v], low[e.to]);
      } else if (on_stack.count(e.to)) {
        low[v] = std::min(low[v], index[e.to]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::string> comp;
      std::string w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack.erase(w);
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      out.push_back(std::move(comp));
    }
  };
  for (const auto& [v, _] : g)
    if (!index.count(v)) visit(v);
  return out;
}

// Shortest path from `from` to `to` inside one component.
std::vector<std::string> path_within(const std::map<std::string, std::vector<DepEdge>>& g,
                                     const std::set<std::string>& comp, const std::string& from,
                                     const std::string& to) {
  std::map<std::string, std::string> parent;
  std::vector<std::string> frontier{from};
  std::set<std::string> seen{from};
  while (!frontier.empty()) {
    std::vector<std::string> nxt;
    for (const auto& v : frontier) {
      if (v == to) {
        std::vector<std::string> path{to};
        for (std::string c = to; c != from; c = parent[c]) path.push_back(parent[c]);
        std::reverse(path.begin(), path.end());
        return path;
      }
      for (const auto& e : g.at(v))
        if (comp.count(e.to) && seen.insert(e.to).second) {
          parent[e.to] = v;
          nxt.push_back(e.to);
        }
    }
    frontier = std::move(nxt);
  }
  return {from};
}

bool is_base_predicate(const Theory& th, const std::string& p) { return p == "edge" || th.is_static(p); }

void validate_theory(const Theory& th, const std::vector<int>& rule_lines) {
  if (th.root.empty()) throw ParseError("missing structural-root declaration (#root)");
  if (th.sentinels.empty()) throw ParseError("missing sentinel declaration (#sentinel)");
  if (!th.fluents.count("edge")) throw ParseError("theory must declare the edge fluent");
  std::size_t ea = th.fluents.at("edge");
  if (ea != 2 && ea != 3) throw ParseError("edge must have arity 2 or 3");
  if (!th.statics.count("key") || th.statics.at("key") != 2)
    throw ParseError("theory must declare the static key/2");
  for (const auto& [name, _] : th.fluents)
    if (th.statics.count(name)) throw ParseError("predicate declared both fluent and static: " + name);

  for (std::size_t i = 0; i < th.rules.size(); ++i) {
    const Rule& r = th.rules[i];
    int line = rule_lines[i];
    auto check_atom = [&](const Atom& a) {
      auto ar = th.arity_of(a.predicate);
      if (!ar) throw ParseError("undeclared predicate " + a.predicate, line);
      if (*ar != a.arity())
        throw ParseError("predicate " + a.predicate + " used with arity " + std::to_string(a.arity()) +
                             " but declared /" + std::to_string(*ar),
                         line);
    };
    if (r.head) {
      check_atom(*r.head);
      if (is_base_predicate(th, r.head->predicate))
        throw ParseError("rules cannot define base predicate " + r.head->predicate, line);
    }
    std::set<std::string> bound;
    for (const auto& l : r.body) {
      if (l.is_atom()) {
        check_atom(l.atom);
        if (l.kind == Literal::Kind::Positive) {
          auto v = vars_of(l.atom);
          bound.insert(v.begin(), v.end());
        }
      } else if (l.cmp.op == CmpOp::Equal) {
        throw ParseError("key equality is only allowed in knowledge preconditions", line);
      }
    }
    auto require = [&](const Term& t, const char* where) {
      if (t.is_variable() && !bound.count(t.name))
        throw ParseError("unsafe rule: variable " + t.name + " in " + where +
                             " does not occur in a positive body atom",
                         line);
    };
    if (r.head)
      for (const auto& t : r.head->args) require(t, "head");
    for (const auto& l : r.body) {
      if (l.kind == Literal::Kind::Negative)
        for (const auto& t : l.atom.args) require(t, "negative literal");
      if (l.kind == Literal::Kind::Compare) {
        require(l.cmp.lhs, "comparison");
        require(l.cmp.rhs, "comparison");
      }
    }
  }

  auto strat = check_stratification(th);
  if (!strat.ok) {
    std::string w;
    for (std::size_t i = 0; i < strat.cycle.size(); ++i) w += (i ? " -> " : "") + strat.cycle[i];
    throw ParseError("negation cycle (not stratified): " + w);
  }

  bool defined = std::any_of(th.rules.begin(), th.rules.end(),
                             [&](const Rule& r) { return r.head && r.head->predicate == th.root; });
  if (!defined) throw ParseError("structural root " + th.root + " has no defining rule");
  // The root must depend on some recursive predicate.
  auto g = dependency_graph(th);
  std::set<std::string> recursive;
  for (const auto& comp : sccs(g)) {
    if (comp.size() > 1) {
      recursive.insert(comp.begin(), comp.end());
    } else {
      for (const auto& e : g.at(comp[0]))
        if (e.to == comp[0]) recursive.insert(comp[0]);
    }
  }
  std::set<std::string> seen{th.root};
  std::vector<std::string> work{th.root};
  bool found = false;
  while (!work.empty() && !found) {
    std::string v = work.back();
    work.pop_back();
    if (recursive.count(v)) found = true;
    for (const auto& e : g.at(v))
      if (seen.insert(e.to).second) work.push_back(e.to);
  }
  if (!found) throw ParseError("structural root " + th.root + " is not defined recursively");
}

} // namespace

StratificationResult check_stratification(const Theory& theory) {
  auto g = dependency_graph(theory);
  for (const auto& comp : sccs(g)) {
    std::set<std::string> members(comp.begin(), comp.end());
    for (const auto& v : comp) {
      for (const auto& e : g.at(v)) {
        if (e.negative && members.count(e.to)) {
          StratificationResult r;
          r.ok = false;
          // v -> not e.to, then back from e.to to v.
          r.cycle.push_back(v);
          auto back = path_within(g, members, e.to, v);
          for (const auto& p : back) r.cycle.push_back(p);
          return r;
        }
      }
    }
  }
  return {};
}

std::vector<std::vector<std::string>> strata(const Theory& theory) {
  auto g = dependency_graph(theory);
  std::vector<std::vector<std::string>> out;
  for (auto& comp : sccs(g)) {
    std::vector<std::string> derived;
    for (auto& p : comp)
      if (!is_base_predicate(theory, p)) derived.push_back(p);
    if (!derived.empty()) out.push_back(std::move(derived));
  }
  return out;
}

Theory parse_theory(std::string_view text) {
  Parser p(text);
  Theory th;
  std::vector<int> rule_lines;
  bool shape_given = false;
  while (!p.at_end()) {
    const Token& t = p.peek();
    if (t.kind == Tok::Directive) {
      std::string d = p.next().text;
      if (d == "fluent" || d == "static") {
        for (const auto& decl : parse_decls(p)) {
          auto& target = d == "fluent" ? th.fluents : th.statics;
          if (target.count(decl.name)) p.fail("duplicate declaration of " + decl.name);
          target[decl.name] = decl.arity;
        }
      } else if (d == "sentinel") {
        while (!p.is_punct(".")) {
          Sentinel s;
          s.name = p.expect_ident();
          if (is_variable_name(s.name)) p.fail("sentinel must be a constant: " + s.name);
          if (p.is_punct("=")) {
            p.next();
            std::string ext = p.expect_ident();
            if (ext != "min" && ext != "max") p.fail("sentinel extreme must be min or max");
            s.max_key = ext == "max";
          } else {
            s.max_key = !th.sentinels.empty();
          }
          if (th.is_sentinel(s.name)) p.fail("sentinel declared more than once: " + s.name);
          th.sentinels.push_back(s);
        }
        p.expect(".");
      } else if (d == "root") {
        if (!th.root.empty()) p.fail("duplicate #root declaration");
        th.root = p.expect_ident();
        p.expect(".");
      } else if (d == "shape") {
        std::string s = p.expect_ident();
        if (s == "chain") th.shape = ShapeKind::Chain;
        else if (s == "tree") th.shape = ShapeKind::Tree;
        else if (s == "full_tree") th.shape = ShapeKind::FullTree;
        else p.fail("unknown shape " + s);
        shape_given = true;
        p.expect(".");
      } else {
        p.fail("unknown theory directive #" + d);
      }
      continue;
    }
    Rule r;
    int line = t.line;
    if (p.is_punct(":-")) {
      p.next();
      r.body = p.parse_body({"."});
      if (r.body.empty()) p.fail("empty constraint");
    } else {
      r.head = p.parse_atom();
      if (p.is_punct(":-")) {
        p.next();
        r.body = p.parse_body({"."});
        if (r.body.empty()) p.fail("empty rule body");
      }
    }
    p.expect(".");
    th.rules.push_back(std::move(r));
    rule_lines.push_back(line);
  }
  if (!shape_given && th.fluents.count("edge") && th.fluents.at("edge") == 3) th.shape = ShapeKind::Tree;
  for (auto& r : th.rules) {
    if (r.head)
      for (auto& t : r.head->args) mark_sentinels(t, th);
    for (auto& l : r.body) mark_sentinels(l, th);
  }
  validate_theory(th, rule_lines);
  return th;
}

namespace {

void validate_block(const Theory& th, const OperationSpec& op, const BlockSpec& b, int line) {
  auto where = " in " + op.name + "/" + b.id;
  auto check_atom = [&](const Atom& a) {
    auto ar = th.arity_of(a.predicate);
    if (!ar) throw ParseError("undeclared predicate " + a.predicate + where, line);
    if (*ar != a.arity()) throw ParseError("arity mismatch for " + a.predicate + where, line);
  };
  std::set<std::string> key_vars;
  for (const auto& l : b.pre)
    if (l.is_atom()) {
      check_atom(l.atom);
      if (l.kind == Literal::Kind::Positive)
        for (const auto& t : l.atom.args)
          if (t.is_variable()) key_vars.insert(t.name);
    }
  for (const auto& l : b.pre) {
    if (l.kind == Literal::Kind::Negative)
      for (const auto& t : l.atom.args)
        if (t.is_variable() && !key_vars.count(t.name))
          throw ParseError("unbound variable " + t.name + " in negative precondition" + where, line);
    if (l.kind != Literal::Kind::Compare) continue;
    bool lb = !l.cmp.lhs.is_variable() || key_vars.count(l.cmp.lhs.name);
    bool rb = !l.cmp.rhs.is_variable() || key_vars.count(l.cmp.rhs.name);
    if (l.cmp.op == CmpOp::Equal && (lb || rb)) {
      if (l.cmp.lhs.is_variable()) key_vars.insert(l.cmp.lhs.name);
      if (l.cmp.rhs.is_variable()) key_vars.insert(l.cmp.rhs.name);
    } else if (!lb || !rb) {
      throw ParseError("unbound key variable in comparison " + to_string(l.cmp) + where, line);
    }
  }
  for (const auto& l : b.post) {
    if (!l.is_atom()) throw ParseError("postconditions may not contain comparisons" + where, line);
    if (!th.is_fluent(l.atom.predicate))
      throw ParseError("post uses undeclared fluent " + l.atom.predicate + where, line);
    check_atom(l.atom);
  }
  auto syms = b.node_symbols();
  std::set<std::string> known(syms.begin(), syms.end());
  for (const auto& f : b.fresh)
    if (th.is_sentinel(f)) throw ParseError("fresh symbol cannot be a sentinel: " + f, line);
  for (const auto& l : b.post)
    for (const auto& t : l.atom.args)
      if (t.is_constant() && !t.sentinel && !label_constants().count(t.name) && !known.count(t.name))
        throw ParseError("post references undeclared node symbol " + t.name + where, line);
  if (b.steps.size() > kMaxBlockSteps)
    throw ParseError("block has more than " + std::to_string(kMaxBlockSteps) + " steps" + where, line);
  bool labelled = th.edge_arity() == 3;
  for (const auto& s : b.steps) {
    for (const auto* sym : {&s.from, &s.to}) {
      if (*sym == "nil" && sym == &s.to) continue;
      if (!known.count(*sym) && !th.is_sentinel(*sym))
        throw ParseError("step references undeclared node symbol " + *sym + where, line);
    }
    if (labelled && !label_constants().count(s.label))
      throw ParseError("step " + to_string(s) + " needs a left/right label" + where, line);
    if (!labelled && !s.label.empty())
      throw ParseError("step " + to_string(s) + " is labelled but edges are unlabelled" + where, line);
  }
}

LinkStep parse_step(Parser& p) {
  std::string prim = p.expect_ident();
  if (prim != "link") p.fail("only the link primitive is destructive, found " + prim);
  p.expect("(");
  LinkStep s;
  s.from = p.expect_ident();
  p.expect(",");
  s.to = p.expect_ident();
  if (p.is_punct(",")) {
    p.next();
    s.label = p.expect_ident();
  }
  p.expect(")");
  return s;
}

} // namespace

KnowledgeBase parse_knowledge(std::string_view text, const Theory& theory) {
  Parser p(text);
  KnowledgeBase kb;
  kb.theory = theory;
  auto op_named = [&](const std::string& name) -> OperationSpec& {
    for (auto& op : kb.operations)
      if (op.name == name) return op;
    kb.operations.push_back({name, {}, std::nullopt});
    return kb.operations.back();
  };
  while (!p.at_end()) {
    const Token& t = p.peek();
    int line = t.line;
    if (t.kind != Tok::Directive) p.fail("expected #op or #traverse");
    std::string d = p.next().text;
    if (d == "op") {
      std::string name = p.expect_ident();
      OperationSpec& op = op_named(name);
      if (p.is_punct(".")) {
        p.next();
        continue;
      }
      BlockSpec b;
      b.id = p.expect_ident();
      if (op.block(b.id)) p.fail("duplicate block " + b.id + " for " + name);
      bool fresh_given = false;
      while (!p.is_punct(".")) {
        std::string section = p.expect_ident();
        if (section == "fresh") {
          p.expect("[");
          while (!p.is_punct("]")) {
            b.fresh.push_back(p.expect_ident());
            if (p.is_punct(",")) p.next();
          }
          p.expect("]");
          fresh_given = true;
        } else if (section == "pre") {
          b.pre = p.parse_bracket_literals();
        } else if (section == "post") {
          b.post = p.parse_bracket_literals();
        } else if (section == "steps") {
          p.expect("[");
          if (!p.is_punct("]")) {
            b.steps.push_back(parse_step(p));
            while (p.is_punct(",")) {
              p.next();
              b.steps.push_back(parse_step(p));
            }
          }
          p.expect("]");
        } else {
          p.fail("unknown #op section " + section);
        }
      }
      p.expect(".");
      if (!fresh_given)
        for (const auto& s : b.steps)
          if ((s.from == "tau" || s.to == "tau") && !b.is_fresh("tau")) b.fresh.push_back("tau");
      for (auto& l : b.pre) mark_sentinels(l, theory);
      for (auto& l : b.post) mark_sentinels(l, theory);
      validate_block(theory, op, b, line);
      op.blocks.push_back(std::move(b));
    } else if (d == "traverse") {
      std::string name = p.expect_ident();
      OperationSpec* op = nullptr;
      for (auto& o : kb.operations)
        if (o.name == name) op = &o;
      if (!op) throw ParseError("unknown operation reference " + name, line);
      TraversalSpec tr;
      while (!p.is_punct(".")) {
        std::string kw = p.expect_ident();
        if (kw != "descend") p.fail("expected 'descend'");
        auto body = p.parse_bracket_literals();
        int derefs = 0;
        for (auto& l : body) {
          mark_sentinels(l, theory);
          if (!l.is_atom()) continue;
          auto ar = theory.arity_of(l.atom.predicate);
          if (!ar || *ar != l.atom.arity())
            throw ParseError("undeclared predicate in traversal: " + l.atom.predicate, line);
          if (l.atom.predicate == "edge") {
            ++derefs;
            const auto& a = l.atom.args;
            if (!(a[0].is_variable() && a[0].name == "X" && a[1].is_variable() && a[1].name == "Y"))
              throw ParseError("traversal dereference must be edge(X,Y...)", line);
          }
        }
        if (derefs != 1) throw ParseError("each descend clause needs exactly one dereference", line);
        tr.descend.push_back(std::move(body));
      }
      p.expect(".");
      if (tr.descend.empty()) throw ParseError("traversal without descend clauses", line);
      op->traversal = std::move(tr);
    } else {
      throw ParseError("unknown knowledge directive #" + d, line);
    }
  }
  return kb;
}

std::string render_literals(const std::vector<Literal>& lits) {
  std::string s = "[";
  for (std::size_t i = 0; i < lits.size(); ++i) s += (i ? ", " : "") + to_string(lits[i]);
  return s + "]";
}

std::string render_theory(const Theory& th) {
  std::ostringstream os;
  auto decls = [&](const char* kw, const std::map<std::string, std::size_t>& m) {
    os << "#" << kw;
    for (const auto& [n, a] : m) os << " " << n << "/" << a;
    os << ".\n";
  };
  decls("fluent", th.fluents);
  decls("static", th.statics);
  os << "#sentinel";
  for (const auto& s : th.sentinels) os << " " << s.name << "=" << (s.max_key ? "max" : "min");
  os << ".\n#root " << th.root << ".\n#shape "
     << (th.shape == ShapeKind::Chain ? "chain" : th.shape == ShapeKind::Tree ? "tree" : "full_tree")
     << ".\n";
  for (const auto& r : th.rules) os << to_string(r) << "\n";
  return os.str();
}

std::string render_knowledge(const KnowledgeBase& kb) {
  std::ostringstream os;
  for (const auto& op : kb.operations) {
    if (op.blocks.empty()) os << "#op " << op.name << ".\n";
    for (const auto& b : op.blocks) {
      os << "#op " << op.name << " " << b.id << " fresh [";
      for (std::size_t i = 0; i < b.fresh.size(); ++i) os << (i ? ", " : "") << b.fresh[i];
      os << "] pre " << render_literals(b.pre) << " post " << render_literals(b.post) << " steps [";
      for (std::size_t i = 0; i < b.steps.size(); ++i) os << (i ? ", " : "") << to_string(b.steps[i]);
      os << "].\n";
    }
    if (op.traversal) {
      os << "#traverse " << op.name;
      for (const auto& d : op.traversal->descend) os << " descend " << render_literals(d);
      os << ".\n";
    }
  }
  return os.str();
}

Literal parse_literal(std::string_view text, const Theory& theory) {
  Parser p(text);
  Literal l = p.parse_literal();
  if (!p.at_end()) p.fail("trailing input after literal");
  mark_sentinels(l, theory);
  return l;
}

} // namespace cds
