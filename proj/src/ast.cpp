#include "cds/ast.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace cds {

std::vector<Atom> Rule::positive_body() const {
  std::vector<Atom> out;
  for (const auto& l : body)
    if (l.kind == Literal::Kind::Positive) out.push_back(l.atom);
  return out;
}

std::vector<Atom> Rule::negative_body() const {
  std::vector<Atom> out;
  for (const auto& l : body)
    if (l.kind == Literal::Kind::Negative) out.push_back(l.atom);
  return out;
}

std::vector<Comparison> Rule::comparisons() const {
  std::vector<Comparison> out;
  for (const auto& l : body)
    if (l.kind == Literal::Kind::Compare) out.push_back(l.cmp);
  return out;
}

std::optional<std::size_t> Theory::arity_of(const std::string& p) const {
  if (auto it = fluents.find(p); it != fluents.end()) return it->second;
  if (auto it = statics.find(p); it != statics.end()) return it->second;
  return std::nullopt;
}

bool Theory::is_sentinel(const std::string& name) const {
  return sentinel(name).has_value();
}

std::optional<Sentinel> Theory::sentinel(const std::string& name) const {
  for (const auto& s : sentinels)
    if (s.name == name) return s;
  return std::nullopt;
}

std::size_t Theory::edge_arity() const {
  auto a = arity_of("edge");
  return a ? *a : 2;
}

std::string Theory::start_sentinel() const {
  if (sentinels.empty()) throw std::logic_error("theory has no sentinels");
  return sentinels.front().name;
}

std::vector<std::string> BlockSpec::node_symbols() const {
  std::vector<std::string> out;
  auto add = [&](const std::string& s) {
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  };
  for (const auto& l : pre) {
    if (!l.is_atom()) continue;
    for (const auto& t : l.atom.args)
      if (t.is_constant() && !t.sentinel && !label_constants().count(t.name)) add(t.name);
  }
  for (const auto& f : fresh) add(f);
  return out;
}

bool BlockSpec::is_fresh(const std::string& sym) const {
  return std::find(fresh.begin(), fresh.end(), sym) != fresh.end();
}

bool OperationSpec::destructive() const {
  return std::any_of(blocks.begin(), blocks.end(),
                     [](const BlockSpec& b) { return !b.steps.empty(); });
}

const BlockSpec* OperationSpec::block(const std::string& id) const {
  for (const auto& b : blocks)
    if (b.id == id) return &b;
  return nullptr;
}

const OperationSpec* KnowledgeBase::operation(const std::string& name) const {
  for (const auto& op : operations)
    if (op.name == name) return &op;
  return nullptr;
}

const TraversalSpec* KnowledgeBase::traversal() const {
  for (const auto& op : operations)
    if (op.traversal) return &*op.traversal;
  return nullptr;
}

std::vector<const OperationSpec*> KnowledgeBase::destructive_operations() const {
  std::vector<const OperationSpec*> out;
  for (const auto& op : operations)
    if (op.destructive()) out.push_back(&op);
  return out;
}

std::string to_string(const Term& t) {
  if (t.is_integer()) return std::to_string(t.value);
  return t.name;
}

std::string to_string(const Atom& a) {
  if (a.args.empty()) return a.predicate;
  std::string s = a.predicate + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) s += ",";
    s += to_string(a.args[i]);
  }
  return s + ")";
}

std::string to_string(const Comparison& c) {
  return to_string(c.lhs) + (c.op == CmpOp::Less ? " < " : " = ") + to_string(c.rhs);
}

std::string to_string(const Literal& l) {
  switch (l.kind) {
  case Literal::Kind::Positive: return to_string(l.atom);
  case Literal::Kind::Negative: return "not " + to_string(l.atom);
  case Literal::Kind::Compare: return to_string(l.cmp);
  }
  return {};
}

std::string to_string(const Rule& r) {
  std::ostringstream os;
  if (r.head) os << to_string(*r.head);
  if (!r.body.empty()) {
    os << (r.head ? " :- " : ":- ");
    for (std::size_t i = 0; i < r.body.size(); ++i) {
      if (i) os << ", ";
      os << to_string(r.body[i]);
    }
  }
  os << ".";
  return os.str();
}

std::string to_string(const LinkStep& s) {
  std::string out = "link(" + s.from + "," + s.to;
  if (!s.label.empty()) out += "," + s.label;
  return out + ")";
}

} // namespace cds
