#include "cds/datalog.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>

#include "cds/dsl.hpp"

namespace cds {

namespace {

class Interner {
public:
  static Interner& instance() {
    static Interner in;
    return in;
  }
  std::int64_t id(const std::string& s) {
    std::lock_guard lock(mu_);
    auto [it, inserted] = ids_.try_emplace(s, static_cast<std::int64_t>(names_.size()));
    if (inserted) names_.push_back(s);
    return it->second;
  }
  std::string name(std::int64_t id) {
    std::lock_guard lock(mu_);
    return names_.at(static_cast<std::size_t>(id));
  }

private:
  std::mutex mu_;
  std::unordered_map<std::string, std::int64_t> ids_;
  std::vector<std::string> names_;
};

} // namespace

Value Value::sym(const std::string& name) { return Value((Interner::instance().id(name) << 1) | 1); }

std::string Value::str() const { return is_symbol() ? Interner::instance().name(raw_ >> 1) : std::to_string(integer()); }

std::size_t TupleHash::operator()(const Tuple& t) const noexcept {
  std::size_t h = 0x9e3779b97f4a7c15ull;
  for (const auto& v : t) {
    std::size_t x = static_cast<std::size_t>(v.raw());
    h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

bool Relation::contains(const Tuple& t) const {
  if (slots_.empty()) return false;
  const std::size_t m = slots_.size() - 1;
  for (std::size_t h = TupleHash{}(t) & m;; h = (h + 1) & m) {
    std::int32_t r = slots_[h];
    if (r == 0) return false;
    if (rows_[static_cast<std::size_t>(r - 1)] == t) return true;
  }
}

void Relation::rehash(std::size_t cap) {
  slots_.assign(cap, 0);
  const std::size_t m = cap - 1;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    std::size_t h = TupleHash{}(rows_[i]) & m;
    while (slots_[h] != 0) h = (h + 1) & m;
    slots_[h] = static_cast<std::int32_t>(i + 1);
  }
}

bool Relation::insert(const Tuple& t) {
  if (contains(t)) return false;
  rows_.push_back(t);
  if (rows_.size() * 2 > slots_.size()) {
    rehash(std::max<std::size_t>(16, slots_.size() * 2));
  } else {
    const std::size_t m = slots_.size() - 1;
    std::size_t h = TupleHash{}(t) & m;
    while (slots_[h] != 0) h = (h + 1) & m;
    slots_[h] = static_cast<std::int32_t>(rows_.size());
  }
  return true;
}

bool Relation::matches(const Tuple& row, std::uint32_t mask, const Tuple& probe) {
  std::size_t j = 0;
  for (std::size_t i = 0; i < row.size(); ++i)
    if (mask & (1u << i))
      if (!(row[i] == probe[j++])) return false;
  return true;
}

Tuple Relation::project(const Tuple& row, std::uint32_t mask) {
  Tuple k;
  for (std::size_t i = 0; i < row.size(); ++i)
    if (mask & (1u << i)) k.push_back(row[i]);
  return k;
}

const Relation::Index& Relation::index_for(std::uint32_t mask) const {
  Index* idx = nullptr;
  for (auto& i : indexes_)
    if (i->mask == mask) idx = i.get();
  if (!idx) {
    idx = indexes_.emplace_back(std::make_unique<Index>()).get();
    idx->mask = mask;
  }
  if (idx->built == rows_.size()) return *idx;
  if (rows_.size() * 2 > idx->head.size()) {
    std::size_t cap = 16;
    while (cap < rows_.size() * 4) cap *= 2;
    idx->head.assign(cap, -1);
    idx->built = 0;
  }
  idx->next.resize(rows_.size());
  const std::size_t m = idx->head.size() - 1;
  for (; idx->built < rows_.size(); ++idx->built) {
    std::size_t h = TupleHash{}(project(rows_[idx->built], mask)) & m;
    idx->next[idx->built] = idx->head[h];
    idx->head[h] = static_cast<std::int32_t>(idx->built);
  }
  return *idx;
}

Model::Model(std::shared_ptr<const std::vector<std::string>> names, std::vector<Relation> rels)
    : names_(std::move(names)), rels_(std::move(rels)) {}

const Relation* Model::relation(const std::string& pred) const {
  if (!names_) return nullptr;
  for (std::size_t i = 0; i < names_->size(); ++i)
    if ((*names_)[i] == pred) return &rels_[i];
  return nullptr;
}

bool Model::contains(const std::string& pred, const Tuple& t) const {
  const Relation* r = relation(pred);
  return r && r->contains(t);
}

std::set<std::string> Model::atoms(bool derived_only) const {
  std::set<std::string> out;
  if (!names_) return out;
  for (std::size_t i = 0; i < names_->size(); ++i) {
    const std::string& p = (*names_)[i];
    if (derived_only && (p == "edge" || p == "key")) continue;
    for (const auto& row : rels_[i].rows()) {
      std::string s = p;
      if (!row.empty()) {
        s += "(";
        for (std::size_t j = 0; j < row.size(); ++j) s += (j ? "," : "") + row[j].str();
        s += ")";
      }
      out.insert(s);
    }
  }
  return out;
}

namespace {

using CTerm = Evaluator::CTerm;
using CLit = Evaluator::CLit;

struct VarTable {
  std::map<std::string, int> idx;
  int get(const std::string& n) {
    auto [it, ins] = idx.try_emplace(n, static_cast<int>(idx.size()));
    return it->second;
  }
};

struct VarList {
  std::array<int, kMaxArity> v{};
  std::size_t n = 0;
  const int* begin() const { return v.data(); }
  const int* end() const { return v.data() + n; }
};

VarList lit_vars(const CLit& l) {
  VarList out;
  auto add = [&](const CTerm& t) {
    if (t.var) out.v[out.n++] = t.idx;
  };
  if (l.kind == Literal::Kind::Compare) {
    add(l.lhs);
    add(l.rhs);
  } else {
    for (const auto& t : l.args) add(t);
  }
  return out;
}

// Greedy join order: most-bound positive atom next, filters as soon as
// their variables are bound. `first` (if >= 0) is forced to the front.
std::vector<int> make_plan(const std::vector<CLit>& body, int first, std::vector<char> bound) {
  std::vector<int> order;
  std::vector<char> placed(body.size(), 0);
  auto bind = [&](int i) {
    for (int v : lit_vars(body[i])) bound[v] = 1;
    placed[i] = 1;
    order.push_back(i);
  };
  if (first >= 0) bind(first);
  while (order.size() < body.size()) {
    bool progress = true;
    while (progress) {
      progress = false;
      for (std::size_t i = 0; i < body.size(); ++i) {
        if (placed[i] || body[i].kind == Literal::Kind::Positive) continue;
        const CLit& l = body[i];
        bool ready;
        if (l.kind == Literal::Kind::Compare && l.op == CmpOp::Equal) {
          ready = (!l.lhs.var || bound[l.lhs.idx]) || (!l.rhs.var || bound[l.rhs.idx]);
        } else {
          auto vs = lit_vars(l);
          ready = std::all_of(vs.begin(), vs.end(), [&](int v) { return bound[v] != 0; });
        }
        if (ready) {
          bind(static_cast<int>(i));
          progress = true;
        }
      }
    }
    int best = -1, best_score = -1;
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (placed[i] || body[i].kind != Literal::Kind::Positive) continue;
      int score = 0;
      for (const auto& t : body[i].args)
        if (!t.var || bound[t.idx]) ++score;
      if (score > best_score) {
        best = static_cast<int>(i);
        best_score = score;
      }
    }
    if (best < 0) {
      if (order.size() < body.size()) throw std::invalid_argument("unsafe query: unbound variables in filters");
      break;
    }
    bind(best);
  }
  return order;
}

bool less_values(const Value& a, const Value& b) { return !a.is_symbol() && !b.is_symbol() && a.integer() < b.integer(); }

struct Env {
  std::vector<Value> val;
  std::vector<char> bound;
};

Value term_value(const CTerm& t, const Env& env) { return t.var ? env.val[t.idx] : t.c; }

// Runs the join over `plan`, calling `emit` for every complete assignment.
// When `delta` is set, the first plan step iterates over it instead of the
// full relation.
template <class Emit>
void join(const std::vector<CLit>& body, const std::vector<int>& plan, std::size_t pos, Env& env,
          const std::vector<Relation>& rels, const Relation* delta, Emit&& emit) {
  if (pos == plan.size()) {
    emit(env);
    return;
  }
  const CLit& l = body[plan[pos]];
  switch (l.kind) {
  case Literal::Kind::Compare: {
    if (l.op == CmpOp::Equal) {
      bool lb = !l.lhs.var || env.bound[l.lhs.idx];
      bool rb = !l.rhs.var || env.bound[l.rhs.idx];
      if (lb && rb) {
        if (term_value(l.lhs, env) == term_value(l.rhs, env))
          join(body, plan, pos + 1, env, rels, delta, emit);
        return;
      }
      const CTerm& free = lb ? l.rhs : l.lhs;
      env.val[free.idx] = term_value(lb ? l.lhs : l.rhs, env);
      env.bound[free.idx] = 1;
      join(body, plan, pos + 1, env, rels, delta, emit);
      env.bound[free.idx] = 0;
      return;
    }
    if (less_values(term_value(l.lhs, env), term_value(l.rhs, env)))
      join(body, plan, pos + 1, env, rels, delta, emit);
    return;
  }
  case Literal::Kind::Negative: {
    Tuple t;
    for (const auto& a : l.args) t.push_back(term_value(a, env));
    if (!rels[l.pred].contains(t)) join(body, plan, pos + 1, env, rels, delta, emit);
    return;
  }
  case Literal::Kind::Positive: {
    const Relation& rel = (pos == 0 && delta) ? *delta : rels[l.pred];
    std::uint32_t mask = 0;
    Tuple probe;
    for (std::size_t i = 0; i < l.args.size(); ++i) {
      const CTerm& a = l.args[i];
      if (!a.var || env.bound[a.idx]) {
        mask |= 1u << i;
        probe.push_back(term_value(a, env));
      }
    }
    auto try_row = [&](const Tuple& row) {
      std::array<int, kMaxArity> newly{};
      std::size_t nnew = 0;
      bool ok = true;
      for (std::size_t i = 0; i < l.args.size() && ok; ++i) {
        const CTerm& a = l.args[i];
        if (!a.var) {
          ok = a.c == row[i];
        } else if (env.bound[a.idx]) {
          ok = env.val[a.idx] == row[i];
        } else {
          env.val[a.idx] = row[i];
          env.bound[a.idx] = 1;
          newly[nnew++] = a.idx;
        }
      }
      if (ok) join(body, plan, pos + 1, env, rels, delta, emit);
      for (std::size_t i = 0; i < nnew; ++i) env.bound[newly[i]] = 0;
    };
    if (mask == 0 || (pos == 0 && delta)) {
      for (const auto& row : rel.rows()) try_row(row);
    } else {
      rel.lookup(mask, probe, try_row);
    }
    return;
  }
  }
}

} // namespace

int Evaluator::pred_id(const std::string& name) const {
  auto it = ids_.find(name);
  if (it == ids_.end()) throw std::invalid_argument("unknown predicate " + name);
  return it->second;
}

Evaluator::Evaluator(const Theory& theory) : theory_(theory), names_(std::make_shared<std::vector<std::string>>()) {
  auto reg = [&](const std::string& n) {
    if (!ids_.count(n)) {
      ids_[n] = static_cast<int>(names_->size());
      names_->push_back(n);
    }
  };
  for (const auto* decls : {&theory.fluents, &theory.statics})
    for (const auto& [n, arity] : *decls) {
      if (arity > kMaxArity) throw std::invalid_argument("predicate " + n + " exceeds the maximum arity");
      reg(n);
    }
  edge_id_ = ids_.at("edge");
  key_id_ = ids_.at("key");

  auto layers = strata(theory);
  std::map<std::string, std::size_t> layer_of;
  for (std::size_t i = 0; i < layers.size(); ++i)
    for (const auto& p : layers[i]) layer_of[p] = i;
  strata_.resize(layers.size());
  stratum_preds_.resize(layers.size());
  for (std::size_t i = 0; i < layers.size(); ++i)
    for (const auto& p : layers[i]) stratum_preds_[i].insert(ids_.at(p));

  for (const auto& r : theory.rules) {
    if (!r.head) continue; // constraints are not part of the least model
    VarTable vt;
    auto cterm = [&](const Term& t) {
      CTerm c;
      if (t.is_variable()) {
        c.var = true;
        c.idx = vt.get(t.name);
      } else if (t.is_integer()) {
        c.c = Value::num(t.value);
      } else {
        c.c = Value::sym(t.name);
      }
      return c;
    };
    CRule cr;
    cr.head = ids_.at(r.head->predicate);
    for (const auto& l : r.body) {
      CLit cl;
      cl.kind = l.kind;
      if (l.is_atom()) {
        cl.pred = ids_.at(l.atom.predicate);
        for (const auto& t : l.atom.args) cl.args.push_back(cterm(t));
      } else {
        cl.op = l.cmp.op;
        cl.lhs = cterm(l.cmp.lhs);
        cl.rhs = cterm(l.cmp.rhs);
      }
      cr.body.push_back(std::move(cl));
    }
    for (const auto& t : r.head->args) cr.head_args.push_back(cterm(t));
    cr.nvars = static_cast<int>(vt.idx.size());
    std::size_t layer = layer_of.at(r.head->predicate);
    std::vector<char> none(static_cast<std::size_t>(cr.nvars), 0);
    cr.plans.push_back(make_plan(cr.body, -1, none));
    for (std::size_t i = 0; i < cr.body.size(); ++i) {
      const CLit& l = cr.body[i];
      if (l.kind == Literal::Kind::Positive && stratum_preds_[layer].count(l.pred))
        cr.plans.push_back(make_plan(cr.body, static_cast<int>(i), none));
      else
        cr.plans.emplace_back();
    }
    strata_[layer].push_back(std::move(cr));
  }
}

Model Evaluator::evaluate(const HeapState& state) const {
  std::vector<Relation> rels(names_->size());
  bool labelled = theory_.edge_arity() == 3;
  for (const auto& [e, to] : state.succ) {
    Tuple t{Value::sym(e.first), Value::sym(to)};
    if (labelled) {
      if (e.second == kNextLabel) continue;
      t.push_back(Value::sym(e.second));
    } else if (e.second != kNextLabel) {
      continue;
    }
    rels[edge_id_].insert(std::move(t));
  }
  for (const auto& [n, k] : state.keys) rels[key_id_].insert({Value::sym(n), Value::num(k)});

  for (std::size_t s = 0; s < strata_.size(); ++s) {
    const auto& rules = strata_[s];
    const auto& preds = stratum_preds_[s];
    const std::size_t np = names_->size();
    std::vector<Relation> delta(np);
    auto fire = [&](const CRule& r, const std::vector<int>& plan, const Relation* d, std::vector<Relation>& out) {
      Env env{std::vector<Value>(static_cast<std::size_t>(r.nvars)), std::vector<char>(static_cast<std::size_t>(r.nvars), 0)};
      join(r.body, plan, 0, env, rels, d, [&](const Env& e) {
        Tuple t;
        for (const auto& a : r.head_args) t.push_back(term_value(a, e));
        if (!rels[r.head].contains(t)) out[r.head].insert(t);
      });
    };
    for (const auto& r : rules) fire(r, r.plans[0], nullptr, delta);
    while (true) {
      bool any = false;
      for (int p : preds)
        for (const auto& t : delta[p].rows())
          if (rels[p].insert(t)) any = true;
      if (!any) break;
      std::vector<Relation> next(np);
      for (const auto& r : rules) {
        for (std::size_t i = 0; i < r.body.size(); ++i) {
          const CLit& l = r.body[i];
          if (l.kind != Literal::Kind::Positive || !preds.count(l.pred)) continue;
          if (delta[l.pred].size() == 0) continue;
          fire(r, r.plans[i + 1], &delta[l.pred], next);
        }
      }
      delta = std::move(next);
    }
  }
  return Model(names_, std::move(rels));
}

std::vector<Assignment> Evaluator::solve(const std::vector<Literal>& body, const Model& model, const Assignment& fixed,
                                         const std::function<bool(const Term&)>& is_var) const {
  VarTable vt;
  std::vector<CLit> cbody;
  auto cterm = [&](const Term& t) {
    CTerm c;
    if (t.is_variable() || is_var(t)) {
      c.var = true;
      c.idx = vt.get(t.name);
    } else if (t.is_integer()) {
      c.c = Value::num(t.value);
    } else {
      c.c = Value::sym(t.name);
    }
    return c;
  };
  for (const auto& l : body) {
    CLit cl;
    cl.kind = l.kind;
    if (l.is_atom()) {
      cl.pred = pred_id(l.atom.predicate);
      for (const auto& t : l.atom.args) cl.args.push_back(cterm(t));
    } else {
      cl.op = l.cmp.op;
      cl.lhs = cterm(l.cmp.lhs);
      cl.rhs = cterm(l.cmp.rhs);
    }
    cbody.push_back(std::move(cl));
  }
  std::size_t n = vt.idx.size();
  Env env{std::vector<Value>(n), std::vector<char>(n, 0)};
  for (const auto& [name, v] : fixed) {
    auto it = vt.idx.find(name);
    if (it == vt.idx.end()) continue;
    env.val[it->second] = v;
    env.bound[it->second] = 1;
  }
  auto plan = make_plan(cbody, -1, env.bound);
  std::vector<std::string> var_names(n);
  for (const auto& [name, i] : vt.idx) var_names[i] = name;
  std::vector<Assignment> out;
  join(cbody, plan, 0, env, model.rels_, nullptr, [&](const Env& e) {
    Assignment a;
    for (std::size_t i = 0; i < n; ++i) a[var_names[i]] = e.val[i];
    out.push_back(std::move(a));
  });
  return out;
}

Model derive(const Theory& theory, const HeapState& state) { return Evaluator(theory).evaluate(state); }

bool is_node_symbol(const Term& t, const Theory& theory) {
  return t.is_constant() && !theory.is_sentinel(t.name) && !label_constants().count(t.name) && t.name != "nil";
}

bool holds(const Literal& lit, const Model& model, const Binding& binding, const Theory& theory) {
  auto ground = [&](const Term& t) -> Value {
    if (t.is_integer()) return Value::num(t.value);
    if (t.is_variable()) {
      auto k = binding.key(t.name);
      if (!k) throw std::invalid_argument("unbound key variable " + t.name);
      return Value::num(*k);
    }
    if (is_node_symbol(t, theory)) {
      auto n = binding.node(t.name);
      if (!n) throw std::invalid_argument("unbound node symbol " + t.name);
      return Value::sym(*n);
    }
    return Value::sym(t.name);
  };
  if (lit.kind == Literal::Kind::Compare) {
    Value a = ground(lit.cmp.lhs), b = ground(lit.cmp.rhs);
    return lit.cmp.op == CmpOp::Equal ? a == b : less_values(a, b);
  }
  Tuple t;
  for (const auto& a : lit.atom.args) t.push_back(ground(a));
  bool present = model.contains(lit.atom.predicate, t);
  return lit.kind == Literal::Kind::Positive ? present : !present;
}

} // namespace cds
