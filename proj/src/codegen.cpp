#include "cds/codegen.hpp"

#include <algorithm>
#include <stdexcept>

#include "cds/dsl.hpp"

namespace cds {

using nlohmann::json;

std::string to_string(Outcome o) {
  switch (o) {
  case Outcome::Success: return "Success";
  case Outcome::RCU: return "RCU";
  case Outcome::Unchanged: return "Unchanged";
  }
  return {};
}

std::string to_string(RcuCause c) {
  switch (c) {
  case RcuCause::NoValidOrder: return "no-valid-order";
  case RcuCause::KeyMovement: return "key-movement";
  case RcuCause::InadequateLocks: return "inadequate-locks";
  }
  return {};
}

Outcome parse_outcome(const std::string& s) {
  for (auto o : {Outcome::Success, Outcome::RCU, Outcome::Unchanged})
    if (to_string(o) == s) return o;
  throw std::invalid_argument("unknown outcome: " + s);
}

RcuCause parse_rcu_cause(const std::string& s) {
  for (auto c : {RcuCause::NoValidOrder, RcuCause::KeyMovement, RcuCause::InadequateLocks})
    if (to_string(c) == s) return c;
  throw std::invalid_argument("unknown rcu cause: " + s);
}

bool SynthesisReport::any_rcu() const {
  return std::any_of(ops.begin(), ops.end(), [](const OpSynthesis& o) { return o.outcome == Outcome::RCU; });
}

namespace {

std::vector<std::string> ordered_locks(const Context& ctx, const BlockSpec& blk, const HeapState& s, const Binding& b,
                                       const LockHeuristic& h) {
  auto syms = heuristic_symbols(blk, h);
  auto key_of = [&](const std::string& sym) {
    auto n = resolve_node(b, sym, ctx.theory());
    return n && s.has_node(*n) ? s.key(*n) : kMaxKey;
  };
  std::stable_sort(syms.begin(), syms.end(), [&](const auto& a, const auto& c) { return key_of(a) < key_of(c); });
  return syms;
}

BlockCode assemble(const Context& ctx, const BlockTasks& bt, const BlockSpec& blk, const LockHeuristic& h) {
  BlockCode code;
  code.block = blk.id;
  code.fresh = blk.fresh;
  code.locks = ordered_locks(ctx, blk, bt.delta.state, bt.bindings.front(), h);
  code.unlocks.assign(code.locks.rbegin(), code.locks.rend());
  const auto& unf = bt.task1->unfalsify;
  for (const auto& l : blk.pre) {
    bool fluent = l.is_atom() && ctx.theory().is_fluent(l.atom.predicate);
    if (l.kind == Literal::Kind::Compare || (fluent && std::find(unf.begin(), unf.end(), l) == unf.end()))
      code.validate.push_back(l);
  }
  code.order = bt.task3->valid.front();
  for (std::size_t i : code.order) code.steps.push_back(blk.steps.at(i - 1));
  return code;
}

} // namespace

OpSynthesis generate_concurrent_code(const Context& ctx, const OperationSpec& op, const SynthesisConfig& cfg) {
  OpSynthesis out;
  out.op = op.name;
  if (!op.destructive()) {
    out.outcome = Outcome::Unchanged;
    CodeIR ir;
    ir.op = op.name;
    ir.traversal = op.traversal.has_value() || ctx.kb().traversal() != nullptr;
    out.ir = ir;
    return out;
  }
  for (const auto& blk : op.blocks) {
    BlockTasks bt;
    bt.block = blk.id;
    bt.delta = least_delta_for_block(ctx, op, blk, cfg.depth);
    bt.bindings = match_pre(ctx, blk, bt.delta.state);
    if (bt.bindings.empty()) throw DeltaError("no binding for block " + blk.id + " on its least instance");
    bt.horizon = cfg.horizon < 0 ? default_horizon(blk) : cfg.horizon;
    out.blocks.push_back(std::move(bt));
  }
  auto rcu = [&](RcuCause cause, std::string block) {
    out.outcome = Outcome::RCU;
    RcuRecommendation r;
    r.op = op.name;
    r.cause = cause;
    r.block = std::move(block);
    out.rcu = std::move(r);
  };

  // RCU outcomes still emit an IR so the recommendation travels with it.
  auto finish = [&]() -> OpSynthesis {
    CodeIR ir;
    ir.op = op.name;
    ir.traversal = ctx.kb().traversal() != nullptr;
    if (out.rcu) {
      ir.outcome = Outcome::RCU;
      ir.rcu = out.rcu->cause;
    } else {
      out.outcome = Outcome::Success;
      ir.outcome = Outcome::Success;
      for (std::size_t i = 0; i < op.blocks.size(); ++i)
        ir.blocks.push_back(assemble(ctx, out.blocks[i], op.blocks[i], cfg.heuristic));
    }
    out.ir = std::move(ir);
    return out;
  };

  // Task 1 feeds the validate set and is reported regardless of the gates.
  for (std::size_t i = 0; i < op.blocks.size(); ++i) {
    auto& bt = out.blocks[i];
    bt.task1 = task1_unfalsify(ctx, op, op.blocks[i], bt.delta.state, bt.bindings, bt.horizon);
  }

  for (std::size_t i = 0; i < op.blocks.size(); ++i) {
    auto& bt = out.blocks[i];
    bt.task3 = task3_program_order(ctx, op, op.blocks[i], bt.delta.state, bt.bindings.front(), cfg.invariant);
    if (bt.task3->valid.empty() && !out.rcu) {
      rcu(RcuCause::NoValidOrder, bt.block);
      out.rcu->rejected = bt.task3->rejected;
    }
  }
  if (out.rcu && !cfg.all_tasks) return finish();

  if (ctx.kb().traversal()) {
    out.task4 = task4_keymove(ctx, op, cfg.depth, cfg.horizon);
    if (out.task4->keymove && !out.rcu) {
      rcu(RcuCause::KeyMovement, out.task4->witness ? out.task4->witness->block : "");
      out.rcu->keymove = out.task4;
    }
  }
  if (out.rcu && !cfg.all_tasks) return finish();

  for (std::size_t i = 0; i < op.blocks.size(); ++i) {
    auto& bt = out.blocks[i];
    bt.task2 = task2_adequacy_all(ctx, op, op.blocks[i], bt.delta.state, bt.bindings, cfg.guard, cfg.heuristic,
                                  bt.horizon);
    if (!bt.task2->adequate && !out.rcu) {
      rcu(RcuCause::InadequateLocks, bt.block);
      out.rcu->adequacy = bt.task2;
    }
  }

  return finish();
}

SynthesisReport synthesize(const Context& ctx, const SynthesisConfig& cfg, std::string source) {
  SynthesisReport r;
  r.source = std::move(source);
  r.config = cfg;
  for (const auto& name : cfg.ops)
    if (!ctx.kb().operation(name)) throw std::invalid_argument("unknown operation " + name);
  if (!ctx.kb().destructive_operations().empty()) r.delta = least_delta(ctx, cfg.depth);
  for (const auto& op : ctx.kb().operations) {
    if (!cfg.ops.empty() && std::find(cfg.ops.begin(), cfg.ops.end(), op.name) == cfg.ops.end()) continue;
    r.ops.push_back(generate_concurrent_code(ctx, op, cfg));
  }
  return r;
}

// ---- text -------------------------------------------------------------------

std::string render_step(const LinkStep& s) {
  return s.from + "." + (s.label.empty() ? kNextLabel : s.label) + " := " + s.to + ";";
}

std::string render_text(const CodeIR& ir) {
  std::string out = "op " + ir.op + "\n";
  if (ir.outcome == Outcome::Unchanged) {
    out += ir.traversal ? "traversal unchanged\n" : "unchanged\n";
    return out;
  }
  if (ir.outcome == Outcome::RCU) {
    out += "rcu(" + (ir.rcu ? to_string(*ir.rcu) : std::string("unspecified")) + ")\n";
    return out;
  }
  if (!ir.abort_on_validate_failure) out += "no-abort\n";
  for (const auto& b : ir.blocks) {
    out += "block " + b.block;
    if (!b.fresh.empty()) {
      out += " fresh [";
      for (std::size_t i = 0; i < b.fresh.size(); ++i) out += (i ? ", " : "") + b.fresh[i];
      out += "]";
    }
    out += "\n";
    for (const auto& l : b.locks) out += "lock(" + l + ")\n";
    out += "if validate(";
    for (std::size_t i = 0; i < b.validate.size(); ++i) out += (i ? ", " : "") + to_string(b.validate[i]);
    out += ") {\n";
    for (const auto& s : b.steps) out += "  " + render_step(s) + "\n";
    out += "}\n";
    for (const auto& l : b.unlocks) out += "unlock(" + l + ")\n";
  }
  return out;
}

// ---- structured documents -----------------------------------------------------

json to_json(const Binding& b) {
  return json{{"nodes", b.nodes}, {"keys", b.keys}, {"fresh", b.fresh}};
}

json to_json(const Trajectory& t) {
  json events = json::array(), states = json::array();
  for (const auto& e : t.events) events.push_back(e.describe());
  for (const auto& s : t.states) states.push_back(s.to_facts());
  return json{{"events", events}, {"states", states}};
}

namespace {

json step_json(const LinkStep& s) { return json{{"from", s.from}, {"to", s.to}, {"label", s.label}}; }

json literals_json(const std::vector<Literal>& ls) {
  json a = json::array();
  for (const auto& l : ls) a.push_back(to_string(l));
  return a;
}

json order_json(const ProgramOrder& o) { return json(o); }

json task1_json(const FalsifyReport& r) {
  json verdicts = json::array();
  for (const auto& v : r.verdicts) {
    json j{{"literal", to_string(v.literal)}, {"falsifiable", v.falsifiable}};
    if (v.witness) {
      j["witness"] = to_json(*v.witness);
      j["binding"] = to_json(v.binding);
    }
    verdicts.push_back(std::move(j));
  }
  return json{{"horizon", r.horizon},
              {"degenerate", r.degenerate()},
              {"bindings_checked", r.bindings_checked},
              {"unfalsify", literals_json(r.unfalsify)},
              {"verdicts", verdicts}};
}

json rejection_json(const OrderRejection& r) {
  return json{{"order", order_json(r.order)}, {"executed", r.executed}, {"state", r.state.to_facts()},
              {"reason", r.reason}};
}

json task3_json(const OrderReport& r) {
  json valid = json::array(), rejected = json::array();
  for (const auto& o : r.valid) valid.push_back(order_json(o));
  for (const auto& x : r.rejected) rejected.push_back(rejection_json(x));
  return json{{"valid", valid}, {"rejected", rejected}};
}

json task2_json(const AdequacyReport& r) {
  json j{{"lock_symbols", r.lock_symbols},
         {"locks", r.locks.nodes},
         {"binding", to_json(r.binding)},
         {"guard", to_string(r.guard)},
         {"horizon", r.horizon},
         {"adequate", r.adequate}};
  if (r.falsified) j["falsified"] = to_string(*r.falsified);
  if (r.witness) j["witness"] = to_json(*r.witness);
  return j;
}

json task4_json(const KeyMoveReport& r) {
  json j{{"keymove", r.keymove}, {"horizon", r.horizon}, {"explored", r.explored}};
  if (r.witness) {
    const auto& w = *r.witness;
    j["witness"] = json{{"block", w.block},
                        {"missed_node", w.missed_node},
                        {"key", w.key},
                        {"cursor_path", w.cursor_path},
                        {"trajectory", to_json(w.trajectory)}};
  }
  return j;
}

json delta_json(const Delta& d) {
  json bindings = json::object();
  for (const auto& [op, ob] : d.bindings) bindings[op] = json{{"block", ob.block}, {"binding", to_json(ob.binding)}};
  return json{{"facts", d.state.to_facts()}, {"depth", d.depth}, {"index", d.index}, {"bindings", bindings}};
}

json rcu_json(const RcuRecommendation& r) {
  json j{{"op", r.op}, {"cause", to_string(r.cause)}, {"block", r.block}};
  switch (r.cause) {
  case RcuCause::NoValidOrder: {
    json a = json::array();
    for (const auto& x : r.rejected) a.push_back(rejection_json(x));
    j["witness"] = a;
    break;
  }
  case RcuCause::KeyMovement: j["witness"] = task4_json(*r.keymove); break;
  case RcuCause::InadequateLocks: j["witness"] = task2_json(*r.adequacy); break;
  }
  return j;
}

template <class T>
T field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw std::invalid_argument(std::string("missing field ") + name);
  try {
    return j.at(name).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad field ") + name + ": " + e.what());
  }
}

} // namespace

json to_json(const CodeIR& ir) {
  json blocks = json::array();
  for (const auto& b : ir.blocks) {
    json steps = json::array();
    for (const auto& s : b.steps) steps.push_back(step_json(s));
    blocks.push_back(json{{"block", b.block},
                          {"fresh", b.fresh},
                          {"locks", b.locks},
                          {"validate", literals_json(b.validate)},
                          {"order", order_json(b.order)},
                          {"steps", steps},
                          {"unlocks", b.unlocks}});
  }
  json j{{"schema_version", ir.schema_version},
         {"op", ir.op},
         {"outcome", to_string(ir.outcome)},
         {"traversal", ir.traversal},
         {"abort_on_validate_failure", ir.abort_on_validate_failure},
         {"blocks", blocks}};
  j["rcu"] = ir.rcu ? json(to_string(*ir.rcu)) : json(nullptr);
  return j;
}

CodeIR code_ir_from_json(const json& j, const Theory& theory) {
  CodeIR ir;
  ir.schema_version = field<int>(j, "schema_version");
  if (ir.schema_version != kSchemaVersion)
    throw std::invalid_argument("unsupported schema version " + std::to_string(ir.schema_version));
  ir.op = field<std::string>(j, "op");
  ir.outcome = parse_outcome(field<std::string>(j, "outcome"));
  ir.traversal = field<bool>(j, "traversal");
  ir.abort_on_validate_failure = field<bool>(j, "abort_on_validate_failure");
  if (j.contains("rcu") && !j.at("rcu").is_null()) ir.rcu = parse_rcu_cause(field<std::string>(j, "rcu"));
  for (const auto& jb : field<json>(j, "blocks")) {
    BlockCode b;
    b.block = field<std::string>(jb, "block");
    b.fresh = field<std::vector<std::string>>(jb, "fresh");
    b.locks = field<std::vector<std::string>>(jb, "locks");
    b.unlocks = field<std::vector<std::string>>(jb, "unlocks");
    b.order = field<ProgramOrder>(jb, "order");
    for (const auto& t : field<std::vector<std::string>>(jb, "validate")) {
      try {
        b.validate.push_back(parse_literal(t, theory));
      } catch (const ParseError& e) {
        throw std::invalid_argument("bad validate literal '" + t + "': " + e.what());
      }
    }
    for (const auto& js : field<json>(jb, "steps"))
      b.steps.push_back({field<std::string>(js, "from"), field<std::string>(js, "to"), field<std::string>(js, "label")});
    ir.blocks.push_back(std::move(b));
  }
  return ir;
}

json outcome_row(const SynthesisReport& r) {
  json row = json::object();
  for (const auto& o : r.ops) row[o.op] = to_string(o.outcome);
  return row;
}

json render_report(const SynthesisReport& r) {
  json ops = json::array();
  for (const auto& o : r.ops) {
    json blocks = json::array();
    for (const auto& b : o.blocks) {
      json jb{{"block", b.block}, {"delta", delta_json(b.delta)}, {"horizon", b.horizon}};
      json bs = json::array();
      for (const auto& x : b.bindings) bs.push_back(to_json(x));
      jb["bindings"] = bs;
      jb["task1"] = b.task1 ? task1_json(*b.task1) : json(nullptr);
      jb["task3"] = b.task3 ? task3_json(*b.task3) : json(nullptr);
      jb["task2"] = b.task2 ? task2_json(*b.task2) : json(nullptr);
      blocks.push_back(std::move(jb));
    }
    json jo{{"op", o.op}, {"outcome", to_string(o.outcome)}, {"blocks", blocks}};
    jo["task4"] = o.task4 ? task4_json(*o.task4) : json(nullptr);
    jo["rcu"] = o.rcu ? rcu_json(*o.rcu) : json(nullptr);
    jo["ir"] = o.ir ? to_json(*o.ir) : json(nullptr);
    jo["text"] = o.ir ? json(render_text(*o.ir)) : json(nullptr);
    ops.push_back(std::move(jo));
  }
  json cfg{{"horizon", r.config.horizon < 0 ? json("default") : json(r.config.horizon)},
           {"depth", r.config.depth},
           {"guard", to_string(r.config.guard)},
           {"heuristic", r.config.heuristic.symbols ? json(*r.config.heuristic.symbols) : json("window")},
           {"invariant", json{{"root", r.config.invariant.root},
                              {"reach_persistence", r.config.invariant.reach_persistence}}}};
  return json{{"schema_version", kSchemaVersion},
              {"source", r.source},
              {"config", cfg},
              {"delta", r.delta ? delta_json(*r.delta) : json(nullptr)},
              {"outcomes", outcome_row(r)},
              {"ops", ops}};
}

} // namespace cds
