// cds: synthesize concurrent fragments from sequential knowledge.
//
// Exit codes: 0 success, 1 usage error, 2 some operation needs RCU,
// 3 unreadable or malformed input, 4 internal task failure (including no
// least instance within the depth bound), 5 oracle counterexample.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cds/codegen.hpp"
#include "cds/dsl.hpp"
#include "cds/oracle.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cds;

namespace {

enum Exit { kOk = 0, kUsage = 1, kRcu = 2, kInput = 3, kInternal = 4, kCounterexample = 5 };

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string builtin;
  std::string theory_path;
  std::string knowledge_path;
  std::vector<std::string> ops;
  int horizon = -1;
  std::string guard = "protocol";
  std::string heuristic_raw;
  std::vector<std::string> heuristic;
  bool heuristic_set = false;
  int depth = 4;
  int threads = 2;
  std::string out;
  std::string format = "text";
  std::vector<std::string> ir_files;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

struct Loaded {
  std::string source;
  KnowledgeBase kb;
};

Loaded load(const Options& o) {
  bool files = !o.theory_path.empty() || !o.knowledge_path.empty();
  if (o.builtin.empty() == !files || (files && (o.theory_path.empty() || o.knowledge_path.empty())))
    throw InputError("give either --builtin NAME or both --theory and --knowledge");
  if (!o.builtin.empty()) {
    try {
      return {o.builtin, builtin_bundle(o.builtin).knowledge};
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
  try {
    Theory th = parse_theory(read_file(o.theory_path));
    return {o.knowledge_path, parse_knowledge(read_file(o.knowledge_path), th)};
  } catch (const ParseError& e) {
    throw InputError(std::string("parse error: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("invalid input: ") + e.what());
  }
}

SynthesisConfig config_of(const Options& o) {
  SynthesisConfig c;
  c.horizon = o.horizon;
  c.depth = o.depth;
  try {
    c.guard = parse_guard_mode(o.guard);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  if (o.heuristic_set) c.heuristic.symbols = o.heuristic;
  c.ops = o.ops;
  return c;
}

std::unique_ptr<Context> context_of(const Loaded& in) {
  try {
    return std::make_unique<Context>(in.kb);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

void check_ops(const Context& ctx, const std::vector<std::string>& ops) {
  for (const auto& n : ops)
    if (!ctx.kb().operation(n)) throw InputError("unknown operation " + n);
}

std::string list(const std::vector<std::string>& xs) {
  std::string s = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + xs[i];
  return s + "]";
}

std::string list(const std::vector<Literal>& ls) {
  std::vector<std::string> xs;
  for (const auto& l : ls) xs.push_back(to_string(l));
  return list(xs);
}

std::string order_text(const ProgramOrder& o) {
  std::string s = "<";
  for (std::size_t i = 0; i < o.size(); ++i) s += (i ? "," : "") + std::to_string(o[i]);
  return s + ">";
}

std::string tasks_text(const SynthesisReport& r) {
  std::string s;
  for (const auto& o : r.ops) {
    s += "op " + o.op + ": " + to_string(o.outcome);
    if (o.rcu) s += " (" + to_string(o.rcu->cause) + ")";
    s += "\n";
    for (const auto& b : o.blocks) {
      s += "  block " + b.block + " on " + b.delta.state.to_facts() + "\n";
      if (b.task1) {
        std::vector<Literal> fals;
        for (const auto& v : b.task1->verdicts)
          if (v.falsifiable) fals.push_back(v.literal);
        s += "    task1 horizon " + std::to_string(b.task1->horizon) + (b.task1->degenerate() ? " (degenerate)" : "") +
             " unfalsify " + list(b.task1->unfalsify) + " falsifiable " + list(fals) + "\n";
      }
      if (b.task3) {
        std::vector<std::string> orders;
        for (const auto& x : b.task3->valid) orders.push_back(order_text(x));
        s += "    task3 valid " + list(orders) + ", " + std::to_string(b.task3->rejected.size()) + " rejected\n";
      }
      if (b.task2) {
        s += "    task2 locks " + list(b.task2->lock_symbols) + " " + to_string(b.task2->guard) + ": " +
             (b.task2->adequate ? "adequate" : "inadequate");
        if (b.task2->falsified) s += ", falsifies " + to_string(*b.task2->falsified);
        s += "\n";
      }
    }
    if (o.task4) {
      s += "  task4 keymove " + std::string(o.task4->keymove ? "true" : "false");
      if (o.task4->witness)
        s += ", misses " + o.task4->witness->missed_node + " (key " + std::to_string(o.task4->witness->key) +
             ") in block " + o.task4->witness->block;
      s += "\n";
    }
  }
  return s;
}

int cmd_synth(const Options& o) {
  Loaded in = load(o);
  auto ctx = context_of(in);
  check_ops(*ctx, o.ops);
  SynthesisReport r = synthesize(*ctx, config_of(o), in.source);
  json report = render_report(r);
  if (!o.out.empty()) {
    fs::path dir(o.out);
    for (const auto& op : r.ops) {
      if (!op.ir) continue;
      write_file(dir / (op.op + ".ir.json"), to_json(*op.ir).dump(2) + "\n");
      write_file(dir / (op.op + ".txt"), render_text(*op.ir));
    }
    write_file(dir / "report.json", report.dump(2) + "\n");
  }
  if (o.format == "structured") {
    std::cout << report.dump(2) << "\n";
  } else {
    std::cout << "outcomes " << outcome_row(r).dump() << "\n";
    for (const auto& op : r.ops) {
      if (op.ir) std::cout << render_text(*op.ir);
      if (op.rcu) std::cout << "# " << op.op << " needs RCU: " << to_string(op.rcu->cause) << "\n";
    }
  }
  return r.any_rcu() ? kRcu : kOk;
}

int cmd_tasks(const Options& o) {
  Loaded in = load(o);
  auto ctx = context_of(in);
  check_ops(*ctx, o.ops);
  SynthesisConfig cfg = config_of(o);
  cfg.all_tasks = true;
  SynthesisReport r = synthesize(*ctx, cfg, in.source);
  json report = render_report(r);
  for (auto& op : report["ops"]) {
    op.erase("ir");
    op.erase("text");
  }
  if (!o.out.empty()) write_file(fs::path(o.out) / "tasks.json", report.dump(2) + "\n");
  if (o.format == "structured")
    std::cout << report.dump(2) << "\n";
  else
    std::cout << tasks_text(r);
  return kOk;
}

int cmd_delta(const Options& o) {
  Loaded in = load(o);
  auto ctx = context_of(in);
  Delta d = least_delta(*ctx, o.depth);
  if (o.format == "structured") {
    json b = json::object();
    for (const auto& [op, ob] : d.bindings) b[op] = json{{"block", ob.block}, {"binding", to_json(ob.binding)}};
    std::cout << json{{"facts", d.state.to_facts()}, {"depth", d.depth}, {"index", d.index}, {"bindings", b}}.dump(2)
              << "\n";
  } else {
    std::cout << d.state.to_facts() << "\n";
    for (const auto& [op, ob] : d.bindings) std::cout << "% " << op << "/" << ob.block << " " << ob.binding.to_string() << "\n";
  }
  return kOk;
}

int cmd_oracle(const Options& o) {
  Loaded in = load(o);
  auto ctx = context_of(in);
  std::vector<CodeIR> irs;
  for (const auto& f : o.ir_files) {
    try {
      irs.push_back(code_ir_from_json(json::parse(read_file(f)), ctx->theory()));
    } catch (const json::exception& e) {
      throw InputError(f + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw InputError(f + ": " + e.what());
    }
  }
  Verdict v;
  HeapState start;
  if (!irs.empty()) {
    start = least_delta(*ctx, o.depth).state;
    Oracle oracle(*ctx, default_threads(*ctx, irs, o.threads, start));
    v = oracle.explore(start);
  }
  json doc = to_json(v);
  doc["start"] = start.to_facts();
  if (!o.out.empty()) write_file(fs::path(o.out) / "verdict.json", doc.dump(2) + "\n");
  if (o.format == "structured") {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << (v.all_ok() ? "verdict ok" : "verdict violated") << " (" << v.states << " states, " << v.finals
              << " final)\n";
    if (v.counterexample) {
      std::cout << "property " << v.counterexample->property << ": " << v.counterexample->detail << "\n";
      for (const auto& e : v.counterexample->events) std::cout << "  " << e << "\n";
    }
  }
  if (v.budget_exceeded) std::cerr << "warning: state budget exceeded, coverage is partial\n";
  return v.all_ok() ? kOk : kCounterexample;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthesize concurrent code from sequential data-structure knowledge"};
  app.require_subcommand(1);
  Options o;

  auto add_input = [&](CLI::App* c) {
    c->add_option("--builtin", o.builtin, "Builtin bundle: linked_list, external_bst or internal_bst");
    c->add_option("--theory", o.theory_path, "Theory DSL file");
    c->add_option("--knowledge", o.knowledge_path, "Knowledge DSL file");
    c->add_option("--depth", o.depth, "Depth bound for the least instance")->check(CLI::NonNegativeNumber);
    c->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "structured"}));
    c->add_option("--out", o.out, "Directory for written artifacts");
  };
  auto add_tasks = [&](CLI::App* c) {
    c->add_option("--op", o.ops, "Operations to process")->delimiter(',');
    c->add_option("--horizon", o.horizon, "Interference horizon (default: steps + 2)")->check(CLI::NonNegativeNumber);
    c->add_option("--guard", o.guard, "Lock guard semantics")->check(CLI::IsMember({"protocol", "literal"}));
    c->add_option("--heuristic", o.heuristic_raw, "Explicit lock symbols, comma separated; empty for no locks")
        ->expected(0, 1);
  };

  auto* synth = app.add_subcommand("synth", "Run all tasks and generate code");
  add_input(synth);
  add_tasks(synth);
  auto* tasks = app.add_subcommand("tasks", "Run the four reasoning tasks only");
  add_input(tasks);
  add_tasks(tasks);
  auto* delta = app.add_subcommand("delta", "Print the least instance");
  add_input(delta);
  auto* oracle = app.add_subcommand("oracle", "Explore all interleavings of synthesized code");
  add_input(oracle);
  oracle->add_option("--threads", o.threads, "Thread count")->check(CLI::NonNegativeNumber);
  oracle->add_option("ir", o.ir_files, "Code IR files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  for (auto* c : {synth, tasks})
    if (c->parsed() && c->count("--heuristic")) o.heuristic_set = true;
  std::stringstream hs(o.heuristic_raw);
  for (std::string sym; std::getline(hs, sym, ',');)
    if (!sym.empty()) o.heuristic.push_back(sym);

  try {
    if (synth->parsed()) return cmd_synth(o);
    if (tasks->parsed()) return cmd_tasks(o);
    if (delta->parsed()) return cmd_delta(o);
    if (oracle->parsed()) return cmd_oracle(o);
  } catch (const InputError& e) {
    std::cerr << "cds: " << e.what() << "\n";
    return kInput;
  } catch (const DeltaError& e) {
    std::cerr << "cds: " << e.what() << "\n";
    return kInternal;
  } catch (const std::exception& e) {
    std::cerr << "cds: internal failure: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
