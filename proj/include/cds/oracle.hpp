#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cds/codegen.hpp"

namespace cds {

/// One thread executing a synthesized fragment for a fixed argument key.
struct ThreadProgram {
  int id = 0;
  CodeIR ir;
  std::int64_t key = 0;
};

/// Per-thread execution state. Micro-steps: resolve (traversal picks the
/// window), one lock acquire, the whole validate, one link, one release.
struct ThreadState {
  enum class Phase { Resolve, Acquire, Validate, Link, Release, Done };
  Phase phase = Phase::Resolve;
  int block = -1; // index into the IR blocks
  Binding binding;
  std::vector<std::string> lock_nodes; // acquisition order
  std::vector<std::string> held;
  std::size_t next_step = 0;
  bool validated = false;
  bool aborted = false;
  bool no_window = false;

  bool committed() const { return validated && !aborted; }
  bool operator==(const ThreadState&) const = default;
};

struct OracleConfig {
  HeapState state;
  std::vector<ThreadState> threads;
};

using Schedule = std::vector<int>; // thread index per micro-step

struct CompletedOp {
  int thread = 0;
  std::string op;
  std::int64_t key = 0;
};

struct OracleTrace {
  std::vector<HeapState> states; // states[i + 1] follows events[i]
  std::vector<std::string> events;
  OracleConfig final;
  std::vector<CompletedOp> completed;
};

struct Counterexample {
  std::string property;
  std::string detail;
  Schedule schedule;
  std::vector<std::string> events;
  std::vector<HeapState> states;
};

struct Verdict {
  bool invariant_ok = true;
  bool mutual_exclusion_ok = true;
  bool linearizable = true;
  bool lemma1_ok = true;
  bool lemma2_ok = true;
  std::optional<Counterexample> counterexample;
  std::size_t states = 0;     // distinct configurations explored
  std::size_t finals = 0;     // distinct terminal configurations
  std::size_t deadlocks = 0;  // terminal configurations with blocked threads
  bool budget_exceeded = false;

  bool all_ok() const { return invariant_ok && mutual_exclusion_ok && linearizable && lemma1_ok && lemma2_ok; }
};

class Oracle {
public:
  Oracle(const Context& ctx, std::vector<ThreadProgram> programs);

  const std::vector<ThreadProgram>& programs() const { return programs_; }
  OracleConfig initial(const HeapState& start) const;
  /// Threads that may take their next micro-step.
  std::vector<int> runnable(const OracleConfig& c) const;
  /// Performs one micro-step of thread `t`; returns the event text. Throws
  /// std::invalid_argument if the thread is blocked or finished.
  std::string step(OracleConfig& c, int t) const;
  /// Micro-steps a thread can take at most.
  std::size_t max_steps(int t) const;
  std::vector<CompletedOp> completed(const OracleConfig& c) const;

  OracleTrace run_schedule(const HeapState& start, const Schedule& schedule) const;
  /// Exhaustive search over schedules with a memo of visited configurations.
  Verdict explore(const HeapState& start, std::size_t step_bound = 0, std::size_t state_budget = 2'000'000) const;

private:
  const BlockSpec& spec_of(int t, int block) const;
  const Context& ctx_;
  std::vector<ThreadProgram> programs_;
};

/// Node id a thread gives to a fresh symbol.
std::string thread_fresh_id(int thread, const std::string& sym);

/// Reachable structure as (key, label, key) triples; ids do not matter.
std::vector<std::string> key_edges(const Theory& th, const HeapState& s);

/// Some order of `ops`, applied sequentially from `start`, reaches a state
/// with the same reachable key structure as `final`.
bool linearization_exists(const Context& ctx, const HeapState& start, const HeapState& final,
                          const std::vector<CompletedOp>& ops);

/// Sequential application of one operation by key: first block (in the
/// operation's order) with a window; unchanged state when none applies.
HeapState apply_sequential(const Context& ctx, const HeapState& s, const CompletedOp& op);

/// k threads cycling over the IRs; each thread's key is the next distinct
/// argument key its operation accepts on `start`.
std::vector<ThreadProgram> default_threads(const Context& ctx, const std::vector<CodeIR>& irs, int k,
                                           const HeapState& start);

nlohmann::json to_json(const Verdict& v);

} // namespace cds
