#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cds/tasks.hpp"

namespace cds {

inline constexpr int kSchemaVersion = 1;

enum class Outcome { Success, RCU, Unchanged };
enum class RcuCause { NoValidOrder, KeyMovement, InadequateLocks };

std::string to_string(Outcome o);
std::string to_string(RcuCause c);
Outcome parse_outcome(const std::string& s);
RcuCause parse_rcu_cause(const std::string& s);

/// Concurrent fragment of one block: lock, validate, ordered steps, unlock.
struct BlockCode {
  std::string block;
  std::vector<std::string> fresh;    // prepared before locking, thread-local until linked
  std::vector<std::string> locks;    // symbols, ascending key order on δ
  std::vector<Literal> validate;     // pre minus Unfalsify, comparisons kept
  ProgramOrder order;                // 1-based indices into the block's steps
  std::vector<LinkStep> steps;       // steps in execution order
  std::vector<std::string> unlocks;  // reverse of locks

  bool operator==(const BlockCode&) const = default;
};

struct CodeIR {
  int schema_version = kSchemaVersion;
  std::string op;
  Outcome outcome = Outcome::Unchanged;
  std::vector<BlockCode> blocks;           // empty unless Success
  bool traversal = false;                  // the sequential traversal is kept as is
  bool abort_on_validate_failure = true;
  std::optional<RcuCause> rcu;

  bool operator==(const CodeIR&) const = default;
};

struct RcuRecommendation {
  std::string op;
  RcuCause cause = RcuCause::NoValidOrder;
  std::string block; // deciding block; empty for key movement found op-wide
  std::vector<OrderRejection> rejected;   // NoValidOrder
  std::optional<KeyMoveReport> keymove;   // KeyMovement
  std::optional<AdequacyReport> adequacy; // InadequateLocks
};

struct SynthesisConfig {
  int horizon = -1; // < 0: each block's default
  int depth = 4;
  GuardMode guard = GuardMode::Protocol;
  LockHeuristic heuristic;
  InvariantSpec invariant;
  std::vector<std::string> ops; // empty: every operation
  bool all_tasks = false;       // run every task even after a gate trips
};

/// Task results of one block on its own least instance.
struct BlockTasks {
  std::string block;
  Delta delta;
  std::vector<Binding> bindings;
  int horizon = 0;
  std::optional<FalsifyReport> task1;
  std::optional<OrderReport> task3;
  std::optional<AdequacyReport> task2;
};

struct OpSynthesis {
  std::string op;
  Outcome outcome = Outcome::Unchanged;
  std::vector<BlockTasks> blocks;
  std::optional<KeyMoveReport> task4;
  std::optional<CodeIR> ir;
  std::optional<RcuRecommendation> rcu;
};

struct SynthesisReport {
  std::string source;
  SynthesisConfig config;
  std::optional<Delta> delta; // least instance for all operations
  std::vector<OpSynthesis> ops;

  bool any_rcu() const;
};

/// Gates in order: a block without a valid program order, then key
/// movement, then inadequate locks. Each failing gate yields RCU and later
/// gates are not consulted. Operations without blocks are Unchanged.
/// Throws DeltaError when a block has no instance within the depth bound.
OpSynthesis generate_concurrent_code(const Context& ctx, const OperationSpec& op, const SynthesisConfig& config);

SynthesisReport synthesize(const Context& ctx, const SynthesisConfig& config, std::string source = {});

/// Canonical text of an IR.
std::string render_text(const CodeIR& ir);
std::string render_step(const LinkStep& s);

nlohmann::json to_json(const Binding& b);
nlohmann::json to_json(const Trajectory& t);
nlohmann::json to_json(const CodeIR& ir);
/// Literals are parsed against `theory`. Throws std::invalid_argument on
/// malformed documents.
CodeIR code_ir_from_json(const nlohmann::json& j, const Theory& theory);

nlohmann::json render_report(const SynthesisReport& report);
/// Outcome matrix row: op name -> outcome.
nlohmann::json outcome_row(const SynthesisReport& report);

} // namespace cds
