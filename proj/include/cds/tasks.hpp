#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cds/engine.hpp"

namespace cds {

/// Default horizon: the block's step count plus two interference ticks.
int default_horizon(const BlockSpec& block);

/// Pre conjuncts subject to falsification: fluent atoms, positive or
/// negated. Static atoms and comparisons never change.
std::vector<Literal> fluent_conjuncts(const Theory& th, const BlockSpec& block);

// ---- Task 1 -------------------------------------------------------------

struct ConjunctVerdict {
  Literal literal;
  bool falsifiable = false;
  std::optional<Trajectory> witness;
  Binding binding; // binding under which the witness falsifies the literal
};

struct FalsifyReport {
  std::string op;
  std::string block;
  int horizon = 0;
  std::size_t bindings_checked = 0;
  std::vector<ConjunctVerdict> verdicts;
  std::vector<Literal> unfalsify;

  bool degenerate() const { return horizon == 0; }
};

/// A conjunct is unfalsifiable only if no unlocked interference trajectory
/// falsifies it under any of the given bindings.
FalsifyReport task1_unfalsify(const Context& ctx, const OperationSpec& op, const BlockSpec& block,
                              const HeapState& delta, const std::vector<Binding>& bindings, int horizon);

// ---- Task 2 -------------------------------------------------------------

struct AdequacyReport {
  std::string op;
  std::string block;
  std::vector<std::string> lock_symbols;
  LockSet locks; // ground locks of `binding`
  Binding binding;
  bool adequate = true;
  std::optional<Trajectory> witness;
  std::optional<Literal> falsified;
  GuardMode guard = GuardMode::Protocol;
  int horizon = 0;
};

/// Adequacy of explicit ground locks for one binding. Environment agents use
/// `heuristic` to pick their own windows.
AdequacyReport task2_adequacy(const Context& ctx, const OperationSpec& op, const BlockSpec& block,
                              const HeapState& delta, const Binding& binding, const LockSet& locks, GuardMode guard,
                              const LockHeuristic& heuristic, int horizon);

/// Locks chosen by the heuristic, checked under every binding; the first
/// inadequate binding is reported.
AdequacyReport task2_adequacy_all(const Context& ctx, const OperationSpec& op, const BlockSpec& block,
                                  const HeapState& delta, const std::vector<Binding>& bindings, GuardMode guard,
                                  const LockHeuristic& heuristic, int horizon);

// ---- Task 3 -------------------------------------------------------------

struct InvariantSpec {
  bool root = true;              // structural root at every tick
  bool reach_persistence = false; // nodes stay reachable unless post says otherwise
};

using ProgramOrder = std::vector<std::size_t>; // 1-based step indices

struct OrderRejection {
  ProgramOrder order;
  std::size_t executed = 0; // steps applied when the violation was seen
  HeapState state;
  std::string reason;
};

struct OrderReport {
  std::string op;
  std::string block;
  std::vector<ProgramOrder> valid; // original order first when valid
  std::vector<OrderRejection> rejected;
};

OrderReport task3_program_order(const Context& ctx, const OperationSpec& op, const BlockSpec& block,
                                const HeapState& delta, const Binding& binding, const InvariantSpec& inv = {});

/// Replays an order from δ; returns the rejection if it violates `inv` or
/// post, else nullopt.
std::optional<OrderRejection> check_order(const Context& ctx, const BlockSpec& block, const HeapState& delta,
                                          const Binding& binding, const ProgramOrder& order,
                                          const InvariantSpec& inv = {});

// ---- Task 4 -------------------------------------------------------------

struct KeyMoveWitness {
  std::string block; // block whose δ exposed the miss
  Trajectory trajectory;
  std::vector<std::string> cursor_path;
  std::string missed_node;
  std::int64_t key = 0;
};

struct KeyMoveReport {
  std::string op;
  bool keymove = false;
  std::optional<KeyMoveWitness> witness;
  int horizon = 0;
  std::size_t explored = 0;
};

/// Nodes visited by an instantaneous traversal for `key` on `s`.
std::vector<std::string> oracle_traversal(const Context& ctx, const HeapState& s, std::int64_t key);

/// Key movement on one start state with interference limited to `op`.
KeyMoveReport task4_keymove_on(const Context& ctx, const OperationSpec& op, const HeapState& start, int horizon,
                               bool reverse_actions = false);

/// Key movement for `op`, checked on each block's least instance.
/// `horizon` < 0 selects each block's default. Throws std::invalid_argument
/// when the knowledge base has no traversal.
KeyMoveReport task4_keymove(const Context& ctx, const OperationSpec& op, int depth, int horizon = -1,
                            bool reverse_actions = false);

} // namespace cds
