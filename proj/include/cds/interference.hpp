#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cds/heap.hpp"
#include "cds/instance.hpp"

namespace cds {

/// protocol: an action is disabled when any node of its window is locked.
/// literal: each effect is disabled when its modified node is locked.
enum class GuardMode { Protocol, Literal };

std::string to_string(GuardMode g);
/// Throws std::invalid_argument for anything but "protocol" / "literal".
GuardMode parse_guard_mode(const std::string& s);

/// A link step with node ids; `label` is kNextLabel for chains.
struct GroundStep {
  std::string from;
  std::string to; // "nil" clears the successor
  std::string label;

  std::string to_string() const;
  bool operator==(const GroundStep&) const = default;
};

/// Throws std::invalid_argument when a symbol is unbound.
GroundStep ground_step(const LinkStep& step, const Binding& b, const Theory& th);

/// Lock-guess heuristic: the default window, or an explicit symbol list
/// that every agent applies to the symbols present in its own block.
struct LockHeuristic {
  std::optional<std::vector<std::string>> symbols;
};

/// Default window symbols: nodes modified by the steps, endpoints of pre
/// edges a step invalidates, and nodes made unreachable by post. Fresh
/// nodes are excluded.
std::vector<std::string> window_symbols(const BlockSpec& block);
std::vector<std::string> heuristic_symbols(const BlockSpec& block, const LockHeuristic& h);
LockSet window_heuristic(const BlockSpec& block, const Binding& b, const HeapState& s, const Theory& th,
                         const LockHeuristic& h = {});

struct ActionTemplate {
  std::string op;
  BlockSpec block;
};

struct InterferenceModel {
  std::vector<ActionTemplate> templates; // ordered by operation name, then block
  GuardMode guard = GuardMode::Protocol;
  LockHeuristic heuristic;
};

InterferenceModel build_interference(const KnowledgeBase& kb, GuardMode guard = GuardMode::Protocol,
                                     LockHeuristic heuristic = {});
/// Copy of the model keeping only the templates of one operation.
InterferenceModel restrict_to(const InterferenceModel& m, const std::string& op);

struct InterferenceAction {
  std::string op;
  std::string block;
  Binding binding;
  std::vector<GroundStep> effects;
  std::vector<bool> enabled;                    // per effect
  std::map<std::string, std::int64_t> fresh;    // fresh node id -> key
  LockSet window;

  std::string describe() const;
};

/// `model`, when given, must be the model of matching_state(ctx, s).
std::vector<InterferenceAction> enabled_actions(const Context& ctx, const InterferenceModel& m, const HeapState& s,
                                                const LockSet& locks, const Model* model = nullptr);

/// Applies the enabled effects atomically; clock advances by one. Throws
/// std::invalid_argument if no effect is enabled.
HeapState apply_action(const HeapState& s, const InterferenceAction& a);

/// Applies one ground link without touching the clock.
void apply_ground(HeapState& s, const GroundStep& g);

} // namespace cds
