#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cds/interference.hpp"

namespace cds {

/// Applies one knowledge link step under a binding; clock advances by one.
/// Throws std::invalid_argument for an unbound source or a chain's tail
/// sentinel as source.
HeapState apply_step(const Theory& th, const HeapState& s, const LinkStep& step, const Binding& b);

struct ActionEvent {
  enum class Kind { Interference, ProgramStep, Idle };
  enum class Actor { Environment, Self };

  Kind kind = Kind::Idle;
  Actor actor = Actor::Environment;
  std::optional<InterferenceAction> action;
  std::optional<GroundStep> step;

  static ActionEvent idle() { return {}; }
  static ActionEvent interference(InterferenceAction a) {
    return {Kind::Interference, Actor::Environment, std::move(a), std::nullopt};
  }
  static ActionEvent program_step(GroundStep s) { return {Kind::ProgramStep, Actor::Self, std::nullopt, std::move(s)}; }
  std::string describe() const;
};

/// states[i + 1] results from events[i] applied to states[i].
struct Trajectory {
  std::vector<HeapState> states;
  std::vector<ActionEvent> events;

  std::size_t length() const { return events.size(); }
};

/// Successor state of one event.
HeapState apply_event(const HeapState& s, const ActionEvent& e);

/// Visits every trajectory of length <= horizon, shortest first; each tick
/// is idle or one enabled action (idle first, then actions in model order).
/// Stops early when `visit` returns false.
void for_each_trajectory(const Context& ctx, const InterferenceModel& m, const HeapState& start, int horizon,
                         const LockSet& locks, const std::function<bool(const Trajectory&)>& visit);

/// First trajectory in enumeration order satisfying `cond`.
std::optional<Trajectory> satisfiable(const Context& ctx, const InterferenceModel& m, const HeapState& start,
                                      int horizon, const LockSet& locks,
                                      const std::function<bool(const Trajectory&)>& cond);

/// Whether a ground fluent literal is true at one tick and false at the
/// next, somewhere along the trajectory.
bool falsifies(const Context& ctx, const Trajectory& t, const Literal& lit, const Binding& b);

struct FalsifySearch {
  std::vector<std::optional<Trajectory>> witnesses; // one per literal
  std::size_t states = 0;                           // distinct states explored
};

/// Breadth-first search over distinct interference states (idle ticks are
/// irrelevant to falsification on consecutive ticks) for the shortest
/// trajectory falsifying each literal.
FalsifySearch falsify_search(const Context& ctx, const InterferenceModel& m, const HeapState& start, int horizon,
                             const LockSet& locks, const std::vector<Literal>& lits, const Binding& b);

} // namespace cds
