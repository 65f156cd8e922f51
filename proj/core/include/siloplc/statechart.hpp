#pragma once

// Flat run-to-completion state machines.
//
// A definition lists named states, an initial pseudo-state with ordered,
// guarded, eventless transitions, and ordinary transitions. Only transitions
// carry actions. When several transitions are enabled the first declared one
// wins. After a triggered transition fires, eventless transitions from the new
// state are chained until none is enabled.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace siloplc::statechart {

inline constexpr std::size_t kMaxEventlessChain = 64;

struct Event {
  std::string name;
  std::optional<long> payload;

  Event() = default;
  explicit Event(std::string n, std::optional<long> p = std::nullopt) : name(std::move(n)), payload(p) {
    if (name.empty()) throw std::invalid_argument("event name must not be empty");
  }

  // "fill" or "filled(3)"
  std::string label() const {
    return payload ? name + "(" + std::to_string(*payload) + ")" : name;
  }
};

template <typename Context>
struct Action {
  std::string name;
  std::function<void(Context&, const Event&)> run;
};

template <typename Context>
using Guard = std::function<bool(const Context&, const Event&)>;

template <typename Context>
struct InitialTransition {
  Guard<Context> guard; // empty = catch-all
  std::vector<Action<Context>> actions;
  std::string target;
};

template <typename Context>
struct Transition {
  std::string source;
  std::string trigger; // empty = eventless
  Guard<Context> guard; // empty = always enabled
  std::vector<Action<Context>> actions;
  std::string target;
};

enum class DefinitionErrorKind { EmptyMachine, DuplicateState, UnknownState, NoInitialFallback, ShadowedTransition };

inline const char* to_string(DefinitionErrorKind k) {
  switch (k) {
    case DefinitionErrorKind::EmptyMachine: return "EmptyMachine";
    case DefinitionErrorKind::DuplicateState: return "DuplicateState";
    case DefinitionErrorKind::UnknownState: return "UnknownState";
    case DefinitionErrorKind::NoInitialFallback: return "NoInitialFallback";
    case DefinitionErrorKind::ShadowedTransition: return "ShadowedTransition";
  }
  return "?";
}

struct DefinitionError {
  DefinitionErrorKind kind;
  std::string detail;
};

class InvalidDefinition : public std::invalid_argument {
 public:
  InvalidDefinition(std::string machine, std::vector<DefinitionError> errors)
      : std::invalid_argument(describe(machine, errors)), errors_(std::move(errors)) {}

  const std::vector<DefinitionError>& errors() const { return errors_; }

 private:
  static std::string describe(const std::string& machine, const std::vector<DefinitionError>& errors) {
    std::string msg = "invalid statechart '" + machine + "':";
    for (const auto& e : errors) msg += std::string(" ") + to_string(e.kind) + "(" + e.detail + ")";
    return msg;
  }

  std::vector<DefinitionError> errors_;
};

class LivelockDetected : public std::runtime_error {
 public:
  LivelockDetected(const std::string& machine, const std::string& state)
      : std::runtime_error("eventless transition chain in '" + machine + "' exceeded " +
                           std::to_string(kMaxEventlessChain) + " steps at state " + state) {}
};

template <typename Context>
struct StatechartDef {
  std::string name;
  std::vector<std::string> states;
  std::vector<InitialTransition<Context>> initial;
  std::vector<Transition<Context>> transitions;

  bool has_state(const std::string& s) const { return std::find(states.begin(), states.end(), s) != states.end(); }
};

// Reports every problem found; an empty result means the definition is usable.
template <typename Context>
std::vector<DefinitionError> validate(const StatechartDef<Context>& def) {
  std::vector<DefinitionError> errors;
  if (def.states.empty()) errors.push_back({DefinitionErrorKind::EmptyMachine, def.name});

  std::set<std::string> seen;
  for (const auto& s : def.states) {
    if (!seen.insert(s).second) errors.push_back({DefinitionErrorKind::DuplicateState, s});
  }

  bool fallback = false;
  for (const auto& it : def.initial) {
    if (!def.has_state(it.target)) errors.push_back({DefinitionErrorKind::UnknownState, "initial -> " + it.target});
    if (!it.guard) fallback = true;
  }
  if (!fallback) errors.push_back({DefinitionErrorKind::NoInitialFallback, def.name});

  for (std::size_t i = 0; i < def.transitions.size(); ++i) {
    const auto& t = def.transitions[i];
    if (!def.has_state(t.source)) errors.push_back({DefinitionErrorKind::UnknownState, t.source});
    if (!def.has_state(t.target)) errors.push_back({DefinitionErrorKind::UnknownState, t.target});
    // An unguarded transition makes every later one on the same (source,
    // trigger) pair unreachable.
    for (std::size_t j = 0; j < i; ++j) {
      const auto& earlier = def.transitions[j];
      if (earlier.source == t.source && earlier.trigger == t.trigger && !earlier.guard) {
        errors.push_back({DefinitionErrorKind::ShadowedTransition,
                          t.source + " --" + (t.trigger.empty() ? std::string("<eventless>") : t.trigger) + "--> " +
                              t.target});
        break;
      }
    }
  }
  return errors;
}

struct StateChange {
  std::string from;
  std::string to;
  friend bool operator==(const StateChange&, const StateChange&) = default;
};

struct DispatchResult {
  bool fired = false; // false means the event was ignored
  std::vector<std::string> actions;
  std::vector<StateChange> changes;
};

template <typename Context>
class MachineInstance {
 public:
  using Def = StatechartDef<Context>;

  // Validates `def`, then takes the first enabled initial transition.
  MachineInstance(std::shared_ptr<const Def> def, Context context)
      : def_(std::move(def)), context_(std::move(context)) {
    if (auto errors = validate(*def_); !errors.empty()) throw InvalidDefinition(def_->name, std::move(errors));
    init_result_ = init();
  }

  const std::string& current() const { return current_; }
  const Context& context() const { return context_; }
  Context& context() { return context_; }
  const Def& definition() const { return *def_; }
  const DispatchResult& init_result() const { return init_result_; }

  // True when dispatch(event) would fire a transition. Guards must be pure.
  bool accepts(const Event& event) const {
    return std::any_of(def_->transitions.begin(), def_->transitions.end(), [&](const auto& t) {
      return t.source == current_ && t.trigger == event.name && (!t.guard || t.guard(context_, event));
    });
  }

  DispatchResult dispatch(const Event& event) {
    DispatchResult result;
    for (const auto& t : def_->transitions) {
      if (t.source != current_ || t.trigger != event.name) continue;
      if (t.guard && !t.guard(context_, event)) continue;
      fire(t.actions, t.target, event, result);
      complete(event, result);
      return result;
    }
    return result;
  }

 private:
  DispatchResult init() {
    DispatchResult result;
    const Event boot{"<init>"};
    for (const auto& it : def_->initial) {
      if (it.guard && !it.guard(context_, boot)) continue;
      result.fired = true;
      for (const auto& a : it.actions) {
        a.run(context_, boot);
        result.actions.push_back(a.name);
      }
      current_ = it.target;
      complete(boot, result);
      return result;
    }
    throw std::logic_error("validated machine has no enabled initial transition"); // unreachable
  }

  void fire(const std::vector<Action<Context>>& actions, const std::string& target, const Event& event,
            DispatchResult& result) {
    result.fired = true;
    for (const auto& a : actions) {
      a.run(context_, event);
      result.actions.push_back(a.name);
    }
    result.changes.push_back({current_, target});
    current_ = target;
  }

  void complete(const Event& event, DispatchResult& result) {
    for (std::size_t chain = 0;; ++chain) {
      const Transition<Context>* next = nullptr;
      for (const auto& t : def_->transitions) {
        if (t.source == current_ && t.trigger.empty() && (!t.guard || t.guard(context_, event))) {
          next = &t;
          break;
        }
      }
      if (!next) return;
      if (chain == kMaxEventlessChain) throw LivelockDetected(def_->name, current_);
      fire(next->actions, next->target, event, result);
    }
  }

  std::shared_ptr<const Def> def_;
  Context context_;
  std::string current_;
  DispatchResult init_result_;
};

} // namespace siloplc::statechart
