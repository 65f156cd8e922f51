#include "siloplc/process.hpp"

#include <stdexcept>
#include <utility>

namespace siloplc::components {

using statechart::Action;
using statechart::Event;
using statechart::Guard;
using statechart::Transition;

namespace {

// Heating stops once the reading is within this margin of the target, so an
// accumulated rounding error cannot add a tick.
constexpr double kTemperatureTolerance = 1e-9;

using Act = Action<ProcessContext>;

struct Exit {
  std::string trigger; // empty = eventless
  Guard<ProcessContext> guard;
  std::vector<Act> actions;
};

struct Phase {
  std::string name;
  std::vector<Act> entry;
  std::vector<Exit> exits;
  PhaseCondition condition;
};

Guard<ProcessContext> from_silo(int silo) {
  return [silo](const ProcessContext&, const Event& e) { return e.payload && *e.payload == silo; };
}

Act unit_call(const char* op, int silo, void (Process2UnitControlerIf::*fn)()) {
  return {std::string(op) + "(" + silo_name(silo) + ")",
          [silo, fn](ProcessContext& c, const Event&) { (c.owner->unit(silo).*fn)(); }};
}

Act device_call(const char* op, int silo, void (SiloDriverIf::*fn)()) {
  return {std::string(op) + "(" + silo_name(silo) + ")",
          [silo, fn](ProcessContext& c, const Event&) { (c.owner->device(silo).*fn)(); }};
}

Act timer(std::uint64_t ticks) {
  return {"startTimer(" + std::to_string(ticks) + ")",
          [ticks](ProcessContext& c, const Event&) { c.owner->start_timer(ticks); }};
}

Act release(CommonResource* r) {
  return {"release(" + r->name() + ")", [r](ProcessContext& c, const Event&) { c.owner->release(*r); }};
}

template <typename... Vs>
std::vector<Act> concat(const std::vector<Act>& a, const Vs&... rest) {
  std::vector<Act> out = a;
  (out.insert(out.end(), rest.begin(), rest.end()), ...);
  return out;
}

std::vector<Phase> expand(const std::vector<PhaseStep>& steps, const ProcessWiring& w) {
  std::vector<Phase> phases;
  for (const auto& step : steps) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, phase::Fill>) {
            phases.push_back({"Fill" + silo_name(s.silo),
                              {unit_call("fill", s.silo, &Process2UnitControlerIf::fill)},
                              {{"filled", from_silo(s.silo), {}}},
                              {}});
          } else if constexpr (std::is_same_v<T, phase::Timed>) {
            phases.push_back({s.name, {timer(s.ticks)}, {{"timeout", {}, {}}}, {PhaseCondition::Kind::Timer}});
          } else if constexpr (std::is_same_v<T, phase::Heat>) {
            phases.push_back({"Heat" + silo_name(s.silo),
                              {device_call("startHeater", s.silo, &SiloDriverIf::start_heater)},
                              {{"tempReached", {}, {device_call("stopHeater", s.silo, &SiloDriverIf::stop_heater)}}},
                              {PhaseCondition::Kind::Temperature, s.silo, s.target}});
          } else if constexpr (std::is_same_v<T, phase::Transfer>) {
            phases.push_back({"AwaitPipe", {}, {{"granted", {}, {}}}, {PhaseCondition::Kind::Acquire, 0, 0.0, w.pipe}});
            phases.push_back(
                {"Transfer",
                 {unit_call("empty", s.src, &Process2UnitControlerIf::empty),
                  unit_call("fill", s.dst, &Process2UnitControlerIf::fill)},
                 {{"emptied", from_silo(s.src), {unit_call("markFull", s.dst, &Process2UnitControlerIf::mark_full)}},
                  {"filled", from_silo(s.dst), {unit_call("markEmpty", s.src, &Process2UnitControlerIf::mark_empty)}}},
                 {}});
            phases.push_back({"ReleasePipe", {}, {{"", {}, {release(w.pipe)}}}, {}});
          } else if constexpr (std::is_same_v<T, phase::Mix>) {
            phases.push_back(
                {"AwaitPower", {}, {{"granted", {}, {}}}, {PhaseCondition::Kind::Acquire, 0, 0.0, w.power}});
            phases.push_back({"Mix" + silo_name(s.silo),
                              {device_call("startMixer", s.silo, &SiloDriverIf::start_mixer), timer(s.ticks)},
                              {{"timeout", {}, {device_call("stopMixer", s.silo, &SiloDriverIf::stop_mixer)}}},
                              {PhaseCondition::Kind::Timer}});
            phases.push_back({"ReleasePower", {}, {{"", {}, {release(w.power)}}}, {}});
          } else if constexpr (std::is_same_v<T, phase::Empty>) {
            phases.push_back({"Empty" + silo_name(s.silo),
                              {unit_call("empty", s.silo, &Process2UnitControlerIf::empty)},
                              {{"emptied", from_silo(s.silo), {}}},
                              {}});
          }
        },
        step);
  }
  return phases;
}

} // namespace

const char* to_string(Recipe r) { return r == Recipe::GenLiqueurA ? "GenLiqueurA" : "GenLiqueurB"; }

RecipeConfig RecipeConfig::defaults(Recipe r) {
  if (r == Recipe::GenLiqueurA) return {Recipe::GenLiqueurA, 150, 50.0, 200, 1};
  return {Recipe::GenLiqueurB, 0, 60.0, 300, 1};
}

RecipeSilos silos_of(Recipe r) { return r == Recipe::GenLiqueurA ? RecipeSilos{1, 4} : RecipeSilos{2, 3}; }

std::vector<PhaseStep> phase_steps(const RecipeConfig& cfg) {
  if (cfg.recipe == Recipe::GenLiqueurA) {
    return {phase::Fill{1}, phase::Timed{"ProcessS1", cfg.process_ticks}, phase::Transfer{1, 4},
            phase::Heat{4, cfg.heat_target}, phase::Mix{4, cfg.mix_ticks}, phase::Empty{4}};
  }
  return {phase::Fill{2}, phase::Heat{2, cfg.heat_target}, phase::Transfer{2, 3}, phase::Mix{3, cfg.mix_ticks},
          phase::Empty{3}};
}

ProcessController::ProcessController(std::string id, RecipeConfig cfg, ProcessWiring wiring, runtime::ScanIo& io)
    : id_(std::move(id)), cfg_(cfg), wiring_(std::move(wiring)), io_(io) {
  if (!wiring_.pipe || !wiring_.power) throw std::invalid_argument("process '" + id_ + "' needs pipe and power");
  if (cfg_.cycles < 1) throw std::invalid_argument("cycles must be >= 1");

  const auto phases = expand(phase_steps(cfg_), wiring_);
  auto def = std::make_shared<ProcessMachineDef>();
  def->name = id_;
  def->states.push_back("Idle");
  for (const auto& p : phases) {
    def->states.push_back(p.name);
    conditions_[p.name] = p.condition;
  }
  def->states.push_back("Done");
  conditions_["Idle"] = {PhaseCondition::Kind::Start};
  conditions_["Done"] = {PhaseCondition::Kind::None};
  def->initial = {{{}, {}, "Idle"}};

  const Act batch{"countBatch", [](ProcessContext& c, const Event&) { c.owner->count_batch(); }};
  const int cycles = cfg_.cycles;
  const Guard<ProcessContext> more = [cycles](const ProcessContext& c, const Event&) {
    return c.owner->batches_completed() + 1 < cycles;
  };

  def->transitions.push_back({"Idle", "start", {}, phases.front().entry, phases.front().name});
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const auto& p = phases[i];
    const bool last = i + 1 == phases.size();
    for (const auto& e : p.exits) {
      if (!last) {
        const auto& next = phases[i + 1];
        def->transitions.push_back({p.name, e.trigger, e.guard, concat(e.actions, next.entry), next.name});
        continue;
      }
      Guard<ProcessContext> again = more;
      if (e.guard) {
        again = [g = e.guard, more](const ProcessContext& c, const Event& ev) { return g(c, ev) && more(c, ev); };
      }
      def->transitions.push_back(
          {p.name, e.trigger, again, concat(e.actions, std::vector<Act>{batch}, phases.front().entry),
           phases.front().name});
      def->transitions.push_back({p.name, e.trigger, e.guard, concat(e.actions, std::vector<Act>{batch}), "Done"});
    }
  }
  def_ = std::move(def);
  machine_ = std::make_unique<ProcessMachine>(def_, ProcessContext{this});
}

Process2UnitControlerIf& ProcessController::unit(int silo) const {
  auto it = wiring_.units.find(silo);
  if (it == wiring_.units.end() || !it->second) throw std::logic_error(id_ + " has no unit for " + silo_name(silo));
  return *it->second;
}

SiloDriverIf& ProcessController::device(int silo) const {
  auto it = wiring_.devices.find(silo);
  if (it == wiring_.devices.end() || !it->second) throw std::logic_error(id_ + " has no device for " + silo_name(silo));
  return *it->second;
}

void ProcessController::release(CommonResource& r) {
  r.release(id_);
  io_.emit(r.name(), RecordKind::Res, "Released " + r.name() + " " + id_);
}

std::optional<Event> ProcessController::condition_event(std::string& note) {
  const auto& cond = conditions_.at(machine_->current());
  switch (cond.kind) {
    case PhaseCondition::Kind::None: return std::nullopt;
    case PhaseCondition::Kind::Start: return Event{"start"};
    case PhaseCondition::Kind::Timer:
      if (io_.tick() >= deadline_) return Event{"timeout"};
      return std::nullopt;
    case PhaseCondition::Kind::Temperature: {
      const auto t = device(cond.silo).read_sensors().temperature;
      if (!t || *t < cond.target - kTemperatureTolerance) return std::nullopt;
      note = "T=" + format_decimal(*t);
      return Event{"tempReached"};
    }
    case PhaseCondition::Kind::Acquire: {
      const auto r = cond.resource->try_acquire(id_);
      io_.emit(cond.resource->name(), RecordKind::Res,
               std::string(to_string(r)) + " " + cond.resource->name() + " " + id_);
      if (r == AcquireResult::Granted) return Event{"granted"};
      return std::nullopt;
    }
  }
  return std::nullopt;
}

void ProcessController::execute(runtime::ScanIo& io) {
  while (!notifications_.empty()) {
    auto ev = std::move(notifications_.front());
    notifications_.pop_front();
    traced_dispatch(*machine_, ev, io, id_);
  }
  for (std::size_t n = 0;; ++n) {
    std::string note;
    auto ev = condition_event(note);
    if (!ev) return;
    if (n == statechart::kMaxEventlessChain) throw statechart::LivelockDetected(id_, phase());
    traced_dispatch(*machine_, *ev, io, id_, note);
  }
}

} // namespace siloplc::components
