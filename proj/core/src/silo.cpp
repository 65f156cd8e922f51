#include "siloplc/silo.hpp"

#include <array>
#include <utility>

namespace siloplc::components {

using statechart::Action;
using statechart::Event;

namespace {

constexpr std::array<std::pair<SiloStatus, const char*>, 4> kStatusNames{{
    {SiloStatus::Empty, "Empty"},
    {SiloStatus::Filling, "Filling"},
    {SiloStatus::Full, "Full"},
    {SiloStatus::Emptying, "Emptying"},
}};

Action<SiloContext> driver_action(const char* name, void (SiloDriverIf::*fn)()) {
  return {name, [fn](SiloContext& c, const Event&) { (c.driver->*fn)(); }};
}

Action<SiloContext> notify_filled() {
  return {"filled", [](SiloContext& c, const Event&) {
            if (c.process) c.process->filled(c.driver->silo_id());
          }};
}

Action<SiloContext> notify_emptied() {
  return {"emptied", [](SiloContext& c, const Event&) {
            if (c.process) c.process->emptied(c.driver->silo_id());
          }};
}

} // namespace

const char* to_string(SiloStatus s) {
  for (const auto& [status, name] : kStatusNames) {
    if (status == s) return name;
  }
  return "?";
}

std::optional<SiloStatus> parse_silo_status(const std::string& s) {
  for (const auto& [status, name] : kStatusNames) {
    if (s == name) return status;
  }
  return std::nullopt;
}

std::string silo_name(int silo_id) { return "S" + std::to_string(silo_id); }

SiloDriver::SiloDriver(int silo_id, runtime::ScanIo& io) : silo_id_(silo_id), io_(io) {
  if (silo_id < 1 || silo_id > plant::kSiloCount) throw std::out_of_range("silo id outside 1..4");
}

void SiloDriver::command(plant::Actuator a, bool value, const char* name) {
  if ((a == plant::Actuator::Mixer && !plant::has_mixer(silo_id_)) ||
      (a == plant::Actuator::Heater && !plant::has_heater(silo_id_))) {
    throw plant::NoSuchActuator(silo_id_, a);
  }
  io_.command(silo_id_, a, value);
  io_.emit(silo_name(silo_id_), RecordKind::Act, name);
}

void SiloDriver::open_in_valve() { command(plant::Actuator::InValve, true, "openINValve"); }
void SiloDriver::close_in_valve() { command(plant::Actuator::InValve, false, "closeINValve"); }
void SiloDriver::open_out_valve() { command(plant::Actuator::OutValve, true, "openOUTValve"); }
void SiloDriver::close_out_valve() { command(plant::Actuator::OutValve, false, "closeOUTValve"); }
void SiloDriver::start_mixer() { command(plant::Actuator::Mixer, true, "startMixer"); }
void SiloDriver::stop_mixer() { command(plant::Actuator::Mixer, false, "stopMixer"); }
void SiloDriver::start_heater() { command(plant::Actuator::Heater, true, "startHeater"); }
void SiloDriver::stop_heater() { command(plant::Actuator::Heater, false, "stopHeater"); }

plant::SiloReading SiloDriver::read_sensors() const { return io_.inputs().silo(silo_id_); }

DriverEdges SiloDriver::update() {
  const auto now = read_sensors();
  DriverEdges edges;
  if (previous_) {
    edges.level_high = !previous_->f && now.f;
    edges.level_low = previous_->e && !now.e;
  }
  if (armed_threshold_ && now.temperature && *now.temperature >= *armed_threshold_) {
    edges.temperature = armed_threshold_;
    armed_threshold_.reset();
  }
  previous_ = now;
  if (listener_) {
    if (edges.level_high) listener_->level_high_reached();
    if (edges.level_low) listener_->level_low_cleared();
    if (edges.temperature) listener_->temperature_reached(*edges.temperature);
  }
  return edges;
}

std::shared_ptr<const SiloMachineDef> silo_machine_definition() {
  static const auto def = [] {
    auto d = std::make_shared<SiloMachineDef>();
    d->name = "Silo";
    d->states = {"Empty", "Filling", "Full", "Emptying"};
    d->initial = {
        {[](const SiloContext& c, const Event&) { return c.initial.f; }, {}, "Full"},
        {{}, {}, "Empty"},
    };
    const auto open_in = driver_action("openINValve", &SiloDriverIf::open_in_valve);
    const auto close_in = driver_action("closeINValve", &SiloDriverIf::close_in_valve);
    const auto open_out = driver_action("openOUTValve", &SiloDriverIf::open_out_valve);
    const auto close_out = driver_action("closeOUTValve", &SiloDriverIf::close_out_valve);
    d->transitions = {
        {"Empty", "fill", {}, {open_in}, "Filling"},
        {"Filling", "levelHighReached", {}, {close_in, notify_filled()}, "Full"},
        {"Filling", "markFull", {}, {close_in, notify_filled()}, "Full"},
        {"Full", "empty", {}, {open_out}, "Emptying"},
        {"Emptying", "levelLowCleared", {}, {close_out, notify_emptied()}, "Empty"},
        {"Emptying", "markEmpty", {}, {close_out, notify_emptied()}, "Empty"},
    };
    return std::shared_ptr<const SiloMachineDef>(std::move(d));
  }();
  return def;
}

SiloController::SiloController(std::shared_ptr<SiloDriver> driver, plant::SiloReading initial, runtime::ScanIo& io)
    : driver_(std::move(driver)),
      io_(io),
      machine_(silo_machine_definition(), SiloContext{driver_.get(), nullptr, initial}) {
  driver_->set_listener(this);
}

SiloStatus SiloController::status() const { return *parse_silo_status(machine_.current()); }

void SiloController::temperature_reached(double threshold) {
  sensed_.emplace_back("temperatureReached", static_cast<long>(threshold));
}

void SiloController::dispatch(const Event& ev) { traced_dispatch(machine_, ev, io_, silo_name(silo_id())); }

void SiloController::execute(runtime::ScanIo&) {
  driver_->update();
  // Physical edges first, then requests queued since the last execution.
  while (!sensed_.empty()) {
    auto ev = std::move(sensed_.front());
    sensed_.pop_front();
    dispatch(ev);
  }
  while (!commands_.empty()) {
    auto ev = std::move(commands_.front());
    commands_.pop_front();
    dispatch(ev);
  }
}

} // namespace siloplc::components
