#include "siloplc/plant.hpp"

#include <algorithm>
#include <cstdio>
#include <string>

namespace siloplc::plant {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw InvalidConfig(what);
}

void check_silo_id(int id) {
  if (id < 1 || id > kSiloCount) throw std::out_of_range("silo id " + std::to_string(id) + " outside 1..4");
}

std::string level_detail(double level) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "level=%.6f", level);
  return buf;
}

} // namespace

void validate(const PlantConfig& cfg) {
  require(cfg.dt > 0.0, "plant.dt must be > 0");
  require(cfg.fill_rate > 0.0, "plant.fill_rate must be > 0");
  require(cfg.pipe_rate > 0.0, "plant.pipe_rate must be > 0");
  require(cfg.drain_rate > 0.0, "plant.drain_rate must be > 0");
  require(cfg.heat_rate > 0.0, "plant.heat_rate must be > 0");
  require(cfg.capacity > 0.0, "plant.capacity must be > 0");
  require(cfg.e_threshold > 0.0, "plant.e_threshold must be > 0");
  require(cfg.e_threshold < cfg.f_threshold, "plant.e_threshold must be < plant.f_threshold");
  require(cfg.f_threshold <= cfg.capacity, "plant.f_threshold must be <= plant.capacity");
}

SiloState& PlantState::silo(int id) {
  check_silo_id(id);
  return silos[static_cast<std::size_t>(id - 1)];
}

const SiloState& PlantState::silo(int id) const {
  check_silo_id(id);
  return silos[static_cast<std::size_t>(id - 1)];
}

PlantState make_plant(const PlantConfig& cfg) {
  PlantState p;
  for (int i = 0; i < kSiloCount; ++i) {
    auto& s = p.silos[static_cast<std::size_t>(i)];
    s.id = i + 1;
    s.capacity = cfg.capacity;
    s.temperature = cfg.ambient_temp;
  }
  return p;
}

const char* to_string(Actuator a) {
  switch (a) {
    case Actuator::InValve: return "in_valve";
    case Actuator::OutValve: return "out_valve";
    case Actuator::Mixer: return "mixer";
    case Actuator::Heater: return "heater";
  }
  return "?";
}

NoSuchActuator::NoSuchActuator(int silo_id, Actuator a)
    : std::invalid_argument(std::string("silo ") + std::to_string(silo_id) + " has no " + to_string(a)) {}

void set_actuator_in_place(PlantState& state, int silo_id, Actuator actuator, bool value) {
  if (silo_id < 1 || silo_id > kSiloCount) throw NoSuchActuator(silo_id, actuator);
  auto& s = state.silo(silo_id);
  switch (actuator) {
    case Actuator::InValve: s.in_valve = value; break;
    case Actuator::OutValve: s.out_valve = value; break;
    case Actuator::Mixer:
      if (!has_mixer(silo_id)) throw NoSuchActuator(silo_id, actuator);
      s.mixer_on = value;
      break;
    case Actuator::Heater:
      if (!has_heater(silo_id)) throw NoSuchActuator(silo_id, actuator);
      s.heater_on = value;
      break;
  }
}

PlantState set_actuator(PlantState state, int silo_id, Actuator actuator, bool value) {
  set_actuator_in_place(state, silo_id, actuator, value);
  return state;
}

SensorReadings read_sensors(const PlantState& state, const PlantConfig& cfg) {
  SensorReadings r;
  for (const auto& s : state.silos) {
    auto& out = r.silos[static_cast<std::size_t>(s.id - 1)];
    out.e = s.level > cfg.e_threshold;
    out.f = s.level >= cfg.f_threshold;
    if (has_heater(s.id)) out.temperature = s.temperature;
  }
  return r;
}

ActiveRoute active_route(const PlantState& state) {
  const bool r14 = state.silo(1).out_valve && state.silo(4).in_valve;
  const bool r23 = state.silo(2).out_valve && state.silo(3).in_valve;
  if (r14 && r23) return ActiveRoute::conflict();
  if (r14) return ActiveRoute::route(1, 4);
  if (r23) return ActiveRoute::route(2, 3);
  return ActiveRoute::none();
}

const char* to_string(FaultKind k) {
  switch (k) {
    case FaultKind::PipeConflict: return "PipeConflict";
    case FaultKind::Overflow: return "Overflow";
    case FaultKind::PowerViolation: return "PowerViolation";
  }
  return "?";
}

StepResult step(const PlantState& state, const PlantConfig& cfg) {
  StepResult out{state, {}};
  PlantState& p = out.state;
  const auto tick = state.tick;

  for (int id : {1, 2}) {
    auto& s = p.silo(id);
    if (!s.in_valve) continue;
    s.level += cfg.fill_rate * cfg.dt;
    if (s.level > s.capacity) {
      s.level = s.capacity;
      out.faults.push_back({FaultKind::Overflow, tick, {id}, level_detail(s.level)});
    }
  }

  // The route is judged on the valve positions, before any level changes in
  // this tick would matter.
  const auto route = active_route(state);
  if (route.kind == ActiveRoute::Kind::Conflict) {
    out.faults.push_back({FaultKind::PipeConflict, tick, {1, 4, 2, 3}, {}});
  } else if (route.kind == ActiveRoute::Kind::Route) {
    auto& src = p.silo(route.src);
    auto& dst = p.silo(route.dst);
    double amount = std::min(cfg.pipe_rate * cfg.dt, src.level);
    const double headroom = dst.capacity - dst.level;
    if (amount > headroom) {
      amount = headroom;
      out.faults.push_back({FaultKind::Overflow, tick, {route.dst}, level_detail(dst.capacity)});
    }
    src.level -= amount;
    dst.level += amount;
  }

  for (int id : {3, 4}) {
    auto& s = p.silo(id);
    if (s.out_valve) s.level = std::max(0.0, s.level - cfg.drain_rate * cfg.dt);
  }

  for (auto& s : p.silos) {
    if (s.heater_on) s.temperature += cfg.heat_rate * cfg.dt;
    s.level = std::clamp(s.level, 0.0, s.capacity);
  }

  if (p.silo(3).mixer_on && p.silo(4).mixer_on) {
    out.faults.push_back({FaultKind::PowerViolation, tick, {3, 4}, {}});
  }

  p.tick = tick + 1;
  return out;
}

} // namespace siloplc::plant
