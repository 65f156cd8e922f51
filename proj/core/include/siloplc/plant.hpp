#pragma once

// Discrete-time model of the four-silo liqueur plant.
//
// Silos 1 and 2 take raw liquid from a dedicated supply, silos 3 and 4 drain
// to the product outlet, and a single shared pipe can carry liquid either
// S1 -> S4 or S2 -> S3. Silos 2 and 4 carry a heater, silos 3 and 4 a mixer.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace siloplc::plant {

inline constexpr int kSiloCount = 4;

struct PlantConfig {
  double dt = 0.1;            // seconds per tick
  double fill_rate = 10.0;    // L/s from supply into S1/S2
  double pipe_rate = 10.0;    // L/s silo to silo
  double drain_rate = 10.0;   // L/s from S3/S4 to the outlet
  double heat_rate = 2.0;     // degC/s while a heater is on
  double ambient_temp = 20.0; // degC, initial temperature
  double e_threshold = 2.0;   // L, low-level sensor trips above this
  double f_threshold = 95.0;  // L, high-level sensor trips at or above this
  double capacity = 100.0;    // L, per silo
};

class InvalidConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Throws InvalidConfig describing the first violated constraint.
void validate(const PlantConfig& cfg);

struct SiloState {
  int id = 1;
  double level = 0.0;
  double temperature = 20.0;
  bool in_valve = false;
  bool out_valve = false;
  bool mixer_on = false;
  bool heater_on = false;
  double capacity = 100.0;
};

constexpr bool has_mixer(int silo_id) { return silo_id == 3 || silo_id == 4; }
constexpr bool has_heater(int silo_id) { return silo_id == 2 || silo_id == 4; }

struct PlantState {
  std::array<SiloState, kSiloCount> silos;
  std::uint64_t tick = 0;

  SiloState& silo(int id);
  const SiloState& silo(int id) const;
};

// All silos empty at ambient temperature with every actuator off.
PlantState make_plant(const PlantConfig& cfg);

enum class Actuator { InValve, OutValve, Mixer, Heater };

const char* to_string(Actuator a);

class NoSuchActuator : public std::invalid_argument {
 public:
  NoSuchActuator(int silo_id, Actuator a);
};

// Idempotent. Throws NoSuchActuator for mixers outside S3/S4, heaters outside
// S2/S4 and silo ids outside 1..4.
PlantState set_actuator(PlantState state, int silo_id, Actuator actuator, bool value);
void set_actuator_in_place(PlantState& state, int silo_id, Actuator actuator, bool value);

struct SiloReading {
  bool e = false;                    // level > e_threshold
  bool f = false;                    // level >= f_threshold
  std::optional<double> temperature; // only silos with a heater
};

struct SensorReadings {
  std::array<SiloReading, kSiloCount> silos;

  const SiloReading& silo(int id) const { return silos.at(static_cast<std::size_t>(id - 1)); }
};

SensorReadings read_sensors(const PlantState& state, const PlantConfig& cfg);

struct ActiveRoute {
  enum class Kind { None, Route, Conflict };
  Kind kind = Kind::None;
  int src = 0;
  int dst = 0;

  static ActiveRoute none() { return {}; }
  static ActiveRoute route(int src, int dst) { return {Kind::Route, src, dst}; }
  static ActiveRoute conflict() { return {Kind::Conflict, 0, 0}; }
  friend bool operator==(const ActiveRoute&, const ActiveRoute&) = default;
};

ActiveRoute active_route(const PlantState& state);

enum class FaultKind { PipeConflict, Overflow, PowerViolation };

const char* to_string(FaultKind k);

struct PlantFault {
  FaultKind kind;
  std::uint64_t tick = 0;
  std::vector<int> silos;
  std::string detail; // extra context, e.g. the clamped level

  friend bool operator==(const PlantFault&, const PlantFault&) = default;
};

struct StepResult {
  PlantState state;
  std::vector<PlantFault> faults;
};

// Advances the plant by cfg.dt. Faults are reported, never thrown; the tick
// stamped on each fault is the tick being simulated (state.tick on entry).
StepResult step(const PlantState& state, const PlantConfig& cfg);

} // namespace siloplc::plant
