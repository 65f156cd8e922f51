#pragma once

// Silo cyber component: the driver (proxy of the physical silo) and the
// controller that owns the silo's Empty/Filling/Full/Emptying behaviour.

#include <deque>
#include <memory>
#include <optional>
#include <string>

#include "siloplc/plant.hpp"
#include "siloplc/runtime.hpp"
#include "siloplc/statechart.hpp"

namespace siloplc::components {

enum class SiloStatus { Empty, Filling, Full, Emptying };

const char* to_string(SiloStatus s);
std::optional<SiloStatus> parse_silo_status(const std::string& s);

std::string silo_name(int silo_id); // "S1".."S4"

// Device-level command surface offered by a silo driver.
class SiloDriverIf {
 public:
  virtual ~SiloDriverIf() = default;
  virtual int silo_id() const = 0;
  virtual void open_in_valve() = 0;
  virtual void close_in_valve() = 0;
  virtual void open_out_valve() = 0;
  virtual void close_out_valve() = 0;
  virtual void start_mixer() = 0;
  virtual void stop_mixer() = 0;
  virtual void start_heater() = 0;
  virtual void stop_heater() = 0;
  virtual plant::SiloReading read_sensors() const = 0;
};

// Callbacks a controller implements to hear from its driver.
class SiloCtrl2DriverIf {
 public:
  virtual ~SiloCtrl2DriverIf() = default;
  virtual void level_high_reached() = 0;
  virtual void level_low_cleared() = 0;
  virtual void temperature_reached(double threshold) = 0;
};

// Commands a process controller issues to a silo unit. mark_full/mark_empty
// end a pipe transfer from the other side of the pipe.
class Process2UnitControlerIf {
 public:
  virtual ~Process2UnitControlerIf() = default;
  virtual void fill() = 0;
  virtual void empty() = 0;
  virtual void mark_full() = 0;
  virtual void mark_empty() = 0;
  virtual SiloStatus status() const = 0;
};

// Completion notifications a silo unit sends to its process controller.
class Silo2ProcessIf {
 public:
  virtual ~Silo2ProcessIf() = default;
  virtual void filled(int silo_id) = 0;
  virtual void emptied(int silo_id) = 0;
};

struct DriverEdges {
  bool level_high = false; // F went false -> true
  bool level_low = false;  // E went true -> false
  std::optional<double> temperature; // armed threshold crossed
};

// Reads the scan's input image and writes the output image. Every command is
// traced as an ACT record under the silo's name.
class SiloDriver : public SiloDriverIf {
 public:
  SiloDriver(int silo_id, runtime::ScanIo& io);

  int silo_id() const override { return silo_id_; }
  void open_in_valve() override;
  void close_in_valve() override;
  void open_out_valve() override;
  void close_out_valve() override;
  void start_mixer() override;
  void stop_mixer() override;
  void start_heater() override;
  void stop_heater() override;
  plant::SiloReading read_sensors() const override;

  void set_listener(SiloCtrl2DriverIf* listener) { listener_ = listener; }
  // Fires temperature_reached once when the temperature first reaches
  // `threshold`.
  void arm_temperature(double threshold) { armed_threshold_ = threshold; }

  // Compares the current input image with the one seen on the previous call
  // and notifies the listener once per crossing. The first call only primes.
  DriverEdges update();

 private:
  void command(plant::Actuator a, bool value, const char* name);

  int silo_id_;
  runtime::ScanIo& io_;
  SiloCtrl2DriverIf* listener_ = nullptr;
  std::optional<plant::SiloReading> previous_;
  std::optional<double> armed_threshold_;
};

struct SiloContext {
  SiloDriverIf* driver = nullptr;
  Silo2ProcessIf* process = nullptr;
  plant::SiloReading initial; // what the transitory initial state inspects
};

using SiloMachine = statechart::MachineInstance<SiloContext>;
using SiloMachineDef = statechart::StatechartDef<SiloContext>;

// Empty/Filling/Full/Emptying machine with a transitory initial state that
// picks Full when F is set and Empty otherwise.
std::shared_ptr<const SiloMachineDef> silo_machine_definition();

// «cpController» for one silo. fill()/empty()/mark_*() queue an event that
// the FB body dispatches when the instance executes in the scan.
class SiloController : public runtime::FunctionBlock, public Process2UnitControlerIf, public SiloCtrl2DriverIf {
 public:
  SiloController(std::shared_ptr<SiloDriver> driver, plant::SiloReading initial, runtime::ScanIo& io);

  void connect(Silo2ProcessIf* process) { machine_.context().process = process; }

  void fill() override { commands_.emplace_back("fill"); }
  void empty() override { commands_.emplace_back("empty"); }
  void mark_full() override { commands_.emplace_back("markFull"); }
  void mark_empty() override { commands_.emplace_back("markEmpty"); }
  SiloStatus status() const override;

  void level_high_reached() override { sensed_.emplace_back("levelHighReached"); }
  void level_low_cleared() override { sensed_.emplace_back("levelLowCleared"); }
  void temperature_reached(double threshold) override;

  void execute(runtime::ScanIo& io) override;

  const SiloMachine& machine() const { return machine_; }
  int silo_id() const { return driver_->silo_id(); }

 private:
  void dispatch(const statechart::Event& ev);

  std::shared_ptr<SiloDriver> driver_;
  runtime::ScanIo& io_;
  SiloMachine machine_;
  std::deque<statechart::Event> sensed_;
  std::deque<statechart::Event> commands_;
};

// Shared by silo controllers and process controllers: traces one dispatch as
// an EVT record followed by one STATE record per transition taken.
template <typename Context>
statechart::DispatchResult traced_dispatch(statechart::MachineInstance<Context>& m, const statechart::Event& ev,
                                           runtime::ScanIo& io, const std::string& source,
                                           const std::string& note = {}) {
  std::string detail = ev.label();
  if (!note.empty()) detail += " " + note;
  // Record the event before its actions emit ACT records.
  io.emit(source, RecordKind::Evt, m.accepts(ev) ? detail : detail + " ignored");
  auto result = m.dispatch(ev);
  for (const auto& c : result.changes) io.emit(source, RecordKind::State, c.from + "->" + c.to);
  return result;
}

} // namespace siloplc::components
