#pragma once

// Scan-cycle executor. Every scan reads one sensor snapshot, runs each
// function block instance in ascending priority against it, applies the
// collected actuator commands in issue order (last writer wins) and then
// advances the plant by exactly one tick.

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "siloplc/plant.hpp"
#include "siloplc/trace.hpp"

namespace siloplc::runtime {

// Slot used for records emitted by the plant after all instances have run.
inline constexpr int kPlantSlot = std::numeric_limits<int>::max();

struct ActuatorCommand {
  int silo = 0;
  plant::Actuator actuator = plant::Actuator::InValve;
  bool value = false;
};

// Input image, output image and trace sink for the scan in progress.
class ScanIo {
 public:
  std::uint64_t tick() const { return tick_; }
  int slot() const { return slot_; }
  const plant::SensorReadings& inputs() const { return inputs_; }

  void command(int silo, plant::Actuator actuator, bool value) { outputs_.push_back({silo, actuator, value}); }
  void emit(std::string source, RecordKind kind, std::string detail) {
    records_.push_back({tick_, std::move(source), kind, std::move(detail), slot_});
  }

  const std::vector<ActuatorCommand>& pending_commands() const { return outputs_; }

 private:
  friend class Program;

  std::uint64_t tick_ = 0;
  int slot_ = 0;
  plant::SensorReadings inputs_{};
  std::vector<ActuatorCommand> outputs_;
  std::vector<TraceRecord> records_;
};

class FunctionBlock {
 public:
  virtual ~FunctionBlock() = default;
  // Called once per scan. Must not block; waiting is encoded in state.
  virtual void execute(ScanIo& io) = 0;
};

struct FbInstance {
  std::string id;
  int priority = 0;
  std::shared_ptr<FunctionBlock> logic;
};

class DuplicatePriority : public std::invalid_argument {
 public:
  explicit DuplicatePriority(int priority)
      : std::invalid_argument("priority " + std::to_string(priority) + " already in use") {}
};

class DuplicateId : public std::invalid_argument {
 public:
  explicit DuplicateId(const std::string& id) : std::invalid_argument("instance id '" + id + "' already in use") {}
};

class TickLimitExceeded : public std::runtime_error {
 public:
  TickLimitExceeded(std::uint64_t limit, Trace partial)
      : std::runtime_error("stop condition not reached within " + std::to_string(limit) + " ticks"),
        partial_(std::move(partial)) {}

  const Trace& partial_trace() const { return partial_; }

 private:
  Trace partial_;
};

class Program;
using StopPredicate = std::function<bool(const Program&, const plant::PlantState&)>;

class Program {
 public:
  Program();

  // Throws DuplicatePriority / DuplicateId; priorities must be positive.
  void add_instance(FbInstance instance);
  bool remove_instance(const std::string& id);

  std::vector<std::string> execution_order() const;
  std::uint64_t scan_count() const { return scan_count_; }
  std::size_t size() const { return instances_.size(); }

  // Components hold this reference to issue commands and emit records.
  ScanIo& io() { return *io_; }

  // Throws std::invalid_argument if the plant tick is out of lockstep with
  // the scan counter. Errors raised by instances propagate unchanged.
  std::vector<TraceRecord> run_scan(plant::PlantState& plant, const plant::PlantConfig& cfg);

  // Runs scans until `stop` holds. `stop` is checked before every scan.
  // Throws TickLimitExceeded carrying the partial trace after `max_ticks`
  // scans without `stop` becoming true.
  Trace run_until(plant::PlantState& plant, const plant::PlantConfig& cfg, const StopPredicate& stop,
                  std::uint64_t max_ticks);

 private:
  std::map<int, FbInstance> instances_; // keyed by priority
  std::unique_ptr<ScanIo> io_;
  std::uint64_t scan_count_ = 0;
};

} // namespace siloplc::runtime
