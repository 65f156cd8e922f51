#include "siloplc/runtime.hpp"

#include <algorithm>
#include <string>

namespace siloplc::runtime {

namespace {

std::string fault_detail(const plant::PlantFault& f) {
  std::string d = to_string(f.kind);
  d += ' ';
  for (std::size_t i = 0; i < f.silos.size(); ++i) {
    if (i) d += ',';
    d += std::to_string(f.silos[i]);
  }
  if (!f.detail.empty()) {
    d += ' ';
    d += f.detail;
  }
  return d;
}

} // namespace

Program::Program() : io_(std::make_unique<ScanIo>()) {}

void Program::add_instance(FbInstance instance) {
  if (instance.priority <= 0) throw std::invalid_argument("priority must be positive");
  if (!instance.logic) throw std::invalid_argument("instance '" + instance.id + "' has no logic");
  if (instances_.count(instance.priority)) throw DuplicatePriority(instance.priority);
  for (const auto& [_, existing] : instances_) {
    if (existing.id == instance.id) throw DuplicateId(instance.id);
  }
  const int key = instance.priority;
  instances_.emplace(key, std::move(instance));
}

bool Program::remove_instance(const std::string& id) {
  auto it = std::find_if(instances_.begin(), instances_.end(), [&](const auto& kv) { return kv.second.id == id; });
  if (it == instances_.end()) return false;
  instances_.erase(it);
  return true;
}

std::vector<std::string> Program::execution_order() const {
  std::vector<std::string> ids;
  ids.reserve(instances_.size());
  for (const auto& [_, inst] : instances_) ids.push_back(inst.id);
  return ids;
}

std::vector<TraceRecord> Program::run_scan(plant::PlantState& plant, const plant::PlantConfig& cfg) {
  if (plant.tick != scan_count_) {
    throw std::invalid_argument("plant tick " + std::to_string(plant.tick) + " does not match scan count " +
                                std::to_string(scan_count_));
  }
  ScanIo& io = *io_;
  io.tick_ = scan_count_;
  io.inputs_ = plant::read_sensors(plant, cfg);
  io.outputs_.clear();
  io.records_.clear();

  for (auto& [priority, inst] : instances_) {
    io.slot_ = priority;
    inst.logic->execute(io);
  }

  for (const auto& c : io.outputs_) plant::set_actuator_in_place(plant, c.silo, c.actuator, c.value);

  auto stepped = plant::step(plant, cfg);
  plant = std::move(stepped.state);
  io.slot_ = kPlantSlot;
  for (const auto& f : stepped.faults) io.emit("plant", RecordKind::Fault, fault_detail(f));

  ++scan_count_;
  io.slot_ = 0;
  return std::move(io.records_);
}

Trace Program::run_until(plant::PlantState& plant, const plant::PlantConfig& cfg, const StopPredicate& stop,
                         std::uint64_t max_ticks) {
  if (max_ticks == 0) throw std::invalid_argument("max_ticks must be > 0");
  Trace trace;
  for (std::uint64_t n = 0;; ++n) {
    if (stop && stop(*this, plant)) return trace;
    if (n == max_ticks) throw TickLimitExceeded(max_ticks, std::move(trace));
    auto records = run_scan(plant, cfg);
    trace.records.insert(trace.records.end(), std::make_move_iterator(records.begin()),
                         std::make_move_iterator(records.end()));
  }
}

} // namespace siloplc::runtime
