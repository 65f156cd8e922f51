#include "siloplc/ofb.hpp"

namespace siloplc::components {

void FillingOfb::start() {
  active_ = true;
  silo_->open_in_valve();
}

bool FillingOfb::cycle(const DriverEdges& edges, bool force) {
  if (!active_ || !(edges.level_high || force)) return false;
  silo_->close_in_valve();
  silo_->set_full(true);
  active_ = false;
  return true;
}

void EmptyingOfb::start() {
  active_ = true;
  silo_->open_out_valve();
}

bool EmptyingOfb::cycle(const DriverEdges& edges, bool force) {
  if (!active_ || !(edges.level_low || force)) return false;
  silo_->close_out_valve();
  silo_->set_full(false);
  active_ = false;
  return true;
}

SiloOfbUnit::SiloOfbUnit(int silo_id, bool initially_full, runtime::ScanIo& io)
    : dfb_(std::make_shared<SiloDfb>(silo_id, io, initially_full)),
      filling_(dfb_.get()),
      emptying_(dfb_.get()),
      io_(io) {}

SiloStatus SiloOfbUnit::status() const {
  if (filling_.active()) return SiloStatus::Filling;
  if (emptying_.active()) return SiloStatus::Emptying;
  return dfb_->full() ? SiloStatus::Full : SiloStatus::Empty;
}

void SiloOfbUnit::trace_status(SiloStatus before) {
  const auto after = status();
  if (after != before) io_.emit(silo_name(dfb_->silo_id()), RecordKind::State, std::string(to_string(before)) + "->" + to_string(after));
}

void SiloOfbUnit::completed_fill() {
  if (process_) process_->filled(dfb_->silo_id());
}

void SiloOfbUnit::completed_empty() {
  if (process_) process_->emptied(dfb_->silo_id());
}

void SiloOfbUnit::execute(runtime::ScanIo&) {
  const auto name = silo_name(dfb_->silo_id());
  const auto edges = dfb_->update();

  if (edges.level_high && filling_.active()) {
    io_.emit(name, RecordKind::Evt, "levelHighReached");
    const auto before = status();
    filling_.cycle(edges, false);
    completed_fill();
    trace_status(before);
  }
  if (edges.level_low && emptying_.active()) {
    io_.emit(name, RecordKind::Evt, "levelLowCleared");
    const auto before = status();
    emptying_.cycle(edges, false);
    completed_empty();
    trace_status(before);
  }

  while (!requests_.empty()) {
    const auto req = std::move(requests_.front());
    requests_.pop_front();
    const auto before = status();
    bool accepted = false;
    const bool idle = !filling_.active() && !emptying_.active();
    if (req == "fill" && idle && !dfb_->full()) {
      io_.emit(name, RecordKind::Evt, req);
      filling_.start();
      accepted = true;
    } else if (req == "empty" && idle && dfb_->full()) {
      io_.emit(name, RecordKind::Evt, req);
      emptying_.start();
      accepted = true;
    } else if (req == "markFull" && filling_.active()) {
      io_.emit(name, RecordKind::Evt, req);
      filling_.cycle({}, true);
      completed_fill();
      accepted = true;
    } else if (req == "markEmpty" && emptying_.active()) {
      io_.emit(name, RecordKind::Evt, req);
      emptying_.cycle({}, true);
      completed_empty();
      accepted = true;
    }
    if (!accepted) {
      io_.emit(name, RecordKind::Evt, req + " ignored");
      continue;
    }
    trace_status(before);
  }
}

} // namespace siloplc::components
