#pragma once

// Device-block / operation-block realisation of a silo, kept for comparison
// with SiloController. The SILO device block owns field access and the
// physical-state flag; FILLING and EMPTYING operation blocks each hold a link
// to it and act only through that link.

#include <deque>
#include <memory>
#include <string>

#include "siloplc/runtime.hpp"
#include "siloplc/silo.hpp"

namespace siloplc::components {

class SiloDfb : public SiloDriver {
 public:
  SiloDfb(int silo_id, runtime::ScanIo& io, bool initially_full) : SiloDriver(silo_id, io), full_(initially_full) {}

  bool full() const { return full_; }
  void set_full(bool v) { full_ = v; }

 private:
  bool full_;
};

class FillingOfb {
 public:
  explicit FillingOfb(SiloDfb* silo) : silo_(silo) {}

  bool active() const { return active_; }
  void start();
  // Ends the cycle on the high-level edge or when forced. Returns true when
  // the cycle completed on this call.
  bool cycle(const DriverEdges& edges, bool force);

 private:
  SiloDfb* silo_;
  bool active_ = false;
};

class EmptyingOfb {
 public:
  explicit EmptyingOfb(SiloDfb* silo) : silo_(silo) {}

  bool active() const { return active_; }
  void start();
  bool cycle(const DriverEdges& edges, bool force);

 private:
  SiloDfb* silo_;
  bool active_ = false;
};

// FB instance that exposes the same command surface as SiloController but
// drives the silo through the operation blocks.
class SiloOfbUnit : public runtime::FunctionBlock, public Process2UnitControlerIf {
 public:
  SiloOfbUnit(int silo_id, bool initially_full, runtime::ScanIo& io);

  void connect(Silo2ProcessIf* process) { process_ = process; }

  void fill() override { requests_.push_back("fill"); }
  void empty() override { requests_.push_back("empty"); }
  void mark_full() override { requests_.push_back("markFull"); }
  void mark_empty() override { requests_.push_back("markEmpty"); }
  SiloStatus status() const override;

  void execute(runtime::ScanIo& io) override;

  SiloDfb& device() { return *dfb_; }
  std::shared_ptr<SiloDfb> device_ptr() { return dfb_; }

 private:
  void trace_status(SiloStatus before);
  void completed_fill();
  void completed_empty();

  std::shared_ptr<SiloDfb> dfb_;
  FillingOfb filling_;
  EmptyingOfb emptying_;
  runtime::ScanIo& io_;
  Silo2ProcessIf* process_ = nullptr;
  std::deque<std::string> requests_;
};

} // namespace siloplc::components
