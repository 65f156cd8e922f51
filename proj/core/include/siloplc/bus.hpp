#pragma once

// In-process message bus standing in for the network between the node that
// hosts the process controllers and the nodes hosting silo units.
//
// Latency is a whole number of scans, uniform for the bus. With latency L > 0
// a message sent at tick t is delivered at tick t + L. With L = 0 it is
// delivered in the same scan when the target executes after the sender, and
// in the next scan otherwise.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "siloplc/runtime.hpp"
#include "siloplc/silo.hpp"

namespace siloplc::iot {

enum class MessageKind { Request, Notification };

struct ServiceMessage {
  MessageKind kind = MessageKind::Request;
  std::string sender;
  std::string target;
  std::string operation;
  std::vector<long> args;
  std::uint64_t correlation_id = 0; // assigned by the bus, per sender
  std::uint64_t sent_tick = 0;
  std::uint64_t delivery_tick = 0;  // assigned by the bus
};

class UnknownEndpoint : public std::invalid_argument {
 public:
  explicit UnknownEndpoint(const std::string& id) : std::invalid_argument("unknown endpoint '" + id + "'") {}
};

// Thread-safe: every public member locks.
class Bus {
 public:
  explicit Bus(std::uint64_t latency = 0) : latency_(latency) {}

  std::uint64_t latency() const { return latency_; }

  // `exec_order` is the endpoint's scan priority; it decides same-scan
  // delivery when latency is 0.
  void register_endpoint(const std::string& id, int exec_order);
  bool has_endpoint(const std::string& id) const;

  // Stamps correlation id and delivery tick, enqueues, and returns the stamped
  // message. Throws UnknownEndpoint for an unregistered sender or target.
  ServiceMessage send(ServiceMessage msg);

  // Removes and returns every message for `endpoint` due at or before `tick`,
  // ordered by (delivery tick, sender, correlation id).
  std::vector<ServiceMessage> poll(const std::string& endpoint, std::uint64_t tick);

  std::size_t in_flight() const;

 private:
  mutable std::mutex mutex_;
  std::uint64_t latency_;
  std::map<std::string, int> endpoints_;
  std::map<std::string, std::uint64_t> next_correlation_;
  std::vector<ServiceMessage> in_flight_;
};

// `<sender>-><target>:<operation>#<correlation_id>@<delivery_tick>`
std::string msg_detail(const ServiceMessage& m);

// Sends a message stamped with the current tick and traces it as a MSG record.
ServiceMessage send_traced(Bus& bus, runtime::ScanIo& io, ServiceMessage msg);

// Process-side stand-in for a silo unit. Requests go over the bus; status()
// reports the last status carried by a notification from that silo.
class RemoteUnitCommands : public components::Process2UnitControlerIf {
 public:
  RemoteUnitCommands(Bus& bus, runtime::ScanIo& io, std::string process_ep, std::string silo_ep,
                     components::SiloStatus initial);

  void fill() override { request("fill"); }
  void empty() override { request("empty"); }
  void mark_full() override { request("markFull"); }
  void mark_empty() override { request("markEmpty"); }
  components::SiloStatus status() const override { return status_; }

  const std::string& silo_endpoint() const { return silo_ep_; }
  void observe(const ServiceMessage& notification);

 private:
  void request(const char* op);

  Bus& bus_;
  runtime::ScanIo& io_;
  std::string process_ep_;
  std::string silo_ep_;
  components::SiloStatus status_;
};

// Silo-side stand-in for the process controller.
class RemoteProcessNotifications : public components::Silo2ProcessIf {
 public:
  RemoteProcessNotifications(Bus& bus, runtime::ScanIo& io, std::string silo_ep, std::string process_ep);

  void filled(int silo_id) override { notify("filled", silo_id); }
  void emptied(int silo_id) override { notify("emptied", silo_id); }

 private:
  void notify(const char* op, int silo_id);

  Bus& bus_;
  runtime::ScanIo& io_;
  std::string silo_ep_;
  std::string process_ep_;
};

struct RemotePair {
  std::shared_ptr<RemoteUnitCommands> commands;
  std::shared_ptr<RemoteProcessNotifications> notifications;
};

// Throws UnknownEndpoint if either endpoint is not registered.
RemotePair make_remote_pair(Bus& bus, runtime::ScanIo& io, const std::string& silo_ep, const std::string& process_ep,
                            components::SiloStatus initial_status);

// Wraps a function block so that, in its own scan slot, it first receives the
// messages due for its endpoint and hands them to the local surfaces.
class RemoteEndpoint : public runtime::FunctionBlock {
 public:
  RemoteEndpoint(Bus& bus, std::string endpoint, std::shared_ptr<runtime::FunctionBlock> inner);

  // Requests addressed to this endpoint go to `unit`.
  void serve_unit(components::Process2UnitControlerIf* unit) { unit_ = unit; }
  // Notifications go to `process`; `proxies` see them to track silo status.
  void serve_process(components::Silo2ProcessIf* process, std::vector<RemoteUnitCommands*> proxies) {
    process_ = process;
    proxies_ = std::move(proxies);
  }

  void execute(runtime::ScanIo& io) override;

 private:
  void deliver(const ServiceMessage& m);

  Bus& bus_;
  std::string endpoint_;
  std::shared_ptr<runtime::FunctionBlock> inner_;
  components::Process2UnitControlerIf* unit_ = nullptr;
  components::Silo2ProcessIf* process_ = nullptr;
  std::vector<RemoteUnitCommands*> proxies_;
};

} // namespace siloplc::iot
