#include "siloplc/bus.hpp"

#include <algorithm>
#include <tuple>

namespace siloplc::iot {

void Bus::register_endpoint(const std::string& id, int exec_order) {
  if (id.empty()) throw std::invalid_argument("endpoint id must not be empty");
  std::lock_guard lock(mutex_);
  endpoints_[id] = exec_order;
}

bool Bus::has_endpoint(const std::string& id) const {
  std::lock_guard lock(mutex_);
  return endpoints_.count(id) != 0;
}

ServiceMessage Bus::send(ServiceMessage msg) {
  std::lock_guard lock(mutex_);
  const auto sender = endpoints_.find(msg.sender);
  if (sender == endpoints_.end()) throw UnknownEndpoint(msg.sender);
  const auto target = endpoints_.find(msg.target);
  if (target == endpoints_.end()) throw UnknownEndpoint(msg.target);

  msg.correlation_id = ++next_correlation_[msg.sender];
  if (latency_ > 0) {
    msg.delivery_tick = msg.sent_tick + latency_;
  } else {
    msg.delivery_tick = target->second > sender->second ? msg.sent_tick : msg.sent_tick + 1;
  }
  in_flight_.push_back(msg);
  return msg;
}

std::vector<ServiceMessage> Bus::poll(const std::string& endpoint, std::uint64_t tick) {
  std::lock_guard lock(mutex_);
  if (!endpoints_.count(endpoint)) throw UnknownEndpoint(endpoint);
  std::vector<ServiceMessage> due;
  auto keep = std::stable_partition(in_flight_.begin(), in_flight_.end(), [&](const ServiceMessage& m) {
    return !(m.target == endpoint && m.delivery_tick <= tick);
  });
  std::move(keep, in_flight_.end(), std::back_inserter(due));
  in_flight_.erase(keep, in_flight_.end());
  std::sort(due.begin(), due.end(), [](const ServiceMessage& a, const ServiceMessage& b) {
    return std::tie(a.delivery_tick, a.sender, a.correlation_id) < std::tie(b.delivery_tick, b.sender, b.correlation_id);
  });
  return due;
}

std::size_t Bus::in_flight() const {
  std::lock_guard lock(mutex_);
  return in_flight_.size();
}

std::string msg_detail(const ServiceMessage& m) {
  return m.sender + "->" + m.target + ":" + m.operation + "#" + std::to_string(m.correlation_id) + "@" +
         std::to_string(m.delivery_tick);
}

ServiceMessage send_traced(Bus& bus, runtime::ScanIo& io, ServiceMessage msg) {
  msg.sent_tick = io.tick();
  auto stamped = bus.send(std::move(msg));
  io.emit("bus", RecordKind::Msg, msg_detail(stamped));
  return stamped;
}

RemoteUnitCommands::RemoteUnitCommands(Bus& bus, runtime::ScanIo& io, std::string process_ep, std::string silo_ep,
                                       components::SiloStatus initial)
    : bus_(bus), io_(io), process_ep_(std::move(process_ep)), silo_ep_(std::move(silo_ep)), status_(initial) {}

void RemoteUnitCommands::request(const char* op) {
  send_traced(bus_, io_, {MessageKind::Request, process_ep_, silo_ep_, op, {}, 0, 0, 0});
}

void RemoteUnitCommands::observe(const ServiceMessage& n) {
  if (n.sender != silo_ep_ || n.kind != MessageKind::Notification) return;
  if (n.operation == "filled") status_ = components::SiloStatus::Full;
  if (n.operation == "emptied") status_ = components::SiloStatus::Empty;
}

RemoteProcessNotifications::RemoteProcessNotifications(Bus& bus, runtime::ScanIo& io, std::string silo_ep,
                                                       std::string process_ep)
    : bus_(bus), io_(io), silo_ep_(std::move(silo_ep)), process_ep_(std::move(process_ep)) {}

void RemoteProcessNotifications::notify(const char* op, int silo_id) {
  send_traced(bus_, io_, {MessageKind::Notification, silo_ep_, process_ep_, op, {silo_id}, 0, 0, 0});
}

RemotePair make_remote_pair(Bus& bus, runtime::ScanIo& io, const std::string& silo_ep, const std::string& process_ep,
                            components::SiloStatus initial_status) {
  if (!bus.has_endpoint(silo_ep)) throw UnknownEndpoint(silo_ep);
  if (!bus.has_endpoint(process_ep)) throw UnknownEndpoint(process_ep);
  return {std::make_shared<RemoteUnitCommands>(bus, io, process_ep, silo_ep, initial_status),
          std::make_shared<RemoteProcessNotifications>(bus, io, silo_ep, process_ep)};
}

RemoteEndpoint::RemoteEndpoint(Bus& bus, std::string endpoint, std::shared_ptr<runtime::FunctionBlock> inner)
    : bus_(bus), endpoint_(std::move(endpoint)), inner_(std::move(inner)) {
  if (!bus_.has_endpoint(endpoint_)) throw UnknownEndpoint(endpoint_);
}

void RemoteEndpoint::deliver(const ServiceMessage& m) {
  if (m.kind == MessageKind::Request) {
    if (!unit_) throw std::logic_error("endpoint '" + endpoint_ + "' received a request but serves no unit");
    if (m.operation == "fill") unit_->fill();
    else if (m.operation == "empty") unit_->empty();
    else if (m.operation == "markFull") unit_->mark_full();
    else if (m.operation == "markEmpty") unit_->mark_empty();
    else throw std::invalid_argument("unknown request operation '" + m.operation + "'");
    return;
  }
  if (!process_) throw std::logic_error("endpoint '" + endpoint_ + "' received a notification but serves no process");
  for (auto* p : proxies_) p->observe(m);
  const int silo = m.args.empty() ? 0 : static_cast<int>(m.args.front());
  if (m.operation == "filled") process_->filled(silo);
  else if (m.operation == "emptied") process_->emptied(silo);
  else throw std::invalid_argument("unknown notification operation '" + m.operation + "'");
}

void RemoteEndpoint::execute(runtime::ScanIo& io) {
  for (const auto& m : bus_.poll(endpoint_, io.tick())) deliver(m);
  inner_->execute(io);
}

} // namespace siloplc::iot
