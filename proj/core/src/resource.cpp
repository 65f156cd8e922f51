#include "siloplc/resource.hpp"

namespace siloplc::components {

using statechart::Event;

const char* to_string(AcquireResult r) { return r == AcquireResult::Granted ? "Granted" : "Denied"; }

const char* to_string(ResourceVariant v) { return v == ResourceVariant::Check ? "check" : "monitor"; }

std::optional<ResourceVariant> parse_resource_variant(const std::string& s) {
  if (s == "check") return ResourceVariant::Check;
  if (s == "monitor") return ResourceVariant::Monitor;
  return std::nullopt;
}

std::shared_ptr<const ResourceMachineDef> resource_machine_definition() {
  static const auto def = [] {
    auto d = std::make_shared<ResourceMachineDef>();
    d->name = "CommonResource";
    d->states = {"FREE", "ACQUIRED"};
    d->initial = {{{}, {}, "FREE"}};
    d->transitions = {
        {"FREE", "acquire", {}, {{"setHolder", [](ResourceContext& c, const Event&) { c.holder = c.request; }}},
         "ACQUIRED"},
        {"ACQUIRED", "release", [](const ResourceContext& c, const Event&) { return c.request == c.holder; },
         {{"clearHolder", [](ResourceContext& c, const Event&) { c.holder.clear(); }}}, "FREE"},
    };
    return std::shared_ptr<const ResourceMachineDef>(std::move(d));
  }();
  return def;
}

CheckedResource::CheckedResource(std::string name)
    : name_(std::move(name)), machine_(resource_machine_definition(), ResourceContext{}) {}

AcquireResult CheckedResource::try_acquire(const std::string& requester) {
  if (requester.empty()) throw std::invalid_argument("requester id must not be empty");
  if (!available()) return AcquireResult::Denied;
  machine_.context().request = requester;
  machine_.dispatch(Event{"acquire"});
  return AcquireResult::Granted;
}

void CheckedResource::release(const std::string& requester) {
  machine_.context().request = requester;
  if (!machine_.dispatch(Event{"release"}).fired) throw NotHolder(name_, requester);
}

ResourceState CheckedResource::state() const { return available() ? ResourceState::Free : ResourceState::Acquired; }

std::optional<std::string> CheckedResource::holder() const {
  if (available()) return std::nullopt;
  return machine_.context().holder;
}

AcquireResult MonitorResource::try_acquire(const std::string& requester) {
  std::lock_guard lock(mutex_);
  return core_.try_acquire(requester);
}

void MonitorResource::release(const std::string& requester) {
  std::lock_guard lock(mutex_);
  core_.release(requester);
}

ResourceState MonitorResource::state() const {
  std::lock_guard lock(mutex_);
  return core_.state();
}

std::optional<std::string> MonitorResource::holder() const {
  std::lock_guard lock(mutex_);
  return core_.holder();
}

std::unique_ptr<CommonResource> make_resource(std::string name, ResourceVariant variant) {
  if (variant == ResourceVariant::Monitor) return std::make_unique<MonitorResource>(std::move(name));
  return std::make_unique<CheckedResource>(std::move(name));
}

} // namespace siloplc::components
