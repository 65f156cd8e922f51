#pragma once

// FREE/ACQUIRED arbiters for the shared pipe and the mixer power budget.
//
// CheckedResource is the single-thread variant: callers test availability
// and take the resource in the same scan, with no synchronization.
// MonitorResource wraps the same logic in a monitor so that concurrent
// callers see an atomic grant.

#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>

#include "siloplc/statechart.hpp"

namespace siloplc::components {

enum class AcquireResult { Granted, Denied };
enum class ResourceState { Free, Acquired };
enum class ResourceVariant { Check, Monitor };

const char* to_string(AcquireResult r);
const char* to_string(ResourceVariant v);
std::optional<ResourceVariant> parse_resource_variant(const std::string& s);

class NotHolder : public std::logic_error {
 public:
  NotHolder(const std::string& resource, const std::string& requester)
      : std::logic_error("'" + requester + "' does not hold " + resource) {}
};

class CommonResource {
 public:
  virtual ~CommonResource() = default;

  virtual const std::string& name() const = 0;
  virtual ResourceVariant variant() const = 0;
  // No queuing: a Denied caller retries on a later scan.
  virtual AcquireResult try_acquire(const std::string& requester) = 0;
  // Throws NotHolder unless `requester` currently holds the resource.
  virtual void release(const std::string& requester) = 0;
  virtual ResourceState state() const = 0;
  virtual std::optional<std::string> holder() const = 0;
};

struct ResourceContext {
  std::string holder;
  std::string request;
};

using ResourceMachineDef = statechart::StatechartDef<ResourceContext>;

std::shared_ptr<const ResourceMachineDef> resource_machine_definition();

class CheckedResource : public CommonResource {
 public:
  explicit CheckedResource(std::string name);

  const std::string& name() const override { return name_; }
  ResourceVariant variant() const override { return ResourceVariant::Check; }
  bool available() const { return machine_.current() == "FREE"; }
  AcquireResult try_acquire(const std::string& requester) override;
  void release(const std::string& requester) override;
  ResourceState state() const override;
  std::optional<std::string> holder() const override;

 private:
  std::string name_;
  statechart::MachineInstance<ResourceContext> machine_;
};

class MonitorResource : public CommonResource {
 public:
  explicit MonitorResource(std::string name) : core_(std::move(name)) {}

  const std::string& name() const override { return core_.name(); }
  ResourceVariant variant() const override { return ResourceVariant::Monitor; }
  AcquireResult try_acquire(const std::string& requester) override;
  void release(const std::string& requester) override;
  ResourceState state() const override;
  std::optional<std::string> holder() const override;

 private:
  mutable std::mutex mutex_;
  CheckedResource core_;
};

std::unique_ptr<CommonResource> make_resource(std::string name, ResourceVariant variant);

} // namespace siloplc::components
