#pragma once

// «processController» components for the two liqueur recipes.
//
// GenLiqueurA: FillS1 -> ProcessS1 -> AwaitPipe -> Transfer(S1->S4) ->
//   ReleasePipe -> HeatS4 -> AwaitPower -> MixS4 -> ReleasePower -> EmptyS4
// GenLiqueurB: FillS2 -> HeatS2 -> AwaitPipe -> Transfer(S2->S3) ->
//   ReleasePipe -> AwaitPower -> MixS3 -> ReleasePower -> EmptyS3
//
// Both start in Idle and finish in Done. A transfer ends on the source's
// emptied notification (destination then gets mark_full) or, if the
// destination trips its high-level sensor first, on its filled notification
// (source then gets mark_empty).

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "siloplc/resource.hpp"
#include "siloplc/runtime.hpp"
#include "siloplc/silo.hpp"
#include "siloplc/statechart.hpp"

namespace siloplc::components {

enum class Recipe { GenLiqueurA, GenLiqueurB };

const char* to_string(Recipe r);

struct RecipeConfig {
  Recipe recipe = Recipe::GenLiqueurA;
  std::uint64_t process_ticks = 150; // GenLiqueurA basic process in S1
  double heat_target = 50.0;         // degC
  std::uint64_t mix_ticks = 200;
  int cycles = 1;                    // batches before Done

  static RecipeConfig defaults(Recipe r);
};

// Silos a recipe touches, in the order (source, destination).
struct RecipeSilos {
  int source;
  int destination;
};
RecipeSilos silos_of(Recipe r);

namespace phase {
struct Fill { int silo; };
struct Timed { std::string name; std::uint64_t ticks; };
struct Heat { int silo; double target; };
struct Transfer { int src; int dst; };
struct Mix { int silo; std::uint64_t ticks; };
struct Empty { int silo; };
} // namespace phase

using PhaseStep = std::variant<phase::Fill, phase::Timed, phase::Heat, phase::Transfer, phase::Mix, phase::Empty>;

std::vector<PhaseStep> phase_steps(const RecipeConfig& cfg);

struct ProcessWiring {
  std::map<int, Process2UnitControlerIf*> units; // by silo id
  std::map<int, SiloDriverIf*> devices;          // heater/mixer access by silo id
  CommonResource* pipe = nullptr;
  CommonResource* power = nullptr;
};

class ProcessController;

struct ProcessContext {
  ProcessController* owner = nullptr;
};

using ProcessMachine = statechart::MachineInstance<ProcessContext>;
using ProcessMachineDef = statechart::StatechartDef<ProcessContext>;

// What the FB body checks each scan to raise an internal event for the
// current phase.
struct PhaseCondition {
  enum class Kind { None, Start, Timer, Temperature, Acquire };
  Kind kind = Kind::None;
  int silo = 0;
  double target = 0.0;
  CommonResource* resource = nullptr;
};

class ProcessController : public runtime::FunctionBlock, public Silo2ProcessIf {
 public:
  ProcessController(std::string id, RecipeConfig cfg, ProcessWiring wiring, runtime::ScanIo& io);

  const std::string& id() const { return id_; }
  const RecipeConfig& config() const { return cfg_; }
  const std::string& phase() const { return machine_->current(); }
  bool done() const { return phase() == "Done"; }
  int batches_completed() const { return batches_completed_; }
  const ProcessMachineDef& definition() const { return *def_; }

  void filled(int silo_id) override { notifications_.emplace_back("filled", silo_id); }
  void emptied(int silo_id) override { notifications_.emplace_back("emptied", silo_id); }

  // One scan: consume queued notifications, then raise timer, temperature and
  // acquisition events for the current phase until none applies.
  void execute(runtime::ScanIo& io) override;

  // Used by the actions of the recipe machine.
  Process2UnitControlerIf& unit(int silo) const;
  SiloDriverIf& device(int silo) const;
  void start_timer(std::uint64_t ticks) { deadline_ = io_.tick() + ticks; }
  void release(CommonResource& r);
  void count_batch() { ++batches_completed_; }

 private:
  std::optional<statechart::Event> condition_event(std::string& note);

  std::string id_;
  RecipeConfig cfg_;
  ProcessWiring wiring_;
  runtime::ScanIo& io_;
  std::shared_ptr<const ProcessMachineDef> def_;
  std::map<std::string, PhaseCondition> conditions_;
  std::unique_ptr<ProcessMachine> machine_;
  std::deque<statechart::Event> notifications_;
  std::uint64_t deadline_ = 0;
  int batches_completed_ = 0;
};

} // namespace siloplc::components
