#pragma once

// Scenario configuration and assembly of the liqueur plant program.
//
// Config files are flat `key = value` lines with dotted keys and `#`
// comments. Unknown keys are errors. See scenarios/default.scn for every key.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "siloplc/bus.hpp"
#include "siloplc/ofb.hpp"
#include "siloplc/plant.hpp"
#include "siloplc/process.hpp"
#include "siloplc/resource.hpp"
#include "siloplc/runtime.hpp"
#include "siloplc/silo.hpp"
#include "siloplc/trace.hpp"

namespace siloplc::scenario {

enum class Strategy { CpController, Ofb };
enum class Mode { Local, Distributed };

const char* to_string(Strategy s);
const char* to_string(Mode m);

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ScenarioConfig {
  plant::PlantConfig plant;
  std::array<std::optional<double>, plant::kSiloCount> initial_level;
  std::array<std::optional<double>, plant::kSiloCount> initial_temperature;
  bool run_a = true;
  bool run_b = true;
  components::RecipeConfig recipe_a = components::RecipeConfig::defaults(components::Recipe::GenLiqueurA);
  components::RecipeConfig recipe_b = components::RecipeConfig::defaults(components::Recipe::GenLiqueurB);
  Strategy strategy = Strategy::CpController;
  components::ResourceVariant resource = components::ResourceVariant::Check;
  Mode mode = Mode::Local;
  std::uint64_t latency = 0;
  std::map<std::string, int> priorities = default_priorities();
  std::uint64_t max_ticks = 2000;
  int cycles = 1;

  // Processes before silos: GenLiqueurA=1, GenLiqueurB=2, S1..S4=3..6.
  static std::map<std::string, int> default_priorities();
};

// Throws ConfigError with the offending line number.
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);

// Applies one `key = value` setting; throws ConfigError.
void apply_setting(ScenarioConfig& cfg, const std::string& key, const std::string& value);

// Throws ConfigError (or plant::InvalidConfig) on the first violated rule.
void validate(const ScenarioConfig& cfg);

// Fully resolved settings, one `key = value` per line, sorted by key.
std::string canonical_text(const ScenarioConfig& cfg);
// FNV-1a 64 of canonical_text, as 16 lowercase hex digits.
std::string config_hash(const ScenarioConfig& cfg);

struct RunResult {
  Trace trace;
  bool tick_limit_exceeded = false;
  bool faulted = false;
  std::uint64_t ticks = 0;
  // 0 clean, 2 tick limit, 3 any FAULT record (takes precedence).
  int exit_code() const { return faulted ? 3 : tick_limit_exceeded ? 2 : 0; }
};

// Owns the plant, the program and every component for one scenario.
class Assembly {
 public:
  explicit Assembly(ScenarioConfig cfg);
  Assembly(const Assembly&) = delete;
  Assembly& operator=(const Assembly&) = delete;

  const ScenarioConfig& config() const { return cfg_; }
  runtime::Program& program() { return *program_; }
  const plant::PlantState& plant() const { return plant_; }
  const plant::PlantConfig& plant_config() const { return cfg_.plant; }

  const components::ProcessController* process(components::Recipe r) const;
  components::CommonResource& pipe() { return *pipe_; }
  components::CommonResource& power() { return *power_; }
  iot::Bus* bus() { return bus_.get(); }

  bool all_done() const;
  std::vector<TraceRecord> run_scan();
  // Runs until every enabled recipe is Done or max_ticks scans have run.
  RunResult run();

 private:
  ScenarioConfig cfg_;
  plant::PlantState plant_;
  std::unique_ptr<runtime::Program> program_;
  std::unique_ptr<components::CommonResource> pipe_;
  std::unique_ptr<components::CommonResource> power_;
  std::unique_ptr<iot::Bus> bus_;
  std::vector<std::shared_ptr<void>> keep_alive_;
  std::map<components::Recipe, std::shared_ptr<components::ProcessController>> processes_;
};

RunResult run_scenario(const ScenarioConfig& cfg);

} // namespace siloplc::scenario
