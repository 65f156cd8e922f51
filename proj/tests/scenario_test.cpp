#include <gtest/gtest.h>

#include "siloplc/scenario.hpp"

using namespace siloplc;
using namespace siloplc::scenario;

TEST(ScenarioParse, DefaultFileMatchesBuiltInDefaults) {
  const auto cfg = load_scenario(std::string(SILOPLC_SCENARIO_DIR) + "/default.scn");
  EXPECT_EQ(canonical_text(cfg), canonical_text(ScenarioConfig{}));
  EXPECT_EQ(config_hash(cfg), config_hash(ScenarioConfig{}));
}

TEST(ScenarioParse, SettingsAndComments) {
  const auto cfg = parse_scenario(
      "# comment\n"
      "plant.fill_rate = 12.5  # trailing\n"
      "silo.4.level = 30\n"
      "recipes = B\n"
      "recipe.GenLiqueurB.mix_ticks = 99\n"
      "strategy = ofb\n"
      "resource = monitor\n"
      "mode = distributed\n"
      "latency = 2\n"
      "priority.S1 = 10\n"
      "cycles = 3\n");
  EXPECT_EQ(cfg.plant.fill_rate, 12.5);
  EXPECT_EQ(cfg.initial_level[3], 30.0);
  EXPECT_FALSE(cfg.run_a);
  EXPECT_TRUE(cfg.run_b);
  EXPECT_EQ(cfg.recipe_b.mix_ticks, 99u);
  EXPECT_EQ(cfg.strategy, Strategy::Ofb);
  EXPECT_EQ(cfg.resource, components::ResourceVariant::Monitor);
  EXPECT_EQ(cfg.mode, Mode::Distributed);
  EXPECT_EQ(cfg.latency, 2u);
  EXPECT_EQ(cfg.priorities.at("S1"), 10);
  EXPECT_EQ(cfg.cycles, 3);
}

TEST(ScenarioParse, ErrorsCarryLineNumbers) {
  auto message = [](const std::string& text) {
    try {
      parse_scenario(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("\nbogus = 1\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("strategy = cp\nstrategy = ofb\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("plant.dt = abc\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("no equals sign\n").find("line 1"), std::string::npos);
  EXPECT_EQ(message("recipe.GenLiqueurB.process_ticks = 5\n").find("no error"), std::string::npos);
}

TEST(ScenarioValidate, Rules) {
  ScenarioConfig cfg;
  cfg.priorities["S1"] = 1; // same as GenLiqueurA
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg = {};
  cfg.max_ticks = 0;
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg = {};
  cfg.cycles = 0;
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg = {};
  cfg.initial_level[0] = 150;
  EXPECT_THROW(validate(cfg), ConfigError);
  EXPECT_NO_THROW(validate(ScenarioConfig{}));
}

TEST(ScenarioHash, ChangesWithConfig) {
  ScenarioConfig a, b;
  b.plant.heat_rate = 2.5;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  EXPECT_EQ(config_hash(a), config_hash(ScenarioConfig{}));
}

TEST(ScenarioRun, DefaultCompletes) {
  const auto r = run_scenario(ScenarioConfig{});
  EXPECT_EQ(r.exit_code(), 0);
  EXPECT_LT(r.ticks, 2000u);
}

TEST(ScenarioRun, TickLimitGivesExitTwoWithPartialTrace) {
  ScenarioConfig cfg;
  cfg.max_ticks = 10;
  const auto r = run_scenario(cfg);
  EXPECT_EQ(r.exit_code(), 2);
  EXPECT_FALSE(r.trace.records.empty());
  EXPECT_LT(r.trace.records.back().tick, 10u);
}

// Starting S1 half full makes GenLiqueurA fill into a silo that the silo
// machine considers Empty; nothing overflows or faults.
TEST(ScenarioRun, PartialInitialLevel) {
  ScenarioConfig cfg;
  cfg.initial_level[0] = 50;
  const auto r = run_scenario(cfg);
  EXPECT_EQ(r.exit_code(), 0);
}

// S4 starting full is reported Full by its transitory initial state; the
// transfer into it then cannot start and the run hits the tick limit.
TEST(ScenarioRun, FullDestinationBlocks) {
  ScenarioConfig cfg;
  cfg.initial_level[3] = 100;
  cfg.run_b = false;
  cfg.max_ticks = 800;
  const auto r = run_scenario(cfg);
  EXPECT_FALSE(r.faulted);
  EXPECT_EQ(r.exit_code(), 2);
}

TEST(ScenarioRun, FaultTakesPrecedence) {
  RunResult r;
  r.faulted = true;
  r.tick_limit_exceeded = true;
  EXPECT_EQ(r.exit_code(), 3);
}

TEST(ScenarioRun, SwappedPrioritiesStillSafe) {
  ScenarioConfig cfg;
  cfg.priorities = {{"S1", 1}, {"S2", 2}, {"S3", 3}, {"S4", 4}, {"GenLiqueurA", 5}, {"GenLiqueurB", 6}};
  const auto r = run_scenario(cfg);
  EXPECT_EQ(r.exit_code(), 0);
}

// With a 10 L heel in S4 the destination trips F after 85 L, before S1
// drains, so the transfer ends on filled(4) and S1 is marked empty.
TEST(ScenarioRun, TransferEndsOnDestinationFull) {
  ScenarioConfig cfg;
  cfg.initial_level[3] = 10;
  cfg.run_b = false;
  const auto r = run_scenario(cfg);
  EXPECT_EQ(r.exit_code(), 0);
  bool mark_empty = false, s4_full = false;
  for (const auto& rec : r.trace.records) {
    if (rec.source == "S1" && rec.kind == RecordKind::Evt && rec.detail == "markEmpty") mark_empty = true;
    if (rec.source == "S4" && rec.kind == RecordKind::State && rec.detail == "Filling->Full") s4_full = true;
  }
  EXPECT_TRUE(mark_empty);
  EXPECT_TRUE(s4_full);
}
