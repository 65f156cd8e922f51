#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "siloplc/trace_tools.hpp"

using namespace siloplc;
using namespace siloplc::tools;

namespace {

TraceRecord rec(std::uint64_t tick, std::string src, RecordKind k, std::string detail) {
  return {tick, std::move(src), k, std::move(detail), 0};
}

const CheckResult& check(const VerifyReport& r, const std::string& name) {
  for (const auto& c : r.checks) {
    if (c.name == name) return c;
  }
  throw std::out_of_range(name);
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("siloplc_test_" + name)).string();
}

} // namespace

TEST(TraceFile, RoundTrip) {
  scenario::ScenarioConfig cfg;
  const auto result = scenario::run_scenario(cfg);
  const auto text = render_trace_file(cfg, result.trace);
  EXPECT_EQ(text.rfind("# siloplc-trace v1\n# config fnv1a64:", 0), 0u);
  const auto parsed = parse_trace(text);
  EXPECT_EQ(parsed.records, result.trace.records);
  ASSERT_EQ(parsed.header.size(), 1u);
  EXPECT_EQ(parsed.header[0], "config fnv1a64:" + scenario::config_hash(cfg));
}

TEST(TraceFile, Malformed) {
  EXPECT_THROW(parse_trace(""), MalformedTrace);
  EXPECT_THROW(parse_trace("0\tS1\tACT\topenINValve\n"), MalformedTrace);
  EXPECT_THROW(parse_trace("# siloplc-trace v1\n0\tS1\tACT\n"), MalformedTrace);
  EXPECT_THROW(parse_trace("# siloplc-trace v1\nx\tS1\tACT\topenINValve\n"), MalformedTrace);
  EXPECT_THROW(parse_trace("# siloplc-trace v1\n0\tS1\tNOPE\topenINValve\n"), MalformedTrace);
  try {
    parse_trace("# siloplc-trace v1\n5\tS1\tACT\topenINValve\n4\tS1\tACT\tcloseINValve\n");
    FAIL() << "out-of-order ticks accepted";
  } catch (const MalformedTrace& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Verify, DefaultRunPasses) {
  const auto r = verify_trace(scenario::run_scenario({}).trace.records);
  for (const auto& c : r.checks) EXPECT_TRUE(c.pass) << c.name << ": " << c.message;
  EXPECT_EQ(r.checks.size(), 6u);
}

TEST(Verify, BothMixersAtTickSeven) {
  const std::vector<TraceRecord> rs{
      rec(7, "power", RecordKind::Res, "Granted power GenLiqueurB"),
      rec(7, "S3", RecordKind::Act, "startMixer"),
      rec(7, "S4", RecordKind::Act, "startMixer"),
  };
  const auto r = verify_trace(rs);
  EXPECT_FALSE(r.all_pass());
  EXPECT_FALSE(check(r, "power-exclusion").pass);
  EXPECT_NE(check(r, "power-exclusion").message.find("tick 7"), std::string::npos);
}

TEST(Verify, OpenRouteWithoutPipe) {
  const std::vector<TraceRecord> rs{
      rec(3, "S1", RecordKind::Act, "openOUTValve"),
      rec(3, "S4", RecordKind::Act, "openINValve"),
  };
  const auto r = verify_trace(rs);
  EXPECT_FALSE(check(r, "resource-honesty").pass);
  EXPECT_TRUE(check(r, "pipe-exclusion").pass);
}

TEST(Verify, RouteConflictAndValvePair) {
  const std::vector<TraceRecord> rs{
      rec(1, "pipe", RecordKind::Res, "Granted pipe A"),
      rec(1, "S1", RecordKind::Act, "openOUTValve"),
      rec(1, "S4", RecordKind::Act, "openINValve"),
      rec(2, "S2", RecordKind::Act, "openOUTValve"),
      rec(2, "S3", RecordKind::Act, "openINValve"),
      rec(3, "S2", RecordKind::Act, "closeOUTValve"),
      rec(3, "S3", RecordKind::Act, "closeINValve"),
      rec(4, "S1", RecordKind::Act, "openINValve"),
  };
  const auto r = verify_trace(rs);
  EXPECT_FALSE(check(r, "pipe-exclusion").pass);
  EXPECT_NE(check(r, "pipe-exclusion").message.find("tick 2"), std::string::npos);
  EXPECT_FALSE(check(r, "valve-pair").pass);
  EXPECT_NE(check(r, "valve-pair").message.find("tick 4"), std::string::npos);
}

TEST(Verify, FaultRecordsFail) {
  const std::vector<TraceRecord> rs{rec(9, "plant", RecordKind::Fault, "Overflow S2 level=100.000000")};
  const auto r = verify_trace(rs);
  EXPECT_FALSE(check(r, "no-overflow").pass);
  EXPECT_TRUE(check(r, "pipe-exclusion").pass);
}

TEST(Verify, ReleaseByNonHolder) {
  const std::vector<TraceRecord> rs{rec(1, "pipe", RecordKind::Res, "Granted pipe A"),
                                    rec(2, "pipe", RecordKind::Res, "Released pipe B")};
  EXPECT_FALSE(check(verify_trace(rs), "resource-honesty").pass);
}

TEST(Compare, FilterAndDivergence) {
  const std::vector<TraceRecord> a{rec(0, "S1", RecordKind::Act, "openINValve"), rec(0, "S1", RecordKind::Evt, "fill"),
                                   rec(5, "S1", RecordKind::Act, "closeINValve")};
  std::vector<TraceRecord> b = a;
  b[1].detail = "fill ignored";
  EXPECT_TRUE(compare_traces(a, b, {RecordKind::Act}).identical);
  const auto res = compare_traces(a, b, {});
  EXPECT_FALSE(res.identical);
  EXPECT_EQ(res.index, 1u);
  ASSERT_EQ(res.context.size(), 1u);
  b.pop_back();
  const auto shorter = compare_traces(a, b, {RecordKind::Act});
  EXPECT_FALSE(shorter.identical);
  EXPECT_FALSE(shorter.b);
  EXPECT_EQ(parse_kind_filter("ACT,STATE"), (std::set<RecordKind>{RecordKind::Act, RecordKind::State}));
  EXPECT_THROW(parse_kind_filter("ACT,BOGUS"), std::invalid_argument);
}

// With latency 5 every request reaches its silo five scans late, so the
// first actuator command already differs.
TEST(Compare, LatencyFiveDivergesAtFirstCommand) {
  scenario::ScenarioConfig local, remote;
  remote.mode = scenario::Mode::Distributed;
  remote.latency = 5;
  const auto a = scenario::run_scenario(local).trace.records;
  const auto b = scenario::run_scenario(remote).trace.records;
  const auto res = compare_traces(a, b, {RecordKind::Act});
  ASSERT_FALSE(res.identical);
  EXPECT_EQ(res.index, 0u);
  ASSERT_TRUE(res.a && res.b);
  EXPECT_EQ(res.a->tick, 0u);
  EXPECT_EQ(res.b->tick, 5u);
  EXPECT_EQ(res.a->detail, res.b->detail);
}

TEST(Commands, RunVerifyCompareExitCodes) {
  const std::string scn = std::string(SILOPLC_SCENARIO_DIR) + "/default.scn";
  const auto t1 = temp_path("a.trace"), t2 = temp_path("b.trace"), t3 = temp_path("c.trace");
  std::ostringstream out, err;
  RunOptions o;
  o.scenario_path = scn;
  o.out_path = t1;
  EXPECT_EQ(cmd_run(o, out, err), 0);
  o.out_path = t2;
  o.strategy = "ofb";
  EXPECT_EQ(cmd_run(o, out, err), 0);
  EXPECT_EQ(cmd_verify(t1, out, err), 0);
  EXPECT_EQ(cmd_compare(t1, t2, "ACT", out, err), 0);
  EXPECT_EQ(cmd_compare(t1, t2, "BOGUS", out, err), 1);

  o.strategy.reset();
  o.out_path = t3;
  o.ticks = 10;
  EXPECT_EQ(cmd_run(o, out, err), 2);
  EXPECT_TRUE(std::filesystem::exists(t3));
  EXPECT_EQ(cmd_verify(t3, out, err), 0);
  EXPECT_EQ(cmd_compare(t1, t3, "", out, err), 3);

  o.ticks.reset();
  o.mode = "sideways";
  EXPECT_EQ(cmd_run(o, out, err), 1);

  const auto dup = temp_path("dup.scn");
  std::ofstream(dup) << "priority.S1 = 1\n";
  RunOptions d;
  d.scenario_path = dup;
  d.out_path = t3;
  EXPECT_EQ(cmd_run(d, out, err), 1);

  const auto bad = temp_path("bad.trace");
  std::ofstream(bad) << "# siloplc-trace v1\n5\tS1\tACT\tx\n4\tS1\tACT\ty\n";
  EXPECT_EQ(cmd_verify(bad, out, err), 1);

  const auto unsafe = temp_path("unsafe.trace");
  std::ofstream(unsafe) << "# siloplc-trace v1\n7\tS3\tACT\tstartMixer\n7\tS4\tACT\tstartMixer\n";
  EXPECT_EQ(cmd_verify(unsafe, out, err), 3);
}

// Every variant of randomized plants yields a trace the checker accepts.
TEST(VerifyProperty, RandomConfigsAllVariants) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> rate(5, 20), e(1, 10), f(60, 95);
  std::uniform_int_distribution<std::uint64_t> dur(50, 500), lat(0, 6);
  std::bernoulli_distribution coin(0.5);
  for (int i = 0; i < 40; ++i) {
    scenario::ScenarioConfig c;
    c.plant.fill_rate = rate(rng);
    c.plant.pipe_rate = rate(rng);
    c.plant.drain_rate = rate(rng);
    c.plant.e_threshold = e(rng);
    c.plant.f_threshold = f(rng);
    c.recipe_a.process_ticks = dur(rng);
    c.recipe_a.mix_ticks = dur(rng);
    c.recipe_b.mix_ticks = dur(rng);
    c.strategy = coin(rng) ? scenario::Strategy::Ofb : scenario::Strategy::CpController;
    c.resource = coin(rng) ? components::ResourceVariant::Monitor : components::ResourceVariant::Check;
    c.mode = coin(rng) ? scenario::Mode::Distributed : scenario::Mode::Local;
    c.latency = c.mode == scenario::Mode::Distributed ? lat(rng) : 0;
    c.cycles = coin(rng) ? 2 : 1;
    c.max_ticks = 40000;
    const auto r = scenario::run_scenario(c);
    ASSERT_EQ(r.exit_code(), 0) << "config " << i << "\n" << scenario::canonical_text(c);
    const auto report = verify_trace(r.trace.records);
    for (const auto& chk : report.checks) {
      EXPECT_TRUE(chk.pass) << "config " << i << " " << chk.name << ": " << chk.message;
    }
  }
}
