// siloplc: run a plant scenario, verify a trace, or compare two traces.

#include <iostream>

#include <CLI11.hpp>

#include "siloplc/trace_tools.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Soft-PLC scan-cycle runtime for the four-silo liqueur plant"};
  app.require_subcommand(1);

  siloplc::tools::RunOptions run;
  std::uint64_t ticks = 0, latency = 0;
  std::string mode, strategy, resource;
  int cycles = 1;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write its trace");
  run_cmd->add_option("--scenario", run.scenario_path, "Scenario config file")->required();
  run_cmd->add_option("--out", run.out_path, "Trace output file")->required();
  auto* o_ticks = run_cmd->add_option("--ticks", ticks, "Scan limit")->check(CLI::PositiveNumber);
  auto* o_mode = run_cmd->add_option("--mode", mode, "local|distributed");
  auto* o_latency = run_cmd->add_option("--latency", latency, "Bus latency in ticks");
  auto* o_strategy = run_cmd->add_option("--strategy", strategy, "cp|ofb");
  auto* o_resource = run_cmd->add_option("--resource", resource, "check|monitor");
  auto* o_cycles = run_cmd->add_option("--cycles", cycles, "Batches per recipe");

  std::string verify_path;
  auto* verify_cmd = app.add_subcommand("verify-trace", "Check the safety properties of a trace");
  verify_cmd->add_option("file", verify_path)->required();

  std::string a, b, filter;
  auto* compare_cmd = app.add_subcommand("compare-traces", "Report the first divergence of two traces");
  compare_cmd->add_option("a", a)->required();
  compare_cmd->add_option("b", b)->required();
  compare_cmd->add_option("--filter", filter, "Record kinds to compare, e.g. ACT,STATE");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (*run_cmd) {
    if (*o_ticks) run.ticks = ticks;
    if (*o_mode) run.mode = mode;
    if (*o_latency) run.latency = latency;
    if (*o_strategy) run.strategy = strategy;
    if (*o_resource) run.resource = resource;
    if (*o_cycles) run.cycles = cycles;
    return siloplc::tools::cmd_run(run, std::cout, std::cerr);
  }
  if (*verify_cmd) return siloplc::tools::cmd_verify(verify_path, std::cout, std::cerr);
  return siloplc::tools::cmd_compare(a, b, filter, std::cout, std::cerr);
}
