#pragma once

// Trace files and the checks run over them.
//
// A trace file starts with `# siloplc-trace v1`, followed by further `#`
// header lines and then one record per line:
// `<tick>\t<source>\t<kind>\t<detail>\n`.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "siloplc/scenario.hpp"
#include "siloplc/trace.hpp"

namespace siloplc::tools {

inline constexpr const char* kTraceVersionLine = "# siloplc-trace v1";

class MalformedTrace : public std::runtime_error {
 public:
  MalformedTrace(std::size_t line, const std::string& why)
      : std::runtime_error("line " + std::to_string(line) + ": " + why), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct TraceFile {
  std::vector<std::string> header; // without the leading "# "
  std::vector<TraceRecord> records;
};

std::string render_trace_file(const scenario::ScenarioConfig& cfg, const Trace& trace);
void write_trace_file(const std::string& path, const scenario::ScenarioConfig& cfg, const Trace& trace);

// Throws MalformedTrace on a bad version line, a bad record or ticks that go
// backwards.
TraceFile parse_trace(const std::string& text);
TraceFile read_trace_file(const std::string& path);

struct CheckResult {
  std::string name;
  bool pass = true;
  std::string message; // first violation
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_pass() const;
};

// Replays ACT and RES records into valve, mixer and resource-holder state
// and checks it at the end of every tick:
//   sortedness, pipe-exclusion, power-exclusion, valve-pair, resource-honesty,
//   no-overflow.
VerifyReport verify_trace(const std::vector<TraceRecord>& records);

struct CompareResult {
  bool identical = true;
  std::size_t index = 0; // position in the filtered sequences
  std::optional<TraceRecord> a;
  std::optional<TraceRecord> b;
  std::vector<TraceRecord> context; // records preceding the divergence
};

// Compares the subsequences whose kind is in `kinds` (all kinds when empty).
CompareResult compare_traces(const std::vector<TraceRecord>& a, const std::vector<TraceRecord>& b,
                             const std::set<RecordKind>& kinds);

// "ACT,STATE" -> {Act, State}; throws std::invalid_argument on unknown kinds.
std::set<RecordKind> parse_kind_filter(const std::string& csv);

struct RunOptions {
  std::string scenario_path;
  std::string out_path;
  std::optional<std::uint64_t> ticks;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> latency;
  std::optional<std::string> strategy;
  std::optional<std::string> resource;
  std::optional<int> cycles;
};

// Command entry points shared by the CLI and tests. Return the exit status.
//   run:            0 clean, 1 config error, 2 tick limit, 3 FAULT, 4 runtime error
//   verify-trace:   0 all pass, 1 malformed, 3 a check failed
//   compare-traces: 0 identical, 1 malformed, 3 diverged
int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_verify(const std::string& path, std::ostream& out, std::ostream& err);
int cmd_compare(const std::string& a, const std::string& b, const std::string& filter, std::ostream& out,
                std::ostream& err);

} // namespace siloplc::tools
