#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace siloplc {

enum class RecordKind { Evt, Act, State, Msg, Res, Fault };

const char* to_string(RecordKind k);
std::optional<RecordKind> parse_record_kind(std::string_view s);

struct TraceRecord {
  std::uint64_t tick = 0;
  std::string source;
  RecordKind kind = RecordKind::Evt;
  std::string detail;
  // Priority of the instance executing when the record was emitted. Not part
  // of the serialized form.
  int slot = 0;

  friend bool operator==(const TraceRecord& a, const TraceRecord& b) {
    return a.tick == b.tick && a.source == b.source && a.kind == b.kind && a.detail == b.detail;
  }
};

struct Trace {
  std::vector<TraceRecord> records;
};

// `<tick>\t<source>\t<kind>\t<detail>\n`
std::string format_record(const TraceRecord& r);

// Fixed six decimals, the only float rendering used in trace output.
std::string format_decimal(double v);

} // namespace siloplc
