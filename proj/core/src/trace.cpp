#include "siloplc/trace.hpp"

#include <array>
#include <cstdio>
#include <utility>

namespace siloplc {

namespace {
constexpr std::array<std::pair<RecordKind, const char*>, 6> kKindNames{{
    {RecordKind::Evt, "EVT"},
    {RecordKind::Act, "ACT"},
    {RecordKind::State, "STATE"},
    {RecordKind::Msg, "MSG"},
    {RecordKind::Res, "RES"},
    {RecordKind::Fault, "FAULT"},
}};
} // namespace

const char* to_string(RecordKind k) {
  for (const auto& [kind, name] : kKindNames) {
    if (kind == k) return name;
  }
  return "?";
}

std::optional<RecordKind> parse_record_kind(std::string_view s) {
  for (const auto& [kind, name] : kKindNames) {
    if (s == name) return kind;
  }
  return std::nullopt;
}

std::string format_record(const TraceRecord& r) {
  std::string line = std::to_string(r.tick);
  line += '\t';
  line += r.source;
  line += '\t';
  line += to_string(r.kind);
  line += '\t';
  line += r.detail;
  line += '\n';
  return line;
}

std::string format_decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

} // namespace siloplc
