#include "siloplc/trace_tools.hpp"

#include <array>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace siloplc::tools {

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

bool parse_tick(const std::string& s, std::uint64_t& out) {
  if (s.empty() || s.size() > 19 || s.find_first_not_of("0123456789") != std::string::npos) return false;
  out = std::stoull(s);
  return true;
}

// Valve, mixer and resource-holder state rebuilt from records.
class Replay {
 public:
  explicit Replay(VerifyReport& report) : report_(report) {
    for (const char* name : {"sortedness", "pipe-exclusion", "power-exclusion", "valve-pair", "resource-honesty",
                             "no-overflow"}) {
      report_.checks.push_back({name, true, {}});
    }
  }

  void record(const TraceRecord& r) {
    if (r.tick != tick_) {
      end_of_tick();
      tick_ = r.tick;
    }
    switch (r.kind) {
      case RecordKind::Act: act(r); break;
      case RecordKind::Res: res(r); break;
      case RecordKind::Fault: fault(r); break;
      default: break;
    }
  }

  void finish() { end_of_tick(); }

 private:
  struct Silo {
    bool in = false, out = false, mixer = false;
    std::string in_owner, out_owner, mixer_owner;
  };

  void fail(const char* check, const std::string& msg) {
    for (auto& c : report_.checks) {
      if (c.name == check && c.pass) {
        c.pass = false;
        c.message = msg;
      }
    }
  }

  std::string at(std::uint64_t tick) const { return "tick " + std::to_string(tick) + ": "; }

  void act(const TraceRecord& r) {
    if (r.source.size() != 2 || r.source[0] != 'S' || r.source[1] < '1' || r.source[1] > '4') return;
    const int id = r.source[1] - '0';
    auto& s = silos_[static_cast<std::size_t>(id - 1)];
    const auto& d = r.detail;
    const bool pipe_valve = (d == "openOUTValve" && (id == 1 || id == 2)) || (d == "openINValve" && (id == 3 || id == 4));
    if (pipe_valve && pipe_holder_.empty()) fail("resource-honesty", at(r.tick) + r.source + " " + d + " while pipe is FREE");
    if (d == "startMixer" && power_holder_.empty()) {
      fail("resource-honesty", at(r.tick) + r.source + " startMixer while power is FREE");
    }
    if (d == "openINValve") {
      s.in = true;
      s.in_owner = pipe_holder_;
    } else if (d == "closeINValve") {
      s.in = false;
    } else if (d == "openOUTValve") {
      s.out = true;
      s.out_owner = pipe_holder_;
    } else if (d == "closeOUTValve") {
      s.out = false;
    } else if (d == "startMixer") {
      s.mixer = true;
      s.mixer_owner = power_holder_;
    } else if (d == "stopMixer") {
      s.mixer = false;
    }
  }

  void res(const TraceRecord& r) {
    std::istringstream in(r.detail);
    std::string verb, resource, requester;
    in >> verb >> resource >> requester;
    std::string* holder = resource == "pipe" ? &pipe_holder_ : resource == "power" ? &power_holder_ : nullptr;
    if (!holder) return;
    if (verb == "Granted") {
      if (!holder->empty()) fail("resource-honesty", at(r.tick) + resource + " granted to " + requester + " while held by " + *holder);
      *holder = requester;
    } else if (verb == "Released") {
      if (*holder != requester) fail("resource-honesty", at(r.tick) + requester + " released " + resource + " it does not hold");
      holder->clear();
    }
  }

  void fault(const TraceRecord& r) {
    if (r.detail.rfind("PipeConflict", 0) == 0) fail("pipe-exclusion", at(r.tick) + "FAULT " + r.detail);
    if (r.detail.rfind("PowerViolation", 0) == 0) fail("power-exclusion", at(r.tick) + "FAULT " + r.detail);
    if (r.detail.rfind("Overflow", 0) == 0) fail("no-overflow", at(r.tick) + "FAULT " + r.detail);
  }

  void route(int src, int dst) {
    const auto& s = silos_[static_cast<std::size_t>(src - 1)];
    const auto& d = silos_[static_cast<std::size_t>(dst - 1)];
    if (!(s.out && d.in)) return;
    if (pipe_holder_.empty() || s.out_owner != pipe_holder_ || d.in_owner != pipe_holder_) {
      fail("resource-honesty", at(tick_) + "route S" + std::to_string(src) + "->S" + std::to_string(dst) +
                                   " open but pipe holder is '" + pipe_holder_ + "'");
    }
  }

  void end_of_tick() {
    if (!tick_) return;
    const auto& s = silos_;
    if (s[0].out && s[3].in && s[1].out && s[2].in) fail("pipe-exclusion", at(*tick_) + "both pipe routes open");
    if (s[2].mixer && s[3].mixer) fail("power-exclusion", at(*tick_) + "mixers M3 and M4 both on");
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i].in && s[i].out) fail("valve-pair", at(*tick_) + "IN and OUT of S" + std::to_string(i + 1) + " both open");
      if (s[i].mixer && s[i].mixer_owner != power_holder_) {
        fail("resource-honesty", at(*tick_) + "M" + std::to_string(i + 1) + " on but power holder is '" + power_holder_ + "'");
      }
    }
    route(1, 4);
    route(2, 3);
  }

  std::string at(const std::optional<std::uint64_t>& t) const { return at(t.value_or(0)); }

  VerifyReport& report_;
  std::optional<std::uint64_t> tick_;
  std::array<Silo, 4> silos_{};
  std::string pipe_holder_;
  std::string power_holder_;
};

} // namespace

std::string render_trace_file(const scenario::ScenarioConfig& cfg, const Trace& trace) {
  std::string out = kTraceVersionLine;
  out += "\n# config fnv1a64:" + scenario::config_hash(cfg) + "\n";
  for (const auto& r : trace.records) out += format_record(r);
  return out;
}

void write_trace_file(const std::string& path, const scenario::ScenarioConfig& cfg, const Trace& trace) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << render_trace_file(cfg, trace);
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

TraceFile parse_trace(const std::string& text) {
  TraceFile tf;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  std::optional<std::uint64_t> last_tick;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (lineno == 1) {
      if (line != kTraceVersionLine) throw MalformedTrace(lineno, "missing '" + std::string(kTraceVersionLine) + "'");
      continue;
    }
    if (!line.empty() && line[0] == '#') {
      tf.header.push_back(line.size() > 2 ? line.substr(2) : std::string{});
      continue;
    }
    if (line.empty()) throw MalformedTrace(lineno, "empty line");
    std::array<std::string, 4> f;
    std::size_t start = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      const auto tab = i < 3 ? line.find('\t', start) : std::string::npos;
      if (i < 3 && tab == std::string::npos) throw MalformedTrace(lineno, "expected 4 tab-separated fields");
      f[i] = line.substr(start, i < 3 ? tab - start : std::string::npos);
      start = tab + 1;
    }
    TraceRecord r;
    if (!parse_tick(f[0], r.tick)) throw MalformedTrace(lineno, "bad tick '" + f[0] + "'");
    if (f[1].empty()) throw MalformedTrace(lineno, "empty source");
    const auto kind = parse_record_kind(f[2]);
    if (!kind) throw MalformedTrace(lineno, "unknown record kind '" + f[2] + "'");
    if (f[3].empty() || f[3].find('\t') != std::string::npos) throw MalformedTrace(lineno, "bad detail field");
    if (last_tick && r.tick < *last_tick) {
      throw MalformedTrace(lineno, "tick " + f[0] + " after tick " + std::to_string(*last_tick));
    }
    last_tick = r.tick;
    r.source = f[1];
    r.kind = *kind;
    r.detail = f[3];
    tf.records.push_back(std::move(r));
  }
  if (lineno == 0) throw MalformedTrace(1, "empty file");
  return tf;
}

TraceFile read_trace_file(const std::string& path) { return parse_trace(slurp(path)); }

bool VerifyReport::all_pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

VerifyReport verify_trace(const std::vector<TraceRecord>& records) {
  VerifyReport report;
  Replay replay(report);
  std::optional<std::uint64_t> last;
  for (const auto& r : records) {
    if (last && r.tick < *last) {
      report.checks[0].pass = false;
      if (report.checks[0].message.empty()) report.checks[0].message = "tick " + std::to_string(r.tick) + " out of order";
    }
    last = r.tick;
    replay.record(r);
  }
  replay.finish();
  return report;
}

CompareResult compare_traces(const std::vector<TraceRecord>& a, const std::vector<TraceRecord>& b,
                             const std::set<RecordKind>& kinds) {
  const auto keep = [&](const TraceRecord& r) { return kinds.empty() || kinds.count(r.kind) != 0; };
  std::vector<const TraceRecord*> fa, fb;
  for (const auto& r : a) {
    if (keep(r)) fa.push_back(&r);
  }
  for (const auto& r : b) {
    if (keep(r)) fb.push_back(&r);
  }
  CompareResult res;
  const auto n = std::max(fa.size(), fb.size());
  for (std::size_t i = 0; i < n; ++i) {
    const bool ha = i < fa.size(), hb = i < fb.size();
    if (ha && hb && *fa[i] == *fb[i]) continue;
    res.identical = false;
    res.index = i;
    if (ha) res.a = *fa[i];
    if (hb) res.b = *fb[i];
    for (std::size_t k = i >= 3 ? i - 3 : 0; k < i; ++k) res.context.push_back(*fa[k]);
    return res;
  }
  return res;
}

std::set<RecordKind> parse_kind_filter(const std::string& csv) {
  std::set<RecordKind> kinds;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto k = parse_record_kind(item);
    if (!k) throw std::invalid_argument("unknown record kind '" + item + "'");
    kinds.insert(*k);
  }
  return kinds;
}

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  scenario::ScenarioConfig cfg;
  try {
    cfg = scenario::load_scenario(opts.scenario_path);
    if (opts.ticks) cfg.max_ticks = *opts.ticks;
    if (opts.mode) scenario::apply_setting(cfg, "mode", *opts.mode);
    if (opts.latency) cfg.latency = *opts.latency;
    if (opts.strategy) scenario::apply_setting(cfg, "strategy", *opts.strategy);
    if (opts.resource) scenario::apply_setting(cfg, "resource", *opts.resource);
    if (opts.cycles) cfg.cycles = *opts.cycles;
    scenario::validate(cfg);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  }

  scenario::RunResult result;
  try {
    result = scenario::run_scenario(cfg);
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return 4;
  }
  try {
    write_trace_file(opts.out_path, cfg, result.trace);
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return 1;
  }
  out << "ticks " << result.ticks << ", records " << result.trace.records.size();
  if (result.faulted) out << ", FAULT recorded";
  if (result.tick_limit_exceeded) out << ", tick limit " << cfg.max_ticks << " exceeded";
  out << "\n";
  return result.exit_code();
}

int cmd_verify(const std::string& path, std::ostream& out, std::ostream& err) {
  TraceFile tf;
  try {
    tf = read_trace_file(path);
  } catch (const std::exception& e) {
    err << "malformed trace: " << e.what() << "\n";
    return 1;
  }
  const auto report = verify_trace(tf.records);
  for (const auto& c : report.checks) {
    out << (c.pass ? "PASS " : "FAIL ") << c.name;
    if (!c.pass) out << "  " << c.message;
    out << "\n";
  }
  return report.all_pass() ? 0 : 3;
}

int cmd_compare(const std::string& a, const std::string& b, const std::string& filter, std::ostream& out,
                std::ostream& err) {
  std::set<RecordKind> kinds;
  TraceFile ta, tb;
  try {
    kinds = parse_kind_filter(filter);
    ta = read_trace_file(a);
    tb = read_trace_file(b);
  } catch (const std::exception& e) {
    err << "malformed input: " << e.what() << "\n";
    return 1;
  }
  const auto res = compare_traces(ta.records, tb.records, kinds);
  if (res.identical) {
    out << "identical\n";
    return 0;
  }
  out << "diverged at filtered record " << res.index << "\n";
  for (const auto& r : res.context) out << "  " << format_record(r);
  out << "< " << (res.a ? format_record(*res.a) : std::string("<end of trace>\n"));
  out << "> " << (res.b ? format_record(*res.b) : std::string("<end of trace>\n"));
  return 3;
}

} // namespace siloplc::tools
