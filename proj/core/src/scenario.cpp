#include "siloplc/scenario.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace siloplc::scenario {

using components::Recipe;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || errno != 0 || end != v.c_str() + v.size()) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return d;
}

std::uint64_t parse_count(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError(key + ": expected a nonnegative integer, got '" + v + "'");
  }
  errno = 0;
  const auto n = std::strtoull(v.c_str(), nullptr, 10);
  if (errno != 0) throw ConfigError(key + ": value out of range");
  return n;
}

int parse_int(const std::string& key, const std::string& v) {
  const auto n = parse_count(key, v);
  if (n > 1'000'000'000ULL) throw ConfigError(key + ": value out of range");
  return static_cast<int>(n);
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::optional<Recipe> parse_recipe(const std::string& s) {
  if (s == "GenLiqueurA" || s == "A") return Recipe::GenLiqueurA;
  if (s == "GenLiqueurB" || s == "B") return Recipe::GenLiqueurB;
  return std::nullopt;
}

int silo_index(const std::string& key, const std::string& digit) {
  if (digit.size() != 1 || digit[0] < '1' || digit[0] > '4') throw ConfigError(key + ": silo index must be 1..4");
  return digit[0] - '1';
}

} // namespace

const char* to_string(Strategy s) { return s == Strategy::CpController ? "cp" : "ofb"; }
const char* to_string(Mode m) { return m == Mode::Local ? "local" : "distributed"; }

std::map<std::string, int> ScenarioConfig::default_priorities() {
  return {{"GenLiqueurA", 1}, {"GenLiqueurB", 2}, {"S1", 3}, {"S2", 4}, {"S3", 5}, {"S4", 6}};
}

void apply_setting(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  auto& p = cfg.plant;
  const std::map<std::string, double*> plant_keys{
      {"plant.dt", &p.dt},
      {"plant.fill_rate", &p.fill_rate},
      {"plant.pipe_rate", &p.pipe_rate},
      {"plant.drain_rate", &p.drain_rate},
      {"plant.heat_rate", &p.heat_rate},
      {"plant.ambient_temp", &p.ambient_temp},
      {"plant.e_threshold", &p.e_threshold},
      {"plant.f_threshold", &p.f_threshold},
      {"plant.capacity", &p.capacity},
  };
  if (auto it = plant_keys.find(key); it != plant_keys.end()) {
    *it->second = parse_double(key, value);
    return;
  }
  if (key.rfind("silo.", 0) == 0) {
    const auto rest = key.substr(5);
    const auto dot = rest.find('.');
    if (dot == std::string::npos) throw ConfigError("unknown key '" + key + "'");
    const int i = silo_index(key, rest.substr(0, dot));
    const auto field = rest.substr(dot + 1);
    if (field == "level") cfg.initial_level[static_cast<std::size_t>(i)] = parse_double(key, value);
    else if (field == "temperature") cfg.initial_temperature[static_cast<std::size_t>(i)] = parse_double(key, value);
    else throw ConfigError("unknown key '" + key + "'");
    return;
  }
  if (key.rfind("recipe.", 0) == 0) {
    const auto rest = key.substr(7);
    const auto dot = rest.find('.');
    const auto recipe = dot == std::string::npos ? std::nullopt : parse_recipe(rest.substr(0, dot));
    if (!recipe) throw ConfigError("unknown key '" + key + "'");
    auto& r = *recipe == Recipe::GenLiqueurA ? cfg.recipe_a : cfg.recipe_b;
    const auto field = rest.substr(dot + 1);
    if (field == "heat_target") r.heat_target = parse_double(key, value);
    else if (field == "mix_ticks") r.mix_ticks = parse_count(key, value);
    else if (field == "process_ticks" && *recipe == Recipe::GenLiqueurA) r.process_ticks = parse_count(key, value);
    else throw ConfigError("unknown key '" + key + "'");
    return;
  }
  if (key.rfind("priority.", 0) == 0) {
    const auto id = key.substr(9);
    if (!ScenarioConfig::default_priorities().count(id)) throw ConfigError("unknown instance in '" + key + "'");
    cfg.priorities[id] = parse_int(key, value);
    return;
  }
  if (key == "recipes") {
    cfg.run_a = cfg.run_b = false;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      const auto r = parse_recipe(item);
      if (!r) throw ConfigError("recipes: unknown recipe '" + item + "'");
      (*r == Recipe::GenLiqueurA ? cfg.run_a : cfg.run_b) = true;
    }
    return;
  }
  if (key == "strategy") {
    if (value == "cp" || value == "cpController") cfg.strategy = Strategy::CpController;
    else if (value == "ofb") cfg.strategy = Strategy::Ofb;
    else throw ConfigError("strategy must be cp or ofb");
    return;
  }
  if (key == "resource") {
    const auto v = components::parse_resource_variant(value);
    if (!v) throw ConfigError("resource must be check or monitor");
    cfg.resource = *v;
    return;
  }
  if (key == "mode") {
    if (value == "local") cfg.mode = Mode::Local;
    else if (value == "distributed") cfg.mode = Mode::Distributed;
    else throw ConfigError("mode must be local or distributed");
    return;
  }
  if (key == "latency") {
    cfg.latency = parse_count(key, value);
    return;
  }
  if (key == "max_ticks") {
    cfg.max_ticks = parse_count(key, value);
    return;
  }
  if (key == "cycles") {
    cfg.cycles = parse_int(key, value);
    return;
  }
  throw ConfigError("unknown key '" + key + "'");
}

ScenarioConfig parse_scenario(const std::string& text) {
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    try {
      apply_setting(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open scenario '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_scenario(ss.str());
}

void validate(const ScenarioConfig& cfg) {
  try {
    plant::validate(cfg.plant);
  } catch (const plant::InvalidConfig& e) {
    throw ConfigError(e.what());
  }
  if (cfg.max_ticks == 0) throw ConfigError("max_ticks must be > 0");
  if (cfg.cycles < 1) throw ConfigError("cycles must be >= 1");
  std::set<int> used;
  for (const auto& [id, prio] : cfg.priorities) {
    if (prio <= 0) throw ConfigError("priority." + id + " must be positive");
    if (!used.insert(prio).second) throw ConfigError("duplicate priority " + std::to_string(prio) + " (priority." + id + ")");
  }
  for (std::size_t i = 0; i < cfg.initial_level.size(); ++i) {
    const auto& l = cfg.initial_level[i];
    if (l && (*l < 0.0 || *l > cfg.plant.capacity)) {
      throw ConfigError("silo." + std::to_string(i + 1) + ".level must lie in [0, capacity]");
    }
  }
}

std::string canonical_text(const ScenarioConfig& cfg) {
  std::map<std::string, std::string> kv;
  const auto& p = cfg.plant;
  kv["plant.dt"] = fmt_double(p.dt);
  kv["plant.fill_rate"] = fmt_double(p.fill_rate);
  kv["plant.pipe_rate"] = fmt_double(p.pipe_rate);
  kv["plant.drain_rate"] = fmt_double(p.drain_rate);
  kv["plant.heat_rate"] = fmt_double(p.heat_rate);
  kv["plant.ambient_temp"] = fmt_double(p.ambient_temp);
  kv["plant.e_threshold"] = fmt_double(p.e_threshold);
  kv["plant.f_threshold"] = fmt_double(p.f_threshold);
  kv["plant.capacity"] = fmt_double(p.capacity);
  for (std::size_t i = 0; i < cfg.initial_level.size(); ++i) {
    const auto n = std::to_string(i + 1);
    if (cfg.initial_level[i]) kv["silo." + n + ".level"] = fmt_double(*cfg.initial_level[i]);
    if (cfg.initial_temperature[i]) kv["silo." + n + ".temperature"] = fmt_double(*cfg.initial_temperature[i]);
  }
  std::string recipes;
  if (cfg.run_a) recipes = "GenLiqueurA";
  if (cfg.run_b) recipes += recipes.empty() ? "GenLiqueurB" : ",GenLiqueurB";
  kv["recipes"] = recipes;
  kv["recipe.GenLiqueurA.process_ticks"] = std::to_string(cfg.recipe_a.process_ticks);
  kv["recipe.GenLiqueurA.heat_target"] = fmt_double(cfg.recipe_a.heat_target);
  kv["recipe.GenLiqueurA.mix_ticks"] = std::to_string(cfg.recipe_a.mix_ticks);
  kv["recipe.GenLiqueurB.heat_target"] = fmt_double(cfg.recipe_b.heat_target);
  kv["recipe.GenLiqueurB.mix_ticks"] = std::to_string(cfg.recipe_b.mix_ticks);
  kv["strategy"] = to_string(cfg.strategy);
  kv["resource"] = components::to_string(cfg.resource);
  kv["mode"] = to_string(cfg.mode);
  kv["latency"] = std::to_string(cfg.latency);
  for (const auto& [id, prio] : cfg.priorities) kv["priority." + id] = std::to_string(prio);
  kv["max_ticks"] = std::to_string(cfg.max_ticks);
  kv["cycles"] = std::to_string(cfg.cycles);

  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::string config_hash(const ScenarioConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_text(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Assembly::Assembly(ScenarioConfig cfg) : cfg_(std::move(cfg)), program_(std::make_unique<runtime::Program>()) {
  validate(cfg_);
  plant_ = plant::make_plant(cfg_.plant);
  for (int i = 0; i < plant::kSiloCount; ++i) {
    auto& s = plant_.silos[static_cast<std::size_t>(i)];
    if (cfg_.initial_level[static_cast<std::size_t>(i)]) s.level = *cfg_.initial_level[static_cast<std::size_t>(i)];
    if (cfg_.initial_temperature[static_cast<std::size_t>(i)]) {
      s.temperature = *cfg_.initial_temperature[static_cast<std::size_t>(i)];
    }
  }
  auto& io = program_->io();
  pipe_ = components::make_resource("pipe", cfg_.resource);
  power_ = components::make_resource("power", cfg_.resource);
  const auto initial = plant::read_sensors(plant_, cfg_.plant);

  // Silo units: the command surface and the device surface per silo.
  struct SiloUnit {
    std::shared_ptr<runtime::FunctionBlock> fb;
    components::Process2UnitControlerIf* commands;
    components::SiloDriverIf* device;
    std::function<void(components::Silo2ProcessIf*)> connect;
  };
  std::map<int, SiloUnit> units;
  for (int id = 1; id <= plant::kSiloCount; ++id) {
    const auto reading = initial.silo(id);
    if (cfg_.strategy == Strategy::CpController) {
      auto driver = std::make_shared<components::SiloDriver>(id, io);
      auto ctrl = std::make_shared<components::SiloController>(driver, reading, io);
      units[id] = {ctrl, ctrl.get(), driver.get(), [ctrl](components::Silo2ProcessIf* p) { ctrl->connect(p); }};
    } else {
      auto unit = std::make_shared<components::SiloOfbUnit>(id, reading.f, io);
      units[id] = {unit, unit.get(), &unit->device(), [unit](components::Silo2ProcessIf* p) { unit->connect(p); }};
    }
    keep_alive_.push_back(units[id].fb);
  }

  const std::vector<std::pair<Recipe, bool>> enabled{{Recipe::GenLiqueurA, cfg_.run_a},
                                                     {Recipe::GenLiqueurB, cfg_.run_b}};
  const bool distributed = cfg_.mode == Mode::Distributed;
  if (distributed) {
    bus_ = std::make_unique<iot::Bus>(cfg_.latency);
    for (const auto& [id, prio] : cfg_.priorities) bus_->register_endpoint(id, prio);
  }

  std::map<std::string, std::shared_ptr<runtime::FunctionBlock>> blocks;
  std::map<int, std::shared_ptr<iot::RemoteEndpoint>> silo_endpoints;
  for (int id = 1; id <= plant::kSiloCount; ++id) {
    const auto name = components::silo_name(id);
    if (distributed) {
      auto ep = std::make_shared<iot::RemoteEndpoint>(*bus_, name, units[id].fb);
      ep->serve_unit(units[id].commands);
      silo_endpoints[id] = ep;
      blocks[name] = ep;
    } else {
      blocks[name] = units[id].fb;
    }
  }

  for (const auto& [recipe, on] : enabled) {
    if (!on) continue;
    auto rc = recipe == Recipe::GenLiqueurA ? cfg_.recipe_a : cfg_.recipe_b;
    rc.cycles = cfg_.cycles;
    const std::string pid = components::to_string(recipe);
    const auto silos = components::silos_of(recipe);

    components::ProcessWiring wiring;
    wiring.pipe = pipe_.get();
    wiring.power = power_.get();
    std::vector<iot::RemoteUnitCommands*> proxies;
    std::vector<iot::RemotePair> pairs;
    for (int sid : {silos.source, silos.destination}) {
      wiring.devices[sid] = units[sid].device;
      if (distributed) {
        auto pair = iot::make_remote_pair(*bus_, io, components::silo_name(sid), pid, units[sid].commands->status());
        wiring.units[sid] = pair.commands.get();
        proxies.push_back(pair.commands.get());
        keep_alive_.push_back(pair.commands);
        keep_alive_.push_back(pair.notifications);
        pairs.push_back(pair);
      } else {
        wiring.units[sid] = units[sid].commands;
      }
    }
    auto proc = std::make_shared<components::ProcessController>(pid, rc, wiring, io);
    processes_[recipe] = proc;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const int sid = k == 0 ? silos.source : silos.destination;
      units[sid].connect(pairs[k].notifications.get());
    }
    if (distributed) {
      auto ep = std::make_shared<iot::RemoteEndpoint>(*bus_, pid, proc);
      ep->serve_process(proc.get(), proxies);
      blocks[pid] = ep;
    } else {
      units[silos.source].connect(proc.get());
      units[silos.destination].connect(proc.get());
      blocks[pid] = proc;
    }
  }

  for (auto& [id, fb] : blocks) program_->add_instance({id, cfg_.priorities.at(id), fb});
}

const components::ProcessController* Assembly::process(Recipe r) const {
  auto it = processes_.find(r);
  return it == processes_.end() ? nullptr : it->second.get();
}

bool Assembly::all_done() const {
  return std::all_of(processes_.begin(), processes_.end(), [](const auto& kv) { return kv.second->done(); });
}

std::vector<TraceRecord> Assembly::run_scan() { return program_->run_scan(plant_, cfg_.plant); }

RunResult Assembly::run() {
  RunResult result;
  const auto stop = [this](const runtime::Program&, const plant::PlantState&) { return all_done(); };
  try {
    result.trace = program_->run_until(plant_, cfg_.plant, stop, cfg_.max_ticks);
  } catch (const runtime::TickLimitExceeded& e) {
    result.trace = e.partial_trace();
    result.tick_limit_exceeded = true;
  }
  result.ticks = program_->scan_count();
  result.faulted = std::any_of(result.trace.records.begin(), result.trace.records.end(),
                               [](const TraceRecord& r) { return r.kind == RecordKind::Fault; });
  return result;
}

RunResult run_scenario(const ScenarioConfig& cfg) {
  Assembly a(cfg);
  return a.run();
}

} // namespace siloplc::scenario
