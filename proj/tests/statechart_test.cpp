#include <gtest/gtest.h>

#include "siloplc/silo.hpp"
#include "siloplc/statechart.hpp"

using namespace siloplc::statechart;
using siloplc::components::SiloContext;
using siloplc::components::silo_machine_definition;

namespace {

struct Counter {
  int hits = 0;
  int limit = 0;
};

using Def = StatechartDef<Counter>;

std::shared_ptr<Def> two_state() {
  auto d = std::make_shared<Def>();
  d->name = "ab";
  d->states = {"A", "B"};
  d->initial = {{{}, {}, "A"}};
  d->transitions = {{"A", "go", {}, {{"hit", [](Counter& c, const Event&) { ++c.hits; }}}, "B"},
                    {"B", "back", {}, {}, "A"}};
  return d;
}

bool has_kind(const std::vector<DefinitionError>& errs, DefinitionErrorKind k) {
  for (const auto& e : errs) {
    if (e.kind == k) return true;
  }
  return false;
}

// Silo machine with a stub driver that records commands.
struct RecordingDriver : siloplc::components::SiloDriverIf {
  std::vector<std::string> log;
  int silo_id() const override { return 1; }
  void open_in_valve() override { log.push_back("openINValve"); }
  void close_in_valve() override { log.push_back("closeINValve"); }
  void open_out_valve() override { log.push_back("openOUTValve"); }
  void close_out_valve() override { log.push_back("closeOUTValve"); }
  void start_mixer() override { log.push_back("startMixer"); }
  void stop_mixer() override { log.push_back("stopMixer"); }
  void start_heater() override { log.push_back("startHeater"); }
  void stop_heater() override { log.push_back("stopHeater"); }
  siloplc::plant::SiloReading read_sensors() const override { return {}; }
};

MachineInstance<SiloContext> silo_machine(RecordingDriver& d, bool e, bool f) {
  return MachineInstance<SiloContext>(silo_machine_definition(), SiloContext{&d, nullptr, {e, f, std::nullopt}});
}

} // namespace

TEST(StatechartValidate, SiloMachineIsValid) { EXPECT_TRUE(validate(*silo_machine_definition()).empty()); }

TEST(StatechartValidate, ReportsEveryError) {
  Def d;
  d.name = "bad";
  d.states = {"A", "A"};
  d.initial = {{[](const Counter&, const Event&) { return true; }, {}, "A"}};
  d.transitions = {{"A", "x", {}, {}, "Foo"}, {"A", "x", {}, {}, "A"}};
  const auto errs = validate(d);
  EXPECT_TRUE(has_kind(errs, DefinitionErrorKind::DuplicateState));
  EXPECT_TRUE(has_kind(errs, DefinitionErrorKind::NoInitialFallback));
  EXPECT_TRUE(has_kind(errs, DefinitionErrorKind::UnknownState));
  EXPECT_TRUE(has_kind(errs, DefinitionErrorKind::ShadowedTransition));
  EXPECT_THROW(MachineInstance<Counter>(std::make_shared<Def>(d), Counter{}), InvalidDefinition);
}

TEST(StatechartValidate, EmptyMachine) {
  Def d;
  d.name = "empty";
  EXPECT_TRUE(has_kind(validate(d), DefinitionErrorKind::EmptyMachine));
}

TEST(StatechartInit, SingleStateCatchAll) {
  auto d = std::make_shared<Def>();
  d->name = "one";
  d->states = {"Only"};
  d->initial = {{{}, {}, "Only"}};
  MachineInstance<Counter> m(d, {});
  EXPECT_EQ(m.current(), "Only");
}

// Guard table of the silo's transitory initial state: F decides, E does not.
TEST(StatechartInit, SiloSensorTable) {
  struct Row {
    bool e, f;
    const char* state;
  };
  for (const Row& r : {Row{false, false, "Empty"}, Row{true, false, "Empty"}, Row{true, true, "Full"},
                       Row{false, true, "Full"}}) {
    RecordingDriver d;
    auto m = silo_machine(d, r.e, r.f);
    EXPECT_EQ(m.current(), r.state) << "E=" << r.e << " F=" << r.f;
    EXPECT_TRUE(d.log.empty());
  }
}

TEST(StatechartDispatch, SiloFillFromEmpty) {
  RecordingDriver d;
  auto m = silo_machine(d, false, false);
  const auto r = m.dispatch(Event{"fill"});
  EXPECT_TRUE(r.fired);
  EXPECT_EQ(m.current(), "Filling");
  EXPECT_EQ(d.log, (std::vector<std::string>{"openINValve"}));
  ASSERT_EQ(r.changes.size(), 1u);
  EXPECT_EQ(r.changes[0], (StateChange{"Empty", "Filling"}));
}

TEST(StatechartDispatch, IgnoredEventIsNoOp) {
  RecordingDriver d;
  auto m = silo_machine(d, true, true);
  ASSERT_EQ(m.current(), "Full");
  EXPECT_FALSE(m.accepts(Event{"fill"}));
  const auto r = m.dispatch(Event{"fill"});
  EXPECT_FALSE(r.fired);
  EXPECT_TRUE(r.actions.empty());
  EXPECT_TRUE(r.changes.empty());
  EXPECT_EQ(m.current(), "Full");
  EXPECT_TRUE(d.log.empty());
}

TEST(StatechartDispatch, GuardFalseMeansIgnored) {
  auto d = std::make_shared<Def>();
  d->name = "guarded";
  d->states = {"A", "B"};
  d->initial = {{{}, {}, "A"}};
  d->transitions = {{"A", "go", [](const Counter& c, const Event&) { return c.hits > 0; }, {}, "B"}};
  MachineInstance<Counter> m(d, {});
  EXPECT_FALSE(m.dispatch(Event{"go"}).fired);
  m.context().hits = 1;
  EXPECT_TRUE(m.dispatch(Event{"go"}).fired);
  EXPECT_EQ(m.current(), "B");
}

TEST(StatechartDispatch, FirstDeclaredWins) {
  auto d = std::make_shared<Def>();
  d->name = "order";
  d->states = {"A", "B", "C"};
  d->initial = {{{}, {}, "A"}};
  const auto yes = [](const Counter&, const Event&) { return true; };
  d->transitions = {{"A", "go", yes, {}, "B"}, {"A", "go", yes, {}, "C"}};
  MachineInstance<Counter> m(d, {});
  m.dispatch(Event{"go"});
  EXPECT_EQ(m.current(), "B");
}

// A dispatch runs the triggered transition and every eventless one it enables
// before returning; a second identical dispatch sees the settled state.
TEST(StatechartDispatch, RunToCompletion) {
  auto d = std::make_shared<Def>();
  d->name = "chain";
  d->states = {"A", "B", "C", "D"};
  d->initial = {{{}, {}, "A"}};
  const Action<Counter> hit{"hit", [](Counter& c, const Event&) { ++c.hits; }};
  d->transitions = {{"A", "go", {}, {hit}, "B"}, {"B", "", {}, {hit}, "C"}, {"C", "", {}, {hit}, "D"}};
  MachineInstance<Counter> m(d, {});
  const auto r = m.dispatch(Event{"go"});
  EXPECT_EQ(m.current(), "D");
  EXPECT_EQ(m.context().hits, 3);
  EXPECT_EQ(r.changes.size(), 3u);
  EXPECT_EQ(r.actions, (std::vector<std::string>{"hit", "hit", "hit"}));
  EXPECT_FALSE(m.dispatch(Event{"go"}).fired);
  EXPECT_EQ(m.context().hits, 3);
}

TEST(StatechartDispatch, EventlessCycleIsLivelock) {
  auto d = std::make_shared<Def>();
  d->name = "loop";
  d->states = {"A", "B", "C"};
  d->initial = {{{}, {}, "A"}};
  d->transitions = {{"A", "go", {}, {}, "B"}, {"B", "", {}, {}, "C"}, {"C", "", {}, {}, "B"}};
  MachineInstance<Counter> m(d, {});
  EXPECT_THROW(m.dispatch(Event{"go"}), LivelockDetected);
}

// A finite chain of exactly the bound is still allowed.
TEST(StatechartDispatch, ChainAtBoundCompletes) {
  const auto n = kMaxEventlessChain;
  auto d = std::make_shared<Def>();
  d->name = "long";
  for (std::size_t i = 0; i <= n + 1; ++i) d->states.push_back("S" + std::to_string(i));
  d->initial = {{{}, {}, "S0"}};
  d->transitions.push_back({"S0", "go", {}, {}, "S1"});
  for (std::size_t i = 1; i <= n; ++i) {
    d->transitions.push_back({"S" + std::to_string(i), "", {}, {}, "S" + std::to_string(i + 1)});
  }
  MachineInstance<Counter> m(d, {});
  const auto r = m.dispatch(Event{"go"});
  EXPECT_EQ(r.changes.size(), n + 1);
  EXPECT_EQ(m.current(), "S" + std::to_string(n + 1));
}

TEST(StatechartDispatch, DeterministicReplay) {
  const std::vector<const char*> script{"go", "back", "back", "go", "go", "back", "go"};
  auto run = [&] {
    MachineInstance<Counter> m(two_state(), {});
    std::vector<std::string> states;
    for (const char* e : script) {
      m.dispatch(Event{e});
      states.push_back(m.current());
    }
    return std::pair{states, m.context().hits};
  };
  EXPECT_EQ(run(), run());
  EXPECT_EQ(run().second, 3);
}

TEST(StatechartEvent, Label) {
  EXPECT_EQ(Event("filled", 3).label(), "filled(3)");
  EXPECT_EQ(Event("fill").label(), "fill");
  EXPECT_THROW(Event(""), std::invalid_argument);
}
