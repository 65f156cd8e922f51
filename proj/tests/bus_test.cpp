#include <gtest/gtest.h>

#include "siloplc/bus.hpp"
#include "siloplc/scenario.hpp"

using namespace siloplc;
using namespace siloplc::iot;

namespace {

ServiceMessage req(const std::string& from, const std::string& to, const std::string& op, std::uint64_t sent) {
  ServiceMessage m;
  m.sender = from;
  m.target = to;
  m.operation = op;
  m.sent_tick = sent;
  return m;
}

} // namespace

TEST(Bus, ZeroLatencyFollowsExecutionOrder) {
  Bus bus(0);
  bus.register_endpoint("P", 1);
  bus.register_endpoint("S", 2);
  EXPECT_EQ(bus.send(req("P", "S", "fill", 4)).delivery_tick, 4u);
  EXPECT_EQ(bus.send(req("S", "P", "filled", 4)).delivery_tick, 5u);
}

TEST(Bus, LatencyAddsTicks) {
  Bus bus(3);
  bus.register_endpoint("P", 1);
  bus.register_endpoint("S", 2);
  const auto m = bus.send(req("P", "S", "fill", 10));
  EXPECT_EQ(m.delivery_tick, 13u);
  EXPECT_TRUE(bus.poll("S", 12).empty());
  const auto got = bus.poll("S", 13);
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0].operation, "fill");
  EXPECT_EQ(bus.in_flight(), 0u);
}

TEST(Bus, UnknownEndpoint) {
  Bus bus;
  bus.register_endpoint("P", 1);
  EXPECT_THROW(bus.send(req("P", "nobody", "fill", 0)), UnknownEndpoint);
  EXPECT_THROW(bus.send(req("nobody", "P", "fill", 0)), UnknownEndpoint);
  EXPECT_THROW(bus.poll("nobody", 0), UnknownEndpoint);
}

TEST(Bus, PollOrdering) {
  Bus bus(2);
  bus.register_endpoint("T", 1);
  bus.register_endpoint("b", 2);
  bus.register_endpoint("a", 3);
  EXPECT_TRUE(bus.poll("T", 100).empty());
  bus.send(req("b", "T", "x", 0));
  bus.send(req("a", "T", "y", 0));
  bus.send(req("a", "T", "z", 0));
  bus.send(req("a", "T", "w", 0));
  const auto got = bus.poll("T", 2);
  ASSERT_EQ(got.size(), 4u);
  EXPECT_EQ(got[0].sender, "a");
  EXPECT_EQ(got[0].correlation_id, 1u);
  EXPECT_EQ(got[1].correlation_id, 2u);
  EXPECT_EQ(got[2].correlation_id, 3u);
  EXPECT_EQ(got[3].sender, "b");
}

TEST(Bus, CorrelationIdsPerSender) {
  Bus bus;
  bus.register_endpoint("a", 1);
  bus.register_endpoint("b", 2);
  EXPECT_EQ(bus.send(req("a", "b", "x", 0)).correlation_id, 1u);
  EXPECT_EQ(bus.send(req("b", "a", "x", 0)).correlation_id, 1u);
  EXPECT_EQ(bus.send(req("a", "b", "x", 0)).correlation_id, 2u);
}

TEST(Bus, MsgDetail) {
  ServiceMessage m = req("GenLiqueurA", "S1", "fill", 0);
  m.correlation_id = 1;
  m.delivery_tick = 5;
  EXPECT_EQ(msg_detail(m), "GenLiqueurA->S1:fill#1@5");
}

namespace {

std::vector<TraceRecord> only(const std::vector<TraceRecord>& rs, std::set<RecordKind> kinds) {
  std::vector<TraceRecord> out;
  for (const auto& r : rs) {
    if (kinds.count(r.kind)) out.push_back(r);
  }
  return out;
}

} // namespace

TEST(RemoteUnits, ZeroLatencyTransparent) {
  scenario::ScenarioConfig local, remote;
  remote.mode = scenario::Mode::Distributed;
  const auto a = scenario::run_scenario(local).trace.records;
  const auto b = scenario::run_scenario(remote).trace.records;
  const std::set<RecordKind> k{RecordKind::Act, RecordKind::State, RecordKind::Res, RecordKind::Fault};
  EXPECT_EQ(only(a, k), only(b, k));
  EXPECT_FALSE(only(b, {RecordKind::Msg}).empty());
}

TEST(RemoteUnits, LatencyFiveDelaysEveryMessage) {
  scenario::ScenarioConfig cfg;
  cfg.mode = scenario::Mode::Distributed;
  cfg.latency = 5;
  const auto r = scenario::run_scenario(cfg);
  EXPECT_EQ(r.exit_code(), 0);
  int msgs = 0;
  for (const auto& rec : r.trace.records) {
    if (rec.kind != RecordKind::Msg) continue;
    ++msgs;
    const auto at = rec.detail.rfind('@');
    ASSERT_NE(at, std::string::npos);
    EXPECT_EQ(std::stoull(rec.detail.substr(at + 1)), rec.tick + 5) << rec.detail;
  }
  EXPECT_GT(msgs, 0);
}

TEST(RemoteUnits, ProxyStatusFollowsNotifications) {
  Bus bus;
  bus.register_endpoint("P", 1);
  bus.register_endpoint("S1", 2);
  runtime::Program program;
  auto pair = make_remote_pair(bus, program.io(), "S1", "P", components::SiloStatus::Empty);
  EXPECT_EQ(pair.commands->status(), components::SiloStatus::Empty);
  pair.commands->fill();
  ASSERT_EQ(bus.in_flight(), 1u);
  ServiceMessage n;
  n.kind = MessageKind::Notification;
  n.sender = "S1";
  n.operation = "filled";
  pair.commands->observe(n);
  EXPECT_EQ(pair.commands->status(), components::SiloStatus::Full);
  EXPECT_THROW(make_remote_pair(bus, program.io(), "S9", "P", components::SiloStatus::Empty), UnknownEndpoint);
}
