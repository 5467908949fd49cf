#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "honeydoc/core/error.h"
#include "honeydoc/dataplane/flow.h"
#include "honeydoc/dataplane/flow_dump.h"
#include "honeydoc/dataplane/switch_node.h"
#include "test_util.h"

namespace honeydoc::dataplane {
namespace {

using testing::Tcp;
using testing::Udp;

// Field-by-field reference: a constrained field must equal the frame's.
bool OracleMatches(const MatchFields& m, const Segment& s, int port) {
  bool ok = true;
  ok = ok && (!m.in_port.has_value() || m.in_port.value() == port);
  ok = ok && (!m.proto.has_value() || m.proto.value() == s.proto);
  ok = ok && (!m.src_ip.has_value() || m.src_ip.value().value() == s.src_ip.value());
  ok = ok && (!m.dst_ip.has_value() || m.dst_ip.value().value() == s.dst_ip.value());
  ok = ok && (!m.src_port.has_value() || m.src_port.value() == s.src_port);
  ok = ok && (!m.dst_port.has_value() || m.dst_port.value() == s.dst_port);
  return ok;
}

TEST(MatchFields, AgreesWithOracle) {
  std::mt19937_64 rng(11);
  // Small domains so that matches and mismatches are both common.
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
  auto ip = [&] { return IpAddr::FromOctets(10, 0, 0, static_cast<std::uint8_t>(1 + pick(3))); };
  auto port = [&] { return static_cast<std::uint16_t>(20 + pick(3)); };
  int matched = 0;
  for (int i = 0; i < 10000; ++i) {
    MatchFields m;
    if (pick(2)) m.in_port = 1 + pick(3);
    if (pick(2)) m.proto = pick(2) ? Proto::kTcp : Proto::kUdp;
    if (pick(2)) m.src_ip = ip();
    if (pick(2)) m.dst_ip = ip();
    if (pick(2)) m.src_port = port();
    if (pick(2)) m.dst_port = port();
    Segment s = pick(2) ? Tcp("10.0.0.1", 20, "10.0.0.1", 20, kSyn)
                        : Udp("10.0.0.1", 20, "10.0.0.1", 20);
    s.src_ip = ip();
    s.dst_ip = ip();
    s.src_port = port();
    s.dst_port = port();
    int in_port = 1 + pick(3);
    bool expect = OracleMatches(m, s, in_port);
    matched += expect;
    ASSERT_EQ(m.Matches(s, in_port), expect) << FormatMatch(0, m);
  }
  EXPECT_GT(matched, 100);
  EXPECT_LT(matched, 9900);
}

TEST(ApplyActions, RewritesThenTerminates) {
  Segment s = Tcp("10.1.0.2", 1000, "10.1.1.2", 22, kPsh | kAck, 100, 0xfffffffeu, "x");
  std::vector<FlowAction> acts = {SetTcpSeqDiff{-101}, SetTcpAckDiff{5}, Output{3},
                                  Output{4}};
  Outcome o = ApplyActions(s, acts);
  ASSERT_TRUE(std::holds_alternative<EmitOn>(o));
  const EmitOn& e = std::get<EmitOn>(o);
  EXPECT_EQ(e.port, 3);
  EXPECT_EQ(e.segment.seq, 0xffffffffu);
  EXPECT_EQ(e.segment.ack, 3u);

  acts = {RewriteDst{IpAddr::Parse("10.9.9.9"), MacAddr::Parse("02:00:00:00:09:09")},
          RewriteSrc{IpAddr::Parse("10.8.8.8"), MacAddr::Parse("02:00:00:00:08:08")},
          ToController{}};
  o = ApplyActions(s, acts);
  ASSERT_TRUE(std::holds_alternative<SentToController>(o));
  EXPECT_EQ(std::get<SentToController>(o).segment.dst_ip.ToString(), "10.9.9.9");
  EXPECT_EQ(std::get<SentToController>(o).segment.src_mac.ToString(), "02:00:00:00:08:08");

  acts = {Drop{}, Output{1}};
  EXPECT_TRUE(std::holds_alternative<Dropped>(ApplyActions(s, acts)));
}

TEST(ApplyActions, ContractViolations) {
  std::vector<FlowAction> no_terminal = {SetTcpSeqDiff{1}};
  EXPECT_THROW(ApplyActions(Tcp("1.1.1.1", 1, "2.2.2.2", 2, kAck), no_terminal),
               ContractViolation);
  std::vector<FlowAction> seq_on_udp = {SetTcpSeqDiff{1}, Output{1}};
  EXPECT_THROW(ApplyActions(Udp("1.1.1.1", 1, "2.2.2.2", 2), seq_on_udp),
               ContractViolation);
  std::vector<FlowAction> ack_on_udp = {SetTcpAckDiff{1}, Output{1}};
  EXPECT_THROW(ApplyActions(Udp("1.1.1.1", 1, "2.2.2.2", 2), ack_on_udp),
               ContractViolation);
}

FlowEntry Entry(int priority, SimTime at, std::uint64_t cookie, FlowAction act) {
  FlowEntry e;
  e.priority = priority;
  e.install_time = at;
  e.cookie = cookie;
  e.actions = {act};
  return e;
}

TEST(SwitchNode, LookupOrder) {
  SwitchNode sw("fcf", SwitchRole::kFcf);
  sw.Install(Entry(1, Millis(5), 1, Output{1}));
  sw.Install(Entry(2, Millis(9), 2, Output{2}));
  sw.Install(Entry(1, Millis(3), 3, Output{3}));
  sw.Install(Entry(1, Millis(5), 4, Output{4}));
  sw.Install(Entry(0, Millis(0), 5, Drop{}));
  std::vector<std::uint64_t> cookies;
  for (const FlowEntry& e : sw.table()) cookies.push_back(e.cookie);
  EXPECT_EQ(cookies, (std::vector<std::uint64_t>{2, 3, 1, 4, 5}));

  Outcome o = sw.ProcessIngress(Tcp("1.1.1.1", 1, "2.2.2.2", 2, kSyn), 1);
  ASSERT_TRUE(std::holds_alternative<EmitOn>(o));
  EXPECT_EQ(std::get<EmitOn>(o).port, 2);
  EXPECT_EQ(sw.table()[0].n_packets, 1u);
  EXPECT_EQ(sw.matched_total(), 1u);
}

TEST(SwitchNode, MissDropsAndRemoveByCookie) {
  SwitchNode sw("spf", SwitchRole::kSpf);
  FlowEntry e = Entry(5, Millis(1), 7, Output{2});
  e.match.dst_port = 22;
  sw.Install(e);
  sw.Install(Entry(4, Millis(1), 7, Output{3}));
  sw.Install(Entry(4, Millis(2), 8, Output{3}));
  EXPECT_TRUE(std::holds_alternative<EmitOn>(
      sw.ProcessIngress(Tcp("1.1.1.1", 1, "2.2.2.2", 22, kSyn, 0, 0, "abc"), 1)));
  EXPECT_EQ(sw.table()[0].n_bytes, 3u);
  EXPECT_EQ(sw.RemoveByCookie(7), 2u);
  EXPECT_EQ(sw.RemoveByCookie(7), 0u);
  EXPECT_EQ(sw.RemoveByCookie(8), 1u);
  EXPECT_TRUE(std::holds_alternative<Dropped>(
      sw.ProcessIngress(Tcp("1.1.1.1", 1, "2.2.2.2", 22, kSyn), 1)));
  EXPECT_EQ(sw.Match(Tcp("1.1.1.1", 1, "2.2.2.2", 22, kSyn), 1), nullptr);
}

TEST(SwitchNode, RejectsEntriesWithoutTerminal) {
  SwitchNode sw("fcf", SwitchRole::kFcf);
  FlowEntry empty;
  EXPECT_THROW(sw.Install(empty), ContractViolation);
  FlowEntry rewrite_only;
  rewrite_only.actions = {SetTcpAckDiff{3}};
  EXPECT_THROW(sw.Install(rewrite_only), ContractViolation);
  EXPECT_TRUE(sw.table().empty());
}

TEST(FlowDump, OvsStyleLines) {
  SwitchNode sw("fcf", SwitchRole::kFcf);
  FlowEntry ftp = Entry(2, Millis(0), 0, ToController{});
  ftp.match.proto = Proto::kTcp;
  ftp.match.dst_port = 21;
  sw.Install(ftp);
  FlowEntry spf = Entry(65000, Millis(1500), 0x2a, Output{3});
  spf.actions = {SetTcpAckDiff{-4000}, Output{3}};
  spf.match.in_port = 1;
  spf.match.proto = Proto::kTcp;
  spf.match.src_ip = IpAddr::Parse("10.1.0.2");
  spf.match.dst_ip = IpAddr::Parse("10.1.1.2");
  spf.match.src_port = 36093;
  spf.match.dst_port = 22;
  sw.Install(spf);
  EXPECT_EQ(DumpFlows(sw, SimTime(90798000)),
            "cookie=0x2a, duration=89.298s, table=0, n_packets=0, n_bytes=0, "
            "priority=65000,tcp,in_port=1,nw_src=10.1.0.2,nw_dst=10.1.1.2,tp_src=36093,"
            "tp_dst=22 actions=set_tcp_ack_diff:-4000,output:3\n"
            "cookie=0x0, duration=90.798s, table=0, n_packets=0, n_bytes=0, "
            "priority=2,tcp,tp_dst=21 actions=CONTROLLER:65535\n");
  EXPECT_EQ(NormalizedDump(sw).find("duration"), std::string::npos);
  EXPECT_EQ(FormatActions({Drop{}}), "drop");
  EXPECT_EQ(FormatMatch(0, MatchFields{}), "priority=0");
}

}  // namespace
}  // namespace honeydoc::dataplane
