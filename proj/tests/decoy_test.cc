#include <cstdint>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "honeydoc/core/error.h"
#include "honeydoc/decoy/activity_log.h"
#include "honeydoc/decoy/decoy_host.h"
#include "honeydoc/decoy/script.h"
#include "test_util.h"

namespace honeydoc::decoy {
namespace {

using testing::Tcp;
using testing::Udp;

constexpr std::uint32_t kIsn = 5000;
constexpr std::uint32_t kClientIsn = 0xfffffffeu;

DecoyConfig Config(DecoyClass cls, std::uint16_t port, const std::string& script) {
  DecoyConfig c;
  c.name = "d";
  c.cls = cls;
  c.ip = IpAddr::Parse("10.1.1.2");
  c.mac = MacAddr::Parse("02:00:00:01:01:02");
  c.open_ports = {port};
  if (!script.empty()) c.scripts[port] = script;
  c.fixed_isn = kIsn;
  return c;
}

class Client {
 public:
  Client(DecoyHost& host, std::uint16_t port) : host_(host), port_(port) {}

  HostActions Send(TcpFlags flags, const std::string& payload = "") {
    Segment s = Tcp("10.1.0.2", 40001, "10.1.1.2", port_, flags, seq_, ack_, payload);
    seq_ += static_cast<std::uint32_t>(payload.size());
    return host_.OnSegment(now_ += Millis(1), s);
  }
  void Handshake() {
    seq_ = kClientIsn;
    HostActions a = Send(kSyn);
    ASSERT_EQ(a.sends.size(), 1u);
    ack_ = a.sends[0].segment.seq + 1;
    seq_ += 1;
    Send(kAck);
  }

 private:
  DecoyHost& host_;
  std::uint16_t port_;
  std::uint32_t seq_ = 0;
  std::uint32_t ack_ = 0;
  SimTime now_{0};
};

TEST(DecoyHost, HandshakeAcrossWrap) {
  ScriptLibrary lib;
  DecoyHost host(Config(DecoyClass::kMih, 22, "ssh-banner"), &lib, [] { return 1u; });
  Segment syn = Tcp("10.1.0.2", 40001, "10.1.1.2", 22, kSyn, kClientIsn);
  HostActions a = host.OnSegment(Millis(1), syn);
  ASSERT_EQ(a.sends.size(), 1u);
  const Segment sa = a.sends[0].segment;
  EXPECT_EQ(sa.flags, TcpFlags(kSyn | kAck));
  EXPECT_EQ(sa.seq, kIsn);
  EXPECT_EQ(sa.ack, 0xffffffffu);
  EXPECT_EQ(sa.src_mac, MacAddr::Parse("02:00:00:01:01:02"));
  EXPECT_EQ(sa.dst_port, 40001);

  // A duplicate SYN is answered with the same SYN/ACK.
  a = host.OnSegment(Millis(2), syn);
  ASSERT_EQ(a.sends.size(), 1u);
  EXPECT_EQ(a.sends[0].segment, sa);

  Segment data = Tcp("10.1.0.2", 40001, "10.1.1.2", 22, kPsh | kAck, 0xffffffffu,
                     kIsn + 1, "SSH-2.0-x\r\n");
  a = host.OnSegment(Millis(3), data);
  ASSERT_EQ(a.sends.size(), 1u);
  EXPECT_EQ(a.sends[0].segment.ack, 10u);  // 0xffffffff + 11 wraps
  EXPECT_EQ(ToString(a.sends[0].segment.payload),
            "SSH-2.0-OpenSSH_6.6.1p1 Ubuntu-2ubuntu2.8\r\n");
  EXPECT_EQ(host.open_connections(), 1u);
}

TEST(DecoyHost, ClosedPortAnswersRst) {
  ScriptLibrary lib;
  DecoyHost host(Config(DecoyClass::kMih, 21, "ftp-amun"), &lib, [] { return 1u; });
  HostActions a = host.OnSegment(Millis(1), Tcp("10.1.0.2", 40001, "10.1.1.2", 23, kSyn, 99));
  ASSERT_EQ(a.sends.size(), 1u);
  EXPECT_EQ(a.sends[0].segment.flags, TcpFlags(kRst | kAck));
  EXPECT_EQ(a.sends[0].segment.ack, 100u);
  EXPECT_EQ(host.open_connections(), 0u);
  // Frames for other addresses and stray ACKs are ignored.
  EXPECT_TRUE(host.OnSegment(Millis(2), Tcp("10.1.0.2", 1, "10.9.9.9", 21, kSyn)).sends.empty());
  EXPECT_TRUE(host.OnSegment(Millis(2), Tcp("10.1.0.2", 1, "10.1.1.2", 21, kAck)).sends.empty());
}

TEST(DecoyHost, AmunLogLine) {
  ScriptLibrary lib;
  DecoyHost host(Config(DecoyClass::kMih, 21, "ftp-amun"), &lib, [] { return 1u; });
  Segment syn = Tcp("10.1.0.2", 40001, "10.1.1.2", 21, kSyn, 10);
  host.OnSegment(Millis(1), syn);
  host.OnSegment(Millis(2), Tcp("10.1.0.2", 40001, "10.1.1.2", 21, kAck, 11, kIsn + 1));
  HostActions a = host.OnSegment(SimTime(4947000), Tcp("10.1.0.2", 40001, "10.1.1.2", 21,
                                                       kPsh | kAck, 11, kIsn + 1,
                                                       "USER anonymous\r\n"));
  ASSERT_EQ(host.log().entries().size(), 1u);
  const ActivityLogEntry& e = host.log().entries()[0];
  EXPECT_EQ(e.bytes, 16u);
  EXPECT_EQ(e.stage, "FTPD_STAGE1");
  EXPECT_EQ(FormatLogLine(e),
            "1970-01-01 00:00:04,947 INFO [vuln_ftp] Attacker: 10.1.0.2 "
            "Message: ['USER anonymous\\r\\n'] Bytes: 16 Stage: FTPD_STAGE1");
  ASSERT_EQ(a.sends.size(), 1u);
  EXPECT_EQ(ToString(a.sends[0].segment.payload), "331 Password required for anonymous.\r\n");
  ASSERT_EQ(a.notes.size(), 1u);
  EXPECT_EQ(a.notes[0].fields[0].second, "activity");
}

TEST(ActivityLog, ParseRoundTrip) {
  ActivityLog log;
  log.Append({SimTime(4947000), "mih", IpAddr::Parse("10.1.0.2"), 0, "vuln_ftp",
              ToBytes("USER anonymous\r\n"), 16, "FTPD_STAGE1"});
  log.Append({Millis(86400000 + 61001), "hih", IpAddr::Parse("10.1.0.3"), 0, "hih",
              Bytes{0, '\'', ']', 0xff}, 4, "-"});
  std::vector<ActivityLogEntry> back = ParseLogs(ExportLogs(log));
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < back.size(); ++i) {
    const ActivityLogEntry& want = log.entries()[i];
    EXPECT_EQ(back[i].time, want.time);
    EXPECT_EQ(back[i].tag, want.tag);
    EXPECT_EQ(back[i].remote_ip, want.remote_ip);
    EXPECT_EQ(back[i].message, want.message);
    EXPECT_EQ(back[i].bytes, want.bytes);
    EXPECT_EQ(back[i].stage, want.stage);
  }
  EXPECT_EQ(ExportLogs(log).substr(0, 24), "1970-01-01 00:00:04,947 ");
  try {
    ParseLogs(ExportLogs(log) + "garbage\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(DecoyHost, LargeResponseIsSplit) {
  ScriptLibrary lib;
  ServiceScript big{"big", "big", {{std::nullopt, Bytes(3000, 'z'), "BIG"}}};
  lib.Add(big);
  DecoyHost host(Config(DecoyClass::kMih, 80, "big"), &lib, [] { return 1u; });
  Client c(host, 80);
  c.Handshake();
  HostActions a = c.Send(kPsh | kAck, "GET /\r\n");
  ASSERT_EQ(a.sends.size(), 3u);
  std::vector<std::size_t> lens;
  for (const auto& s : a.sends) lens.push_back(s.segment.length());
  EXPECT_EQ(lens, (std::vector<std::size_t>{1448, 1448, 104}));
  EXPECT_EQ(a.sends[0].segment.flags, TcpFlags(kAck));
  EXPECT_EQ(a.sends[2].segment.flags, TcpFlags(kPsh | kAck));
  EXPECT_EQ(a.sends[1].segment.seq, kIsn + 1 + 1448);
  EXPECT_EQ(a.sends[2].segment.seq, kIsn + 1 + 2896);
}

TEST(DecoyHost, LihRespondsOnce) {
  ScriptLibrary lib;
  DecoyHost host(Config(DecoyClass::kLih, 25, "smtp-postfix"), &lib, [] { return 1u; });
  Client c(host, 25);
  c.Handshake();
  HostActions first = c.Send(kPsh | kAck, "HELO x\r\n");
  ASSERT_EQ(first.sends.size(), 1u);
  EXPECT_FALSE(first.sends[0].segment.payload.empty());
  HostActions second = c.Send(kPsh | kAck, "MAIL FROM:<a@b>\r\n");
  ASSERT_EQ(second.sends.size(), 1u);
  EXPECT_TRUE(second.sends[0].segment.payload.empty());
  EXPECT_EQ(second.sends[0].segment.flags, TcpFlags(kAck));
}

TEST(DecoyHost, SmtpScriptAdvances) {
  ScriptLibrary lib;
  DecoyHost host(Config(DecoyClass::kMih, 25, "smtp-postfix"), &lib, [] { return 1u; });
  Client c(host, 25);
  c.Handshake();
  std::vector<std::string> replies;
  for (const char* line : {"HELO x\r\n", "MAIL FROM:<a@b>\r\n", "RCPT TO:<c@d>\r\n",
                           "DATA\r\n", "hello\r\n.\r\n"}) {
    HostActions a = c.Send(kPsh | kAck, line);
    ASSERT_EQ(a.sends.size(), 1u);
    replies.push_back(ToString(a.sends[0].segment.payload).substr(0, 3));
  }
  EXPECT_EQ(replies, (std::vector<std::string>{"250", "250", "250", "354", "250"}));
  EXPECT_EQ(host.log().entries().size(), 5u);
}

TEST(DecoyHost, OutOfOrderPayloadIsReAcked) {
  ScriptLibrary lib;
  DecoyHost host(Config(DecoyClass::kMih, 22, "ssh-banner"), &lib, [] { return 1u; });
  host.OnSegment(Millis(1), Tcp("10.1.0.2", 40001, "10.1.1.2", 22, kSyn, 100));
  HostActions a = host.OnSegment(
      Millis(2), Tcp("10.1.0.2", 40001, "10.1.1.2", 22, kPsh | kAck, 150, kIsn + 1, "late"));
  ASSERT_EQ(a.sends.size(), 1u);
  EXPECT_EQ(a.sends[0].segment.ack, 101u);
  EXPECT_TRUE(a.sends[0].segment.payload.empty());
  EXPECT_TRUE(host.streams().begin()->second.received.empty());
}

TEST(DecoyHost, HihRecordsEveryPayload) {
  ScriptLibrary lib;
  DecoyHost hih(Config(DecoyClass::kHih, 3632, "distcc-listener"), &lib, [] { return 1u; });
  Client c(hih, 3632);
  c.Handshake();
  c.Send(kPsh | kAck, "DIST00000001");
  ASSERT_EQ(hih.log().entries().size(), 1u);
  EXPECT_EQ(hih.log().entries()[0].stage, "DISTCC");

  DecoyHost mih(Config(DecoyClass::kMih, 21, "ftp-amun"), &lib, [] { return 1u; });
  EXPECT_THROW(mih.HihRecordActivity(Millis(1), Tcp("1.1.1.1", 1, "10.1.1.2", 21, kAck), "x"),
               ContractViolation);
  EXPECT_FALSE(hih.HihRecordActivity(Millis(1), Tcp("1.1.1.1", 1, "10.1.1.2", 21, kAck), "x"));
}

TEST(DecoyHost, OutboundIntents) {
  ScriptLibrary lib;
  DecoyConfig cfg = Config(DecoyClass::kHih, 3632, "");
  cfg.gateway_mac = MacAddr::Parse("02:00:00:00:00:fe");
  cfg.outbound = {{Millis(3000), IpAddr::Parse("198.51.100.7"), 80, Proto::kTcp, ToBytes("GET")},
                  {Millis(3500), IpAddr::Parse("192.0.2.53"), 53, Proto::kUdp, ToBytes("q")}};
  DecoyHost host(cfg, &lib, [] { return 1u; });
  HostActions start = host.Start();
  ASSERT_EQ(start.timers.size(), 2u);
  EXPECT_EQ(start.timers[1].delay, Millis(3500));

  HostActions syn = host.OnTimer(Millis(3000), 0);
  ASSERT_EQ(syn.sends.size(), 1u);
  const Segment& s = syn.sends[0].segment;
  EXPECT_EQ(s.flags, TcpFlags(kSyn));
  EXPECT_EQ(s.dst_mac, cfg.gateway_mac);
  Segment synack = Tcp("198.51.100.7", 80, "10.1.1.2", s.src_port, kSyn | kAck, 7, s.seq + 1);
  HostActions est = host.OnSegment(Millis(3010), synack);
  ASSERT_EQ(est.sends.size(), 2u);
  EXPECT_EQ(est.sends[0].segment.flags, TcpFlags(kAck));
  EXPECT_EQ(ToString(est.sends[1].segment.payload), "GET");

  HostActions udp = host.OnTimer(Millis(3500), 1);
  ASSERT_EQ(udp.sends.size(), 1u);
  EXPECT_EQ(udp.sends[0].segment.proto, Proto::kUdp);
  EXPECT_TRUE(host.OnTimer(Millis(1), 9).sends.empty());
}

TEST(DecoyHost, CatchAllSensor) {
  ScriptLibrary lib;
  lib.Add({"catch-all", "sensor", {{std::nullopt, {}, "PROBE"}}});
  DecoyConfig cfg = Config(DecoyClass::kMih, 1, "");
  cfg.open_ports.clear();
  cfg.all_ports_open = true;
  cfg.default_script = "catch-all";
  DecoyHost host(cfg, &lib, [] { return 1u; });
  Client c(host, 53360);
  c.Handshake();
  c.Send(kPsh | kAck, "probe\r\n");
  ASSERT_EQ(host.log().entries().size(), 1u);
  EXPECT_EQ(host.log().entries()[0].tag, "sensor");
}

TEST(DecoyHost, UdpIsRecorded) {
  ScriptLibrary lib;
  DecoyHost host(Config(DecoyClass::kMih, 53, ""), &lib, [] { return 1u; });
  HostActions a = host.OnSegment(Millis(1), Udp("10.1.0.2", 5000, "10.1.1.2", 53, "q"));
  EXPECT_TRUE(a.sends.empty());
  ASSERT_EQ(host.streams().size(), 1u);
  EXPECT_EQ(ToString(host.streams().begin()->second.received), "q");
}

TEST(ScriptLibrary, RejectsEmptyScripts) {
  ScriptLibrary lib;
  EXPECT_THROW(lib.Add({"empty", "x", {}}), ConfigError);
  EXPECT_NE(lib.Find("ftp-amun"), nullptr);
  EXPECT_EQ(lib.Find("nope"), nullptr);
  const ServiceScript& ftp = BuiltinScripts().at("ftp-amun");
  EXPECT_EQ(ftp.Match(ToBytes("PASS x\r\n"), 0), 1u);
  EXPECT_EQ(ftp.Match(ToBytes("USER x\r\n"), 1), std::nullopt);
}

}  // namespace
}  // namespace honeydoc::decoy
