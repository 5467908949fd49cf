#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <gtest/gtest.h>

#include "honeydoc/core/addr.h"
#include "honeydoc/core/bytes.h"
#include "honeydoc/core/error.h"
#include "honeydoc/core/five_tuple.h"
#include "honeydoc/core/segment.h"
#include "honeydoc/core/seq.h"
#include "honeydoc/core/time.h"
#include "honeydoc/core/trace.h"
#include "test_util.h"

namespace honeydoc {
namespace {

using boost::multiprecision::cpp_int;
using testing::Tcp;
using testing::Udp;

// Arbitrary-precision reference for modular sequence addition.
std::uint32_t OracleSeqAdd(std::uint32_t base, std::int64_t delta) {
  const cpp_int modulus = cpp_int(1) << 32;
  cpp_int r = (cpp_int(base) + cpp_int(delta)) % modulus;
  if (r < 0) r += modulus;
  return r.convert_to<std::uint32_t>();
}

std::vector<std::uint32_t> BoundaryBases() {
  std::vector<std::uint32_t> out = {0, 1, 2, 43, 44, 0x7ffffffe, 0x7fffffff,
                                    0x80000000, 0x80000001};
  for (std::uint32_t i = 0; i <= 50; ++i) out.push_back(0xffffffffu - i);
  return out;
}

std::vector<std::int64_t> BoundaryDeltas() {
  const std::int64_t m = kSeqModulus;
  std::vector<std::int64_t> out = {0,          1,          -1,         43,
                                   44,         -44,        m / 2 - 1,  m / 2,
                                   -(m / 2),   m / 2 + 1,  -(m / 2) - 1,
                                   m - 1,      -(m - 1),   m - 2,      -(m - 2)};
  for (std::int64_t i = 1; i <= 50; ++i) {
    out.push_back(i);
    out.push_back(-i);
    out.push_back(m - i);
    out.push_back(-(m - i));
  }
  return out;
}

TEST(SeqAdd, MatchesOracleOnBoundaries) {
  for (std::uint32_t base : BoundaryBases()) {
    for (std::int64_t delta : BoundaryDeltas()) {
      ASSERT_EQ(SeqAdd(base, delta), OracleSeqAdd(base, delta))
          << "base=" << base << " delta=" << delta;
    }
  }
}

TEST(SeqAdd, MatchesOracleOnRandomPairs) {
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::uint32_t> base_dist;
  std::uniform_int_distribution<std::int64_t> delta_dist(-(kSeqModulus - 1),
                                                         kSeqModulus - 1);
  for (int i = 0; i < 10000; ++i) {
    std::uint32_t base = base_dist(rng);
    std::int64_t delta = delta_dist(rng);
    ASSERT_EQ(SeqAdd(base, delta), OracleSeqAdd(base, delta))
        << "base=" << base << " delta=" << delta;
  }
}

TEST(SeqAdd, RejectsOutOfRangeDelta) {
  EXPECT_THROW(SeqAdd(0, kSeqModulus), ContractViolation);
  EXPECT_THROW(SeqAdd(0, -kSeqModulus), ContractViolation);
  EXPECT_THROW(SeqAdd(5, kSeqModulus * 3), ContractViolation);
}

TEST(SeqAdd, WrapExamples) {
  EXPECT_EQ(SeqAdd(0xffffffffu, 1), 0u);
  EXPECT_EQ(SeqAdd(0xffffffd6u, 44), 2u);
  EXPECT_EQ(SeqAdd(3, -4), 0xffffffffu);
}

TEST(SeqOffset, InvertsSeqAdd) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::uint32_t> dist;
  std::vector<std::uint32_t> values = BoundaryBases();
  for (int i = 0; i < 200; ++i) values.push_back(dist(rng));
  for (std::uint32_t to : values) {
    for (std::uint32_t from : values) {
      SeqDelta d = SeqOffset(to, from);
      ASSERT_GT(d, -(kSeqModulus / 2));
      ASSERT_LE(d, kSeqModulus / 2);
      ASSERT_EQ(SeqAdd(from, d), to);
    }
  }
}

TEST(SeqBefore, ModularOrder) {
  EXPECT_TRUE(SeqBefore(0xfffffff0u, 5));
  EXPECT_FALSE(SeqBefore(5, 0xfffffff0u));
  EXPECT_FALSE(SeqBefore(7, 7));
  EXPECT_TRUE(SeqBefore(1, 2));
}

TEST(Addr, RoundTrip) {
  EXPECT_EQ(IpAddr::Parse("10.1.0.2").ToString(), "10.1.0.2");
  EXPECT_EQ(IpAddr::Parse("255.255.255.255").value(), 0xffffffffu);
  EXPECT_EQ(IpAddr::FromOctets(192, 0, 2, 53), IpAddr::Parse("192.0.2.53"));
  EXPECT_EQ(MacAddr::Parse("02:00:00:01:01:02").ToString(), "02:00:00:01:01:02");
  EXPECT_EQ(MacAddr::Parse("AA:bb:CC:dd:EE:ff").ToString(), "aa:bb:cc:dd:ee:ff");
}

TEST(Addr, RejectsMalformed) {
  for (const char* bad : {"", "10.1.0", "10.1.0.2.3", "256.0.0.1", "10.01.0.2",
                          "a.b.c.d", "10..0.2", "10.1.0.2 "}) {
    EXPECT_THROW(IpAddr::Parse(bad), ParseError) << bad;
  }
  for (const char* bad : {"", "02:00:00:00:00", "02:00:00:00:00:0g",
                          "02-00-00-00-00-00", "02:00:00:00:00:000"}) {
    EXPECT_THROW(MacAddr::Parse(bad), ParseError) << bad;
  }
}

TEST(Bytes, EscapeRoundTripsEveryByte) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> dist(0, 255);
  for (int i = 0; i < 500; ++i) {
    Bytes b(static_cast<std::size_t>(i % 64));
    for (auto& x : b) x = static_cast<std::uint8_t>(dist(rng));
    ASSERT_EQ(UnescapeBytes(EscapeBytes(b)), b);
    ASSERT_EQ(HexDecode(HexEncode(b)), b);
  }
  EXPECT_EQ(EscapeBytes(ToBytes("USER anonymous\r\n")), "USER anonymous\\r\\n");
  EXPECT_EQ(HexEncode(ToBytes("SSH")), "535348");
}

TEST(Bytes, ContainsBytes) {
  Bytes hay = ToBytes("EHLO mail.example\r\n");
  EXPECT_TRUE(ContainsBytes(hay, ToBytes("EHLO")));
  EXPECT_TRUE(ContainsBytes(hay, ToBytes("")));
  EXPECT_FALSE(ContainsBytes(hay, ToBytes("HELO")));
}

TEST(TcpFlags, Names) {
  EXPECT_EQ(TcpFlags(kSyn | kAck).ToString(), "SYN,ACK");
  EXPECT_EQ(TcpFlags(kPsh | kAck).ToString(), "PSH,ACK");
  EXPECT_EQ(TcpFlags(kFin | kAck).ToString(), "FIN,ACK");
  EXPECT_EQ(TcpFlags(kRst).ToString(), "RST");
  EXPECT_EQ(TcpFlags().ToString(), "-");
  for (std::uint8_t bits = 0; bits < 32; ++bits) {
    EXPECT_EQ(TcpFlags::Parse(TcpFlags(bits).ToString()), TcpFlags(bits));
  }
  EXPECT_THROW(TcpFlags::Parse("SYN,URG"), ParseError);
}

TEST(Segment, MakeSegmentNamesBadField) {
  SegmentSpec spec;
  spec.flags = kSyn;
  spec.src_port = 65536;
  try {
    MakeSegment(spec);
    FAIL() << "expected SegmentError";
  } catch (const SegmentError& e) {
    EXPECT_EQ(e.field(), "src_port");
  }
  spec.src_port = 1;
  spec.seq = -1;
  try {
    MakeSegment(spec);
    FAIL() << "expected SegmentError";
  } catch (const SegmentError& e) {
    EXPECT_EQ(e.field(), "seq");
  }
  spec.seq = 0xffffffffLL;
  EXPECT_EQ(MakeSegment(spec).seq, 0xffffffffu);
}

TEST(Segment, Invariants) {
  Segment ok = Tcp("10.0.0.1", 1, "10.0.0.2", 2, kSyn);
  EXPECT_NO_THROW(ValidateSegment(ok));

  Segment big = Tcp("10.0.0.1", 1, "10.0.0.2", 2, kPsh | kAck, 0, 0,
                    std::string(kMaxSegmentPayload + 1, 'x'));
  EXPECT_THROW(ValidateSegment(big), SegmentError);
  big.payload.pop_back();
  EXPECT_NO_THROW(ValidateSegment(big));

  Segment flagless = Tcp("10.0.0.1", 1, "10.0.0.2", 2, 0);
  EXPECT_THROW(ValidateSegment(flagless), SegmentError);

  Segment udp = Udp("10.0.0.1", 1, "10.0.0.2", 53, "q");
  EXPECT_NO_THROW(ValidateSegment(udp));
  udp.flags = kAck;
  EXPECT_THROW(ValidateSegment(udp), SegmentError);
  udp.flags = 0;
  udp.seq = 1;
  EXPECT_THROW(ValidateSegment(udp), SegmentError);
}

TEST(FiveTuple, FormatAndParse) {
  Segment s = Tcp("10.1.0.2", 36093, "10.1.1.2", 22, kSyn);
  FiveTuple t = FiveTupleOf(s);
  EXPECT_EQ(t.ToString(), "10.1.0.2:36093>10.1.1.2:22/tcp");
  EXPECT_EQ(FiveTuple::Parse(t.ToString()), t);
  EXPECT_EQ(t.Reversed().Reversed(), t);
  EXPECT_NE(t.Reversed(), t);
}

TEST(Time, FormatAndParseMillis) {
  EXPECT_EQ(FormatMillis(Millis(962)), "962.000");
  EXPECT_EQ(FormatMillis(SimTime(1)), "0.001");
  EXPECT_EQ(FormatMillis(SimTime(-1500)), "-1.500");
  EXPECT_EQ(ParseMillis("0.5"), SimTime(500));
  EXPECT_EQ(ParseMillis("12"), Millis(12));
  EXPECT_EQ(ParseMillis("-1.500"), SimTime(-1500));
  for (std::int64_t us : {0LL, 1LL, 999LL, 1000LL, 123456789LL, -42LL}) {
    EXPECT_EQ(ParseMillis(FormatMillis(SimTime(us))), SimTime(us));
  }
  for (const char* bad : {"", ".5", "1.2345", "1a", "x"}) {
    EXPECT_THROW(ParseMillis(bad), ParseError) << bad;
  }
}

TEST(RelativeSeq, AnnotatesPerLocation) {
  RelativeSeqTracker t;
  auto syn = Tcp("10.0.0.1", 1000, "10.0.0.2", 22, kSyn, 0xfffffff0u);
  auto synack = Tcp("10.0.0.2", 22, "10.0.0.1", 1000, kSyn | kAck, 500, 0xfffffff1u);
  auto data = Tcp("10.0.0.1", 1000, "10.0.0.2", 22, kPsh | kAck, 0xfffffff1u, 501,
                  "hello");
  EXPECT_EQ(t.Annotate("a", syn).rel_seq, 0u);
  FrameRecord r = t.Annotate("a", synack);
  EXPECT_EQ(r.rel_seq, 0u);
  EXPECT_EQ(r.rel_ack, 1u);
  r = t.Annotate("a", data);
  EXPECT_EQ(r.rel_seq, 1u);
  EXPECT_EQ(r.rel_ack, 1u);
  // A different capture point has not seen the handshake.
  EXPECT_EQ(t.Annotate("b", data).rel_seq, 0xfffffff1u);
}

Trace SampleTrace() {
  TraceRecorder rec;
  rec.trace().meta = {{"scenario", "tab\there"}, {"seed", "7"}};
  rec.trace().nodes.push_back({"attacker", "attacker", "-",
                               IpAddr::Parse("10.1.0.2"),
                               MacAddr::Parse("02:00:00:01:00:02")});
  rec.trace().nodes.push_back({"fcf", "switch", "FCF", std::nullopt, std::nullopt});
  rec.trace().links.push_back({"attacker-fcf", "attacker", 1, "fcf", 1, Millis(1)});
  rec.Frame(Millis(1), "attacker-fcf", Tcp("10.1.0.2", 36093, "10.1.1.2", 22, kSyn, 77));
  rec.Frame(SimTime(1500), "attacker-fcf",
            Tcp("10.1.0.2", 36093, "10.1.1.2", 22, kPsh | kAck, 78, 0,
                std::string("a\tb\n\x01\xff", 6)));
  rec.Frame(Millis(2), "attacker-fcf", Udp("10.1.0.2", 5000, "10.1.1.2", 53, ""));
  rec.Event(Millis(3), EventKind::kAlert, "controller",
            {{"sid", "1000002"}, {"msg", "a = b\tc"}});
  rec.Event(Millis(3), EventKind::kDecision, "controller", {});
  return rec.trace();
}

TEST(Trace, WriteReadRoundTrip) {
  Trace t = SampleTrace();
  std::string text = WriteTrace(t);
  Trace back = ReadTrace(text);
  EXPECT_EQ(back, t);
  EXPECT_EQ(WriteTrace(back), text);
  EXPECT_EQ(back.Meta("seed"), "7");
  EXPECT_EQ(back.Meta("absent"), "");
}

TEST(Trace, FrameLineColumns) {
  Trace t = SampleTrace();
  std::string line = FormatEventLine(t.events[0]);
  EXPECT_EQ(line.substr(0, line.find("\t77")),
            "1.000\tFrameDelivered\tattacker-fcf\t10.1.0.2:36093\t10.1.1.2:22\tSYN\t0\t0\t0");
}

TEST(Trace, ReadReportsLineNumber) {
  std::string text = WriteTrace(SampleTrace());
  text += "5.000\tFrameDelivered\tattacker-fcf\tgarbage\n";
  std::size_t lines = 0;
  for (char c : text) lines += c == '\n';
  try {
    ReadTrace(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), lines);
  }
}

TEST(Trace, RecorderRejectsTimeTravel) {
  TraceRecorder rec;
  rec.Event(Millis(5), EventKind::kDecision, "c", {});
  EXPECT_THROW(rec.Event(Millis(4), EventKind::kDecision, "c", {}), ContractViolation);
}

}  // namespace
}  // namespace honeydoc
