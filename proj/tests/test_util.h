#ifndef HONEYDOC_TESTS_TEST_UTIL_H_
#define HONEYDOC_TESTS_TEST_UTIL_H_

#include <cstdint>
#include <string>

#include "honeydoc/core/segment.h"

namespace honeydoc::testing {

inline Segment Tcp(const std::string& src, std::uint16_t sport, const std::string& dst,
                   std::uint16_t dport, TcpFlags flags, std::uint32_t seq = 0,
                   std::uint32_t ack = 0, std::string payload = "") {
  Segment s;
  s.src_mac = MacAddr::Parse("02:00:00:00:00:0a");
  s.dst_mac = MacAddr::Parse("02:00:00:00:00:0b");
  s.src_ip = IpAddr::Parse(src);
  s.dst_ip = IpAddr::Parse(dst);
  s.src_port = sport;
  s.dst_port = dport;
  s.flags = flags;
  s.seq = seq;
  s.ack = ack;
  s.payload = ToBytes(payload);
  return s;
}

inline Segment Udp(const std::string& src, std::uint16_t sport, const std::string& dst,
                   std::uint16_t dport, std::string payload = "") {
  Segment s = Tcp(src, sport, dst, dport, 0, 0, 0, std::move(payload));
  s.proto = Proto::kUdp;
  return s;
}

}  // namespace honeydoc::testing

#endif  // HONEYDOC_TESTS_TEST_UTIL_H_
