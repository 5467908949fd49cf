#ifndef HONEYDOC_CORE_SEGMENT_H_
#define HONEYDOC_CORE_SEGMENT_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "honeydoc/core/addr.h"
#include "honeydoc/core/bytes.h"

namespace honeydoc {

// Largest payload carried by one simulated frame. Larger writes are split.
inline constexpr std::size_t kMaxSegmentPayload = 1448;

enum class Proto : std::uint8_t { kTcp, kUdp };

std::string_view ProtoName(Proto proto);  // "tcp" / "udp"
std::optional<Proto> ParseProto(std::string_view name);

enum TcpFlag : std::uint8_t {
  kSyn = 1 << 0,
  kAck = 1 << 1,
  kPsh = 1 << 2,
  kFin = 1 << 3,
  kRst = 1 << 4,
};

class TcpFlags {
 public:
  constexpr TcpFlags() = default;
  constexpr TcpFlags(std::uint8_t bits) : bits_(bits & 0x1f) {}  // NOLINT

  constexpr bool Has(TcpFlag f) const { return (bits_ & f) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint8_t bits() const { return bits_; }

  // Wireshark order: "SYN,ACK", "PSH,ACK", "FIN,ACK", "RST"; "-" when empty.
  std::string ToString() const;
  static TcpFlags Parse(std::string_view text);

  constexpr bool operator==(const TcpFlags&) const = default;

 private:
  std::uint8_t bits_ = 0;
};

// One simulated Ethernet/IPv4/TCP-or-UDP frame. UDP frames carry no flags
// and zero seq/ack.
struct Segment {
  MacAddr src_mac;
  MacAddr dst_mac;
  IpAddr src_ip;
  IpAddr dst_ip;
  Proto proto = Proto::kTcp;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;
  TcpFlags flags;
  std::uint32_t seq = 0;
  std::uint32_t ack = 0;
  Bytes payload;

  bool is_tcp() const { return proto == Proto::kTcp; }
  std::size_t length() const { return payload.size(); }

  bool operator==(const Segment&) const = default;
};

// Unchecked field bundle accepted by MakeSegment; ports are wide on purpose
// so that out-of-range input can be reported instead of silently truncated.
struct SegmentSpec {
  MacAddr src_mac;
  MacAddr dst_mac;
  IpAddr src_ip;
  IpAddr dst_ip;
  Proto proto = Proto::kTcp;
  std::int64_t src_port = 0;
  std::int64_t dst_port = 0;
  TcpFlags flags;
  std::int64_t seq = 0;
  std::int64_t ack = 0;
  Bytes payload;
};

// Validates and builds a segment. Throws SegmentError naming the field.
Segment MakeSegment(const SegmentSpec& spec);

// Throws SegmentError when `seg` breaks a segment invariant.
void ValidateSegment(const Segment& seg);

}  // namespace honeydoc

#endif  // HONEYDOC_CORE_SEGMENT_H_
