#include "honeydoc/core/segment.h"

#include <array>
#include <utility>

#include "honeydoc/core/error.h"

namespace honeydoc {
namespace {

constexpr std::array<std::pair<TcpFlag, std::string_view>, 5> kFlagNames = {{
    {kSyn, "SYN"},
    {kRst, "RST"},
    {kFin, "FIN"},
    {kPsh, "PSH"},
    {kAck, "ACK"},
}};

void CheckRange(const char* field, std::int64_t value, std::int64_t max) {
  if (value < 0 || value > max) {
    throw SegmentError(field, "value " + std::to_string(value) +
                                  " outside [0, " + std::to_string(max) + "]");
  }
}

}  // namespace

std::string_view ProtoName(Proto proto) {
  return proto == Proto::kTcp ? "tcp" : "udp";
}

std::optional<Proto> ParseProto(std::string_view name) {
  if (name == "tcp") return Proto::kTcp;
  if (name == "udp") return Proto::kUdp;
  return std::nullopt;
}

std::string TcpFlags::ToString() const {
  if (bits_ == 0) return "-";
  std::string out;
  for (const auto& [flag, name] : kFlagNames) {
    if (!Has(flag)) continue;
    if (!out.empty()) out.push_back(',');
    out += name;
  }
  return out;
}

TcpFlags TcpFlags::Parse(std::string_view text) {
  if (text == "-") return TcpFlags();
  std::uint8_t bits = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string_view token = text.substr(
        pos, comma == std::string_view::npos ? std::string_view::npos
                                             : comma - pos);
    bool known = false;
    for (const auto& [flag, name] : kFlagNames) {
      if (token == name) {
        bits |= flag;
        known = true;
      }
    }
    if (!known) {
      throw ParseError("unknown TCP flag '" + std::string(token) + "'", 0, pos);
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return TcpFlags(bits);
}

Segment MakeSegment(const SegmentSpec& spec) {
  CheckRange("src_port", spec.src_port, 65535);
  CheckRange("dst_port", spec.dst_port, 65535);
  CheckRange("seq", spec.seq, 0xffffffffLL);
  CheckRange("ack", spec.ack, 0xffffffffLL);
  Segment seg;
  seg.src_mac = spec.src_mac;
  seg.dst_mac = spec.dst_mac;
  seg.src_ip = spec.src_ip;
  seg.dst_ip = spec.dst_ip;
  seg.proto = spec.proto;
  seg.src_port = static_cast<std::uint16_t>(spec.src_port);
  seg.dst_port = static_cast<std::uint16_t>(spec.dst_port);
  seg.flags = spec.flags;
  seg.seq = static_cast<std::uint32_t>(spec.seq);
  seg.ack = static_cast<std::uint32_t>(spec.ack);
  seg.payload = spec.payload;
  ValidateSegment(seg);
  return seg;
}

void ValidateSegment(const Segment& seg) {
  if (seg.payload.size() > kMaxSegmentPayload) {
    throw SegmentError("payload", "length " + std::to_string(seg.length()) +
                                      " exceeds " +
                                      std::to_string(kMaxSegmentPayload));
  }
  if (seg.proto == Proto::kTcp) {
    if (seg.flags.empty()) {
      throw SegmentError("flags", "TCP segment needs at least one flag");
    }
  } else {
    if (!seg.flags.empty()) {
      throw SegmentError("flags", "UDP segment cannot carry TCP flags");
    }
    if (seg.seq != 0 || seg.ack != 0) {
      throw SegmentError("seq", "UDP segment cannot carry seq/ack");
    }
  }
}

}  // namespace honeydoc
