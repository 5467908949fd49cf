#include "honeydoc/core/five_tuple.h"

#include <charconv>

#include <fmt/format.h>

#include "honeydoc/core/error.h"

namespace honeydoc {
namespace {

void ParseEndpoint(std::string_view text, IpAddr& ip, std::uint16_t& port) {
  auto colon = text.rfind(':');
  if (colon == std::string_view::npos) {
    throw ParseError("endpoint needs ip:port: '" + std::string(text) + "'", 0,
                     0);
  }
  ip = IpAddr::Parse(text.substr(0, colon));
  std::string_view p = text.substr(colon + 1);
  unsigned value = 0;
  auto [end, ec] = std::from_chars(p.data(), p.data() + p.size(), value);
  if (ec != std::errc() || end != p.data() + p.size() || value > 65535) {
    throw ParseError("bad port in '" + std::string(text) + "'", 0, colon + 1);
  }
  port = static_cast<std::uint16_t>(value);
}

}  // namespace

std::string FiveTuple::ToString() const {
  return fmt::format("{}:{}>{}:{}/{}", src_ip.ToString(), src_port,
                     dst_ip.ToString(), dst_port, ProtoName(proto));
}

FiveTuple FiveTuple::Parse(std::string_view text) {
  auto gt = text.find('>');
  auto slash = text.rfind('/');
  if (gt == std::string_view::npos || slash == std::string_view::npos ||
      slash < gt) {
    throw ParseError("bad five-tuple '" + std::string(text) + "'", 0, 0);
  }
  FiveTuple t;
  ParseEndpoint(text.substr(0, gt), t.src_ip, t.src_port);
  ParseEndpoint(text.substr(gt + 1, slash - gt - 1), t.dst_ip, t.dst_port);
  auto proto = ParseProto(text.substr(slash + 1));
  if (!proto) throw ParseError("bad protocol in five-tuple", 0, slash + 1);
  t.proto = *proto;
  return t;
}

FiveTuple FiveTupleOf(const Segment& seg) {
  return {seg.src_ip, seg.src_port, seg.dst_ip, seg.dst_port, seg.proto};
}

}  // namespace honeydoc
