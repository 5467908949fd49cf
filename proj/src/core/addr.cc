#include "honeydoc/core/addr.h"

#include <charconv>

#include <fmt/format.h>

#include "honeydoc/core/error.h"

namespace honeydoc {
namespace {

int HexNibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

MacAddr MacAddr::Parse(std::string_view text) {
  if (text.size() != 17) {
    throw ParseError("MAC address must be 17 characters: '" +
                         std::string(text) + "'",
                     0, 0);
  }
  std::array<std::uint8_t, 6> octets{};
  for (std::size_t i = 0; i < 6; ++i) {
    std::size_t pos = i * 3;
    int hi = HexNibble(text[pos]);
    int lo = HexNibble(text[pos + 1]);
    if (hi < 0 || lo < 0) {
      throw ParseError("bad hex digit in MAC address", 0, pos);
    }
    if (i < 5 && text[pos + 2] != ':') {
      throw ParseError("expected ':' in MAC address", 0, pos + 2);
    }
    octets[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return MacAddr(octets);
}

std::string MacAddr::ToString() const {
  return fmt::format("{:02x}:{:02x}:{:02x}:{:02x}:{:02x}:{:02x}", octets_[0],
                     octets_[1], octets_[2], octets_[3], octets_[4],
                     octets_[5]);
}

IpAddr IpAddr::Parse(std::string_view text) {
  std::uint32_t value = 0;
  std::size_t pos = 0;
  for (int part = 0; part < 4; ++part) {
    if (part > 0) {
      if (pos >= text.size() || text[pos] != '.') {
        throw ParseError("expected '.' in IPv4 address '" +
                             std::string(text) + "'",
                         0, pos);
      }
      ++pos;
    }
    std::size_t start = pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    std::size_t len = pos - start;
    if (len == 0 || len > 3 || (len > 1 && text[start] == '0')) {
      throw ParseError("bad IPv4 octet in '" + std::string(text) + "'", 0,
                       start);
    }
    unsigned octet = 0;
    std::from_chars(text.data() + start, text.data() + pos, octet);
    if (octet > 255) {
      throw ParseError("IPv4 octet out of range in '" + std::string(text) + "'",
                       0, start);
    }
    value = (value << 8) | octet;
  }
  if (pos != text.size()) {
    throw ParseError("trailing characters in IPv4 address '" +
                         std::string(text) + "'",
                     0, pos);
  }
  return IpAddr(value);
}

std::string IpAddr::ToString() const {
  return fmt::format("{}.{}.{}.{}", value_ >> 24, (value_ >> 16) & 0xff,
                     (value_ >> 8) & 0xff, value_ & 0xff);
}

}  // namespace honeydoc
