#ifndef HONEYDOC_CORE_ADDR_H_
#define HONEYDOC_CORE_ADDR_H_

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace honeydoc {

class MacAddr {
 public:
  constexpr MacAddr() = default;
  constexpr explicit MacAddr(std::array<std::uint8_t, 6> octets)
      : octets_(octets) {}

  // Accepts "aa:bb:cc:dd:ee:ff" (case-insensitive hex). Throws ParseError.
  static MacAddr Parse(std::string_view text);

  // Lowercase colon-separated form.
  std::string ToString() const;
  const std::array<std::uint8_t, 6>& octets() const { return octets_; }

  auto operator<=>(const MacAddr&) const = default;

 private:
  std::array<std::uint8_t, 6> octets_{};
};

// IPv4 only.
class IpAddr {
 public:
  constexpr IpAddr() = default;
  constexpr explicit IpAddr(std::uint32_t value) : value_(value) {}
  static constexpr IpAddr FromOctets(std::uint8_t a, std::uint8_t b,
                                     std::uint8_t c, std::uint8_t d) {
    return IpAddr((std::uint32_t{a} << 24) | (std::uint32_t{b} << 16) |
                  (std::uint32_t{c} << 8) | std::uint32_t{d});
  }

  // Dotted quad without leading zeros. Throws ParseError.
  static IpAddr Parse(std::string_view text);

  std::string ToString() const;
  std::uint32_t value() const { return value_; }

  auto operator<=>(const IpAddr&) const = default;

 private:
  std::uint32_t value_ = 0;
};

}  // namespace honeydoc

#endif  // HONEYDOC_CORE_ADDR_H_
