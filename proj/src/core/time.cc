#include "honeydoc/core/time.h"

#include <charconv>

#include <fmt/format.h>

#include "honeydoc/core/error.h"

namespace honeydoc {

std::string FormatMillis(SimTime t) {
  std::int64_t us = t.count();
  const char* sign = "";
  if (us < 0) {
    sign = "-";
    us = -us;
  }
  return fmt::format("{}{}.{:03d}", sign, us / 1000, us % 1000);
}

SimTime ParseMillis(std::string_view text) {
  bool negative = false;
  std::string_view rest = text;
  if (!rest.empty() && rest.front() == '-') {
    negative = true;
    rest.remove_prefix(1);
  }
  auto dot = rest.find('.');
  std::string_view whole = rest.substr(0, dot);
  std::string_view frac =
      dot == std::string_view::npos ? std::string_view() : rest.substr(dot + 1);
  if (whole.empty() || frac.size() > 3) {
    throw ParseError("bad millisecond value '" + std::string(text) + "'", 0, 0);
  }
  std::int64_t ms = 0;
  auto [p, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), ms);
  if (ec != std::errc() || p != whole.data() + whole.size()) {
    throw ParseError("bad millisecond value '" + std::string(text) + "'", 0, 0);
  }
  std::int64_t us = 0;
  int scale = 100;
  for (char c : frac) {
    if (c < '0' || c > '9') {
      throw ParseError("bad millisecond value '" + std::string(text) + "'", 0,
                       0);
    }
    us += (c - '0') * scale;
    scale /= 10;
  }
  std::int64_t total = ms * 1000 + us;
  return SimTime(negative ? -total : total);
}

}  // namespace honeydoc
