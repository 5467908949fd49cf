#ifndef HONEYDOC_CORE_TIME_H_
#define HONEYDOC_CORE_TIME_H_

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace honeydoc {

// Simulated time. Integer microseconds keep runs free of float rounding.
using SimTime = std::chrono::microseconds;

constexpr SimTime Millis(std::int64_t ms) { return SimTime(ms * 1000); }

// "12.345" style milliseconds with exactly three decimals.
std::string FormatMillis(SimTime t);
SimTime ParseMillis(std::string_view text);

}  // namespace honeydoc

#endif  // HONEYDOC_CORE_TIME_H_
