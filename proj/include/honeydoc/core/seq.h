#ifndef HONEYDOC_CORE_SEQ_H_
#define HONEYDOC_CORE_SEQ_H_

#include <cstdint>

namespace honeydoc {

// A sequence-space offset, |delta| < 2^32.
using SeqDelta = std::int64_t;

inline constexpr SeqDelta kSeqModulus = SeqDelta{1} << 32;

// (base + delta) mod 2^32. Throws ContractViolation when |delta| >= 2^32.
std::uint32_t SeqAdd(std::uint32_t base, SeqDelta delta);

// The offset d in (-2^31, 2^31] with SeqAdd(from, d) == to.
SeqDelta SeqOffset(std::uint32_t to, std::uint32_t from);

// RFC 793 style modular comparison: a is strictly before b.
constexpr bool SeqBefore(std::uint32_t a, std::uint32_t b) {
  return static_cast<std::int32_t>(a - b) < 0;
}

}  // namespace honeydoc

#endif  // HONEYDOC_CORE_SEQ_H_
