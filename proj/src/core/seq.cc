#include "honeydoc/core/seq.h"

#include <string>

#include "honeydoc/core/error.h"

namespace honeydoc {

std::uint32_t SeqAdd(std::uint32_t base, SeqDelta delta) {
  if (delta <= -kSeqModulus || delta >= kSeqModulus) {
    throw ContractViolation("sequence delta out of range: " +
                            std::to_string(delta));
  }
  std::int64_t sum = static_cast<std::int64_t>(base) + delta;
  sum %= kSeqModulus;
  if (sum < 0) sum += kSeqModulus;
  return static_cast<std::uint32_t>(sum);
}

SeqDelta SeqOffset(std::uint32_t to, std::uint32_t from) {
  std::uint32_t raw = to - from;
  if (raw > 0x80000000u) return static_cast<SeqDelta>(raw) - kSeqModulus;
  return static_cast<SeqDelta>(raw);
}

}  // namespace honeydoc
