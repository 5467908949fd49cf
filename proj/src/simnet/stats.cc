#include "honeydoc/simnet/stats.h"

#include <algorithm>

#include "honeydoc/core/error.h"

namespace honeydoc::simnet {

std::map<std::int64_t, std::uint64_t> PacketsPerBin(const Trace& trace,
                                                     std::string_view node,
                                                     SimTime bin) {
  if (bin <= SimTime(0)) throw ContractViolation("bin width must be positive");
  std::vector<std::string> links = trace.LinksOf(node);
  std::map<std::int64_t, std::uint64_t> out;
  for (const TraceEvent& e : trace.events) {
    if (e.kind != EventKind::kFrameDelivered) continue;
    if (std::find(links.begin(), links.end(), e.location) == links.end()) continue;
    ++out[e.time / bin];
  }
  return out;
}

}  // namespace honeydoc::simnet
