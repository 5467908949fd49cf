#ifndef HONEYDOC_SIMNET_STATS_H_
#define HONEYDOC_SIMNET_STATS_H_

#include <cstdint>
#include <map>
#include <string_view>

#include "honeydoc/core/trace.h"

namespace honeydoc::simnet {

// FrameDelivered events on links attached to `node`, counted per bin. Keys
// are bin indices (time / bin); empty bins are absent. Throws
// ContractViolation when bin <= 0.
std::map<std::int64_t, std::uint64_t> PacketsPerBin(const Trace& trace,
                                                     std::string_view node,
                                                     SimTime bin);

}  // namespace honeydoc::simnet

#endif  // HONEYDOC_SIMNET_STATS_H_
