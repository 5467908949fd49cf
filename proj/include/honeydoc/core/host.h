#ifndef HONEYDOC_CORE_HOST_H_
#define HONEYDOC_CORE_HOST_H_

#include <cstdint>
#include <functional>
#include <vector>

#include "honeydoc/core/segment.h"
#include "honeydoc/core/time.h"
#include "honeydoc/core/trace.h"

namespace honeydoc {

// What an end host asks the event loop to do in reaction to an input. Hosts
// never touch the event queue directly.
// Supplies initial sequence numbers; one seeded generator per run.
using IsnSource = std::function<std::uint32_t()>;

struct TimedSegment {
  SimTime delay{0};
  Segment segment;
};

struct TimerRequest {
  SimTime delay{0};
  std::uint64_t tag = 0;
};

struct HostNote {
  EventKind kind = EventKind::kDecoyLog;
  EventFields fields;
};

struct HostActions {
  std::vector<TimedSegment> sends;
  std::vector<TimerRequest> timers;
  std::vector<HostNote> notes;

  void Send(Segment seg, SimTime delay = SimTime(0)) {
    sends.push_back({delay, std::move(seg)});
  }
  void Timer(SimTime delay, std::uint64_t tag) { timers.push_back({delay, tag}); }
  void Note(EventKind kind, EventFields fields) {
    notes.push_back({kind, std::move(fields)});
  }
};

}  // namespace honeydoc

#endif  // HONEYDOC_CORE_HOST_H_
