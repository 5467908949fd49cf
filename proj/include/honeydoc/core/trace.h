#ifndef HONEYDOC_CORE_TRACE_H_
#define HONEYDOC_CORE_TRACE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "honeydoc/core/segment.h"
#include "honeydoc/core/time.h"

namespace honeydoc {

enum class EventKind {
  kFrameDelivered,
  kAlert,
  kDecision,
  kFlowInstalled,
  kDecoyLog,
  kConnTerminated,
};

std::string_view EventKindName(EventKind kind);
std::optional<EventKind> ParseEventKind(std::string_view name);

// A delivered frame plus its sequence numbers relative to each side's ISN as
// observed at the capture location (absolute values stay in `segment`).
struct FrameRecord {
  Segment segment;
  std::uint32_t rel_seq = 0;
  std::uint32_t rel_ack = 0;

  bool operator==(const FrameRecord&) const = default;
};

using EventFields = std::vector<std::pair<std::string, std::string>>;

struct TraceEvent {
  SimTime time{0};
  EventKind kind = EventKind::kDecision;
  // Link name for frames; node name otherwise.
  std::string location;
  std::optional<FrameRecord> frame;
  EventFields fields;

  // Value of the first field named `key`, or empty.
  std::string Field(std::string_view key) const;
  bool HasField(std::string_view key) const;

  bool operator==(const TraceEvent&) const = default;
};

// Topology description carried in the trace header so that validators and
// reports need nothing but the trace file.
struct TraceNode {
  std::string name;
  std::string kind;  // attacker | decoy | switch
  std::string role;  // LIH/MIH/HIH, FCF/SPF, or "-"
  std::optional<IpAddr> ip;
  std::optional<MacAddr> mac;

  bool operator==(const TraceNode&) const = default;
};

struct TraceLink {
  std::string name;
  std::string a_node;
  int a_port = 0;
  std::string b_node;
  int b_port = 0;
  SimTime latency{0};

  bool Touches(std::string_view node) const {
    return a_node == node || b_node == node;
  }
  bool operator==(const TraceLink&) const = default;
};

struct Trace {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<TraceNode> nodes;
  std::vector<TraceLink> links;
  std::vector<TraceEvent> events;

  std::string Meta(std::string_view key) const;
  const TraceNode* FindNode(std::string_view name) const;
  // Names of links with one end at `node`.
  std::vector<std::string> LinksOf(std::string_view node) const;

  bool operator==(const Trace&) const = default;
};

// Line format for FrameDelivered events (tab separated):
//   time_ms kind location src_ip:port dst_ip:port flags relseq relack len
//   abs_seq abs_ack src_mac dst_mac proto payload_hex
// The first nine columns are the stable display contract; the trailing six
// make the line lossless. Other kinds use
//   time_ms kind location key=value...
std::string FormatEventLine(const TraceEvent& event);
TraceEvent ParseEventLine(std::string_view line);

std::string WriteTrace(const Trace& trace);
// Throws ParseError with the offending line number.
Trace ReadTrace(std::string_view text);

// Tracks ISNs per capture location and connection so that frames can be
// displayed with relative sequence numbers.
class RelativeSeqTracker {
 public:
  FrameRecord Annotate(const std::string& location, const Segment& seg);

 private:
  using Endpoint = std::pair<std::uint32_t, std::uint16_t>;
  using Key = std::tuple<std::string, Endpoint, Endpoint, Proto>;
  std::map<Key, std::map<Endpoint, std::uint32_t>> isns_;
};

// Accumulates a trace; rejects events that go back in time.
class TraceRecorder {
 public:
  Trace& trace() { return trace_; }
  const Trace& trace() const { return trace_; }

  void Frame(SimTime time, const std::string& location, const Segment& seg);
  void Event(SimTime time, EventKind kind, const std::string& location,
             EventFields fields);

 private:
  void Append(TraceEvent event);

  Trace trace_;
  RelativeSeqTracker tracker_;
};

}  // namespace honeydoc

#endif  // HONEYDOC_CORE_TRACE_H_
