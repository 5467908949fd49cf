#ifndef HONEYDOC_DATAPLANE_FLOW_H_
#define HONEYDOC_DATAPLANE_FLOW_H_

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "honeydoc/core/addr.h"
#include "honeydoc/core/segment.h"
#include "honeydoc/core/seq.h"
#include "honeydoc/core/time.h"

namespace honeydoc::dataplane {

// Absent fields are wildcards; an all-absent match covers every frame.
struct MatchFields {
  std::optional<int> in_port;
  std::optional<Proto> proto;
  std::optional<IpAddr> src_ip;
  std::optional<IpAddr> dst_ip;
  std::optional<std::uint16_t> src_port;
  std::optional<std::uint16_t> dst_port;

  bool Matches(const Segment& seg, int port) const;
  bool operator==(const MatchFields&) const = default;
};

struct Drop {
  bool operator==(const Drop&) const = default;
};
struct Output {
  int port = 0;
  bool operator==(const Output&) const = default;
};
struct ToController {
  bool operator==(const ToController&) const = default;
};
// The two sequence-synchronisation actions of the session processing
// forwarder: add a constant offset (mod 2^32) to seq or ack.
struct SetTcpSeqDiff {
  SeqDelta delta = 0;
  bool operator==(const SetTcpSeqDiff&) const = default;
};
struct SetTcpAckDiff {
  SeqDelta delta = 0;
  bool operator==(const SetTcpAckDiff&) const = default;
};
// Stateless address rewriting, used for UDP and outbound redirection.
struct RewriteDst {
  IpAddr ip;
  MacAddr mac;
  bool operator==(const RewriteDst&) const = default;
};
struct RewriteSrc {
  IpAddr ip;
  MacAddr mac;
  bool operator==(const RewriteSrc&) const = default;
};

using FlowAction = std::variant<Drop, Output, ToController, SetTcpSeqDiff,
                                SetTcpAckDiff, RewriteDst, RewriteSrc>;

bool IsTerminal(const FlowAction& action);

struct FlowEntry {
  int priority = 0;
  MatchFields match;
  std::vector<FlowAction> actions;
  std::uint64_t n_packets = 0;
  std::uint64_t n_bytes = 0;
  SimTime install_time{0};
  std::uint64_t cookie = 0;
};

// Result of running a frame through an action list.
struct EmitOn {
  int port = 0;
  Segment segment;
};
struct Dropped {};
struct SentToController {
  Segment segment;
};
using Outcome = std::variant<EmitOn, Dropped, SentToController>;

// Applies rewrites left to right and stops at the first terminal action.
// Throws ContractViolation for seq/ack rewrites on non-TCP frames and for
// lists without a terminal Drop/Output/ToController.
Outcome ApplyActions(Segment seg, std::span<const FlowAction> actions);

}  // namespace honeydoc::dataplane

#endif  // HONEYDOC_DATAPLANE_FLOW_H_
