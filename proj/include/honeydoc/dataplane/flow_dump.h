#ifndef HONEYDOC_DATAPLANE_FLOW_DUMP_H_
#define HONEYDOC_DATAPLANE_FLOW_DUMP_H_

#include <string>

#include "honeydoc/dataplane/switch_node.h"

namespace honeydoc::dataplane {

// "priority=2,tcp,tp_dst=21" style; proto and fields only when constrained.
std::string FormatMatch(int priority, const MatchFields& match);

// "CONTROLLER:65535", "drop", "set_tcp_ack_diff:4000,output:3", ...
std::string FormatActions(const std::vector<FlowAction>& actions);

// One ovs-ofctl style line:
//   cookie=0x0, duration=1.500s, table=0, n_packets=0, n_bytes=0,
//   priority=2,tcp,tp_dst=21 actions=CONTROLLER:65535
std::string FormatEntry(const FlowEntry& entry, SimTime now);

// Every entry in lookup order, one line each, LF-terminated.
std::string DumpFlows(const SwitchNode& sw, SimTime now);

// The dump with durations removed, for golden comparisons.
std::string NormalizedDump(const SwitchNode& sw);

}  // namespace honeydoc::dataplane

#endif  // HONEYDOC_DATAPLANE_FLOW_DUMP_H_
