#ifndef HONEYDOC_DATAPLANE_SWITCH_NODE_H_
#define HONEYDOC_DATAPLANE_SWITCH_NODE_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "honeydoc/dataplane/flow.h"

namespace honeydoc::dataplane {

// FCF isolates endpoints by switch port; SPF rewrites seq/ack in front of a
// redirect target.
enum class SwitchRole { kFcf, kSpf };

std::string_view SwitchRoleName(SwitchRole role);

// A single-table OpenFlow-style switch. Lookup order is priority descending,
// then install time ascending; a table miss drops.
class SwitchNode {
 public:
  SwitchNode(std::string name, SwitchRole role)
      : name_(std::move(name)), role_(role) {}

  const std::string& name() const { return name_; }
  SwitchRole role() const { return role_; }
  const std::vector<FlowEntry>& table() const { return table_; }

  // Throws ContractViolation when the action list is empty or lacks a
  // terminal action. Duplicates are kept; the earlier one wins.
  void Install(FlowEntry entry);

  // Removes every entry carrying `cookie`; returns how many were removed.
  std::size_t RemoveByCookie(std::uint64_t cookie);

  // Best entry for the frame, with its counters bumped; nullptr on a miss.
  const FlowEntry* Match(const Segment& seg, int in_port);

  // Match then ApplyActions; a miss yields Dropped.
  Outcome ProcessIngress(const Segment& seg, int in_port);

  // Frames that matched some entry since construction.
  std::uint64_t matched_total() const { return matched_total_; }

 private:
  std::string name_;
  SwitchRole role_;
  std::vector<FlowEntry> table_;
  std::uint64_t matched_total_ = 0;
};

}  // namespace honeydoc::dataplane

#endif  // HONEYDOC_DATAPLANE_SWITCH_NODE_H_
