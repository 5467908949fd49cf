#include "honeydoc/dataplane/switch_node.h"

#include <algorithm>

#include "honeydoc/core/error.h"

namespace honeydoc::dataplane {

std::string_view SwitchRoleName(SwitchRole role) {
  return role == SwitchRole::kFcf ? "FCF" : "SPF";
}

void SwitchNode::Install(FlowEntry entry) {
  if (entry.actions.empty()) {
    throw ContractViolation("flow entry on " + name_ + " has no actions");
  }
  if (std::none_of(entry.actions.begin(), entry.actions.end(), IsTerminal)) {
    throw ContractViolation("flow entry on " + name_ +
                            " has no terminal action");
  }
  // Insert after every entry that sorts before or equal to it, which keeps
  // equal (priority, install_time) entries in installation order.
  auto pos = std::find_if(table_.begin(), table_.end(), [&](const FlowEntry& e) {
    if (e.priority != entry.priority) return e.priority < entry.priority;
    return e.install_time > entry.install_time;
  });
  table_.insert(pos, std::move(entry));
}

std::size_t SwitchNode::RemoveByCookie(std::uint64_t cookie) {
  return std::erase_if(table_,
                       [&](const FlowEntry& e) { return e.cookie == cookie; });
}

const FlowEntry* SwitchNode::Match(const Segment& seg, int in_port) {
  for (FlowEntry& e : table_) {
    if (!e.match.Matches(seg, in_port)) continue;
    ++e.n_packets;
    e.n_bytes += seg.payload.size();
    ++matched_total_;
    return &e;
  }
  return nullptr;
}

Outcome SwitchNode::ProcessIngress(const Segment& seg, int in_port) {
  const FlowEntry* entry = Match(seg, in_port);
  if (entry == nullptr) return Dropped{};
  return ApplyActions(seg, entry->actions);
}

}  // namespace honeydoc::dataplane
