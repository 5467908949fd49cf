#include "honeydoc/simnet/topology.h"

#include <deque>
#include <set>

#include <fmt/format.h>

#include "honeydoc/core/error.h"

namespace honeydoc::simnet {

std::string_view NodeKindName(NodeKind kind) {
  switch (kind) {
    case NodeKind::kAttacker:
      return "attacker";
    case NodeKind::kDecoy:
      return "decoy";
    case NodeKind::kSwitch:
      return "switch";
  }
  return "?";
}

void Topology::AddNode(const std::string& name, NodeKind kind, bool is_fcf) {
  if (!nodes_.emplace(name, NodeInfo{kind, is_fcf}).second) {
    throw ConfigError("duplicate node '" + name + "'");
  }
  order_.push_back(name);
}

const Link& Topology::AddLink(Link link) {
  for (const auto& [node, port] :
       {std::pair{link.a_node, link.a_port}, std::pair{link.b_node, link.b_port}}) {
    if (!HasNode(node)) throw ConfigError("link to unknown node '" + node + "'");
    if (port_links_.contains({node, port})) {
      throw ConfigError(fmt::format("port {}:{} already has a link", node, port));
    }
  }
  if (link.a_node == link.b_node) {
    throw ConfigError("link from '" + link.a_node + "' to itself");
  }
  if (link.latency < SimTime(0)) throw ConfigError("negative link latency");
  auto name_taken = [&](const std::string& n) {
    for (const Link& l : links_) {
      if (l.name == n) return true;
    }
    return false;
  };
  if (link.name.empty()) {
    link.name = link.a_node + "-" + link.b_node;
    if (name_taken(link.name)) {
      link.name = fmt::format("{}:{}-{}:{}", link.a_node, link.a_port,
                              link.b_node, link.b_port);
    }
  }
  if (name_taken(link.name)) throw ConfigError("duplicate link '" + link.name + "'");
  std::size_t index = links_.size();
  port_links_[{link.a_node, link.a_port}] = index;
  port_links_[{link.b_node, link.b_port}] = index;
  links_.push_back(std::move(link));
  return links_.back();
}

bool Topology::HasNode(std::string_view name) const {
  return nodes_.find(name) != nodes_.end();
}

NodeKind Topology::KindOf(const std::string& name) const {
  auto it = nodes_.find(name);
  if (it == nodes_.end()) throw ConfigError("unknown node '" + name + "'");
  return it->second.kind;
}

std::optional<PortRef> Topology::Peer(const std::string& node, int port) const {
  auto it = port_links_.find({node, port});
  if (it == port_links_.end()) return std::nullopt;
  const Link& l = links_[it->second];
  if (l.a_node == node && l.a_port == port) return PortRef{l.b_node, l.b_port, it->second};
  return PortRef{l.a_node, l.a_port, it->second};
}

const Link* Topology::LinkAt(const std::string& node, int port) const {
  auto it = port_links_.find({node, port});
  return it == port_links_.end() ? nullptr : &links_[it->second];
}

int Topology::HostPort(const std::string& node) const {
  std::vector<int> ports = PortsOf(node);
  if (ports.empty()) throw ConfigError("node '" + node + "' has no link");
  return ports.front();
}

std::vector<int> Topology::PortsOf(const std::string& node) const {
  std::vector<int> out;
  for (const auto& [key, index] : port_links_) {
    if (key.first == node) out.push_back(key.second);
  }
  return out;
}

void Topology::Validate() const {
  for (const std::string& start : order_) {
    if (nodes_.at(start).kind != NodeKind::kAttacker) continue;
    // Breadth-first search over (node, crossed an FCF yet).
    std::set<std::pair<std::string, bool>> seen{{start, false}};
    std::deque<std::pair<std::string, bool>> queue{{start, false}};
    bool reached = false;
    while (!queue.empty() && !reached) {
      auto [node, via_fcf] = queue.front();
      queue.pop_front();
      const NodeInfo& info = nodes_.at(node);
      if (info.kind == NodeKind::kDecoy) {
        if (via_fcf) reached = true;
        continue;
      }
      if (info.kind == NodeKind::kAttacker && node != start) continue;
      bool next_fcf = via_fcf || info.is_fcf;
      for (int port : PortsOf(node)) {
        auto peer = Peer(node, port);
        std::pair<std::string, bool> state{peer->node, next_fcf};
        if (seen.insert(state).second) queue.push_back(state);
      }
    }
    if (!reached) {
      throw ConfigError("attacker '" + start +
                        "' cannot reach any decoy through an FCF switch");
    }
  }
}

}  // namespace honeydoc::simnet
