#ifndef HONEYDOC_SIMNET_TOPOLOGY_H_
#define HONEYDOC_SIMNET_TOPOLOGY_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "honeydoc/core/time.h"

namespace honeydoc::simnet {

enum class NodeKind { kAttacker, kDecoy, kSwitch };

std::string_view NodeKindName(NodeKind kind);  // "attacker" / "decoy" / "switch"

struct Link {
  std::string name;
  std::string a_node;
  int a_port = 0;
  std::string b_node;
  int b_port = 0;
  SimTime latency{0};
};

struct PortRef {
  std::string node;
  int port = 0;
  std::size_t link = 0;
};

// Nodes and bidirectional point-to-point links. Hosts (attackers, decoys)
// use port 1; switch ports are explicit.
class Topology {
 public:
  // Throws ConfigError on a duplicate name.
  void AddNode(const std::string& name, NodeKind kind, bool is_fcf = false);
  // Throws ConfigError for unknown nodes, reused ports or duplicate names.
  // An empty name becomes "a-b" (with ports appended on a clash).
  const Link& AddLink(Link link);

  bool HasNode(std::string_view name) const;
  NodeKind KindOf(const std::string& name) const;
  const std::vector<std::string>& node_order() const { return order_; }
  const std::vector<Link>& links() const { return links_; }

  // The far end of the link on (node, port).
  std::optional<PortRef> Peer(const std::string& node, int port) const;
  // The link attached to (node, port).
  const Link* LinkAt(const std::string& node, int port) const;
  // A host's only port; throws ConfigError when it has none.
  int HostPort(const std::string& node) const;
  // Ports of `node` in ascending order.
  std::vector<int> PortsOf(const std::string& node) const;

  // Every attacker must reach some decoy on a path through an FCF switch.
  // Throws ConfigError otherwise.
  void Validate() const;

 private:
  struct NodeInfo {
    NodeKind kind;
    bool is_fcf;
  };
  std::map<std::string, NodeInfo, std::less<>> nodes_;
  std::vector<std::string> order_;
  std::vector<Link> links_;
  std::map<std::pair<std::string, int>, std::size_t> port_links_;
};

}  // namespace honeydoc::simnet

#endif  // HONEYDOC_SIMNET_TOPOLOGY_H_
