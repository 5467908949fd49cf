#include "honeydoc/simnet/simulation.h"

#include <fmt/format.h>

#include "honeydoc/core/error.h"
#include "honeydoc/dataplane/flow_dump.h"

namespace honeydoc::simnet {

void EventQueue::Schedule(SimTime at, std::function<void()> action) {
  if (at < now_) throw ContractViolation("event scheduled in the past");
  heap_.push(Item{at, next_seq_++, std::move(action)});
}

std::size_t EventQueue::RunUntil(SimTime horizon) {
  std::size_t executed = 0;
  while (!heap_.empty() && heap_.top().at < horizon) {
    Item item = heap_.top();
    heap_.pop();
    now_ = item.at;
    item.action();
    ++executed;
  }
  return executed;
}

Simulation::Simulation(Topology topology, SimConfig config)
    : topology_(std::move(topology)), config_(config), rng_(config.seed) {}

Simulation::~Simulation() = default;

dataplane::SwitchNode& Simulation::AddSwitch(const std::string& name,
                                             dataplane::SwitchRole role) {
  if (topology_.KindOf(name) != NodeKind::kSwitch) {
    throw ConfigError("'" + name + "' is not a switch node");
  }
  auto& slot = switches_[name];
  if (slot) throw ConfigError("switch '" + name + "' bound twice");
  slot = std::make_unique<dataplane::SwitchNode>(name, role);
  return *slot;
}

decoy::DecoyHost& Simulation::AddDecoy(decoy::DecoyConfig config,
                                       const decoy::ScriptLibrary* scripts) {
  std::string name = config.name;
  if (topology_.KindOf(name) != NodeKind::kDecoy) {
    throw ConfigError("'" + name + "' is not a decoy node");
  }
  auto& slot = decoys_[name];
  if (slot) throw ConfigError("decoy '" + name + "' bound twice");
  slot = std::make_unique<decoy::DecoyHost>(std::move(config), scripts,
                                            isn_source());
  return *slot;
}

AttackerHost& Simulation::AddAttacker(AttackerConfig config) {
  std::string name = config.name;
  if (topology_.KindOf(name) != NodeKind::kAttacker) {
    throw ConfigError("'" + name + "' is not an attacker node");
  }
  auto& slot = attackers_[name];
  if (slot) throw ConfigError("attacker '" + name + "' bound twice");
  slot = std::make_unique<AttackerHost>(std::move(config), isn_source());
  return *slot;
}

IsnSource Simulation::isn_source() {
  return [this] { return NextIsn(); };
}

void Simulation::AddMeta(std::string key, std::string value) {
  recorder_.trace().meta.emplace_back(std::move(key), std::move(value));
}

dataplane::SwitchNode& Simulation::switch_node(const std::string& name) {
  auto it = switches_.find(name);
  if (it == switches_.end()) throw ConfigError("unknown switch '" + name + "'");
  return *it->second;
}

const decoy::DecoyHost& Simulation::decoy(const std::string& name) const {
  auto it = decoys_.find(name);
  if (it == decoys_.end()) throw ConfigError("unknown decoy '" + name + "'");
  return *it->second;
}

const AttackerHost& Simulation::attacker(const std::string& name) const {
  auto it = attackers_.find(name);
  if (it == attackers_.end()) throw ConfigError("unknown attacker '" + name + "'");
  return *it->second;
}

void Simulation::WriteHeader() {
  Trace& t = recorder_.trace();
  for (const std::string& name : topology_.node_order()) {
    TraceNode n;
    n.name = name;
    n.kind = std::string(NodeKindName(topology_.KindOf(name)));
    n.role = "-";
    if (auto s = switches_.find(name); s != switches_.end()) {
      n.role = std::string(dataplane::SwitchRoleName(s->second->role()));
    } else if (auto d = decoys_.find(name); d != decoys_.end()) {
      const decoy::DecoyConfig& c = d->second->config();
      n.role = std::string(decoy::DecoyClassName(c.cls));
      n.ip = c.ip;
      n.mac = c.mac;
    } else if (auto a = attackers_.find(name); a != attackers_.end()) {
      n.ip = a->second->config().ip;
      n.mac = a->second->config().mac;
    }
    t.nodes.push_back(std::move(n));
  }
  for (const Link& l : topology_.links()) {
    t.links.push_back({l.name, l.a_node, l.a_port, l.b_node, l.b_port, l.latency});
  }
}

const Trace& Simulation::Run() {
  if (ran_) throw ContractViolation("a simulation runs only once");
  ran_ = true;
  topology_.Validate();
  for (const std::string& name : topology_.node_order()) {
    bool bound = switches_.contains(name) || decoys_.contains(name) ||
                 attackers_.contains(name);
    if (!bound) throw ConfigError("node '" + name + "' has no behaviour");
  }
  WriteHeader();
  if (config_.horizon <= SimTime(0)) return recorder_.trace();

  if (controller_ != nullptr) {
    initializing_ = true;
    controller_->Init(*this);
    initializing_ = false;
  }
  for (const std::string& name : topology_.node_order()) {
    if (auto d = decoys_.find(name); d != decoys_.end()) {
      ApplyHostActions(name, d->second->Start());
    } else if (auto a = attackers_.find(name); a != attackers_.end()) {
      ApplyHostActions(name, a->second->Start());
    }
  }
  queue_.RunUntil(config_.horizon);
  return recorder_.trace();
}

void Simulation::Emit(const std::string& node, int port, Segment seg) {
  ValidateSegment(seg);
  auto peer = topology_.Peer(node, port);
  if (!peer) return;
  const Link& link = topology_.links()[peer->link];
  queue_.Schedule(queue_.now() + link.latency,
                  [this, name = link.name, to = peer->node, to_port = peer->port,
                   seg = std::move(seg)] {
                    recorder_.Frame(queue_.now(), name, seg);
                    Deliver(to, to_port, seg);
                  });
}

void Simulation::Deliver(const std::string& node, int port, const Segment& seg) {
  if (auto s = switches_.find(node); s != switches_.end()) {
    dataplane::Outcome outcome = s->second->ProcessIngress(seg, port);
    if (auto* emit = std::get_if<dataplane::EmitOn>(&outcome)) {
      Emit(node, emit->port, std::move(emit->segment));
    } else if (auto* up = std::get_if<dataplane::SentToController>(&outcome)) {
      if (controller_ == nullptr) return;
      ++packet_ins_;
      queue_.Schedule(
          queue_.now() + config_.controller_latency + config_.controller_processing,
          [this, node, port, seg = std::move(up->segment)] {
            controller_->OnPacketIn(*this, node, port, seg);
          });
    }
    return;
  }
  if (auto d = decoys_.find(node); d != decoys_.end()) {
    ApplyHostActions(node, d->second->OnSegment(queue_.now(), seg));
    return;
  }
  if (auto a = attackers_.find(node); a != attackers_.end()) {
    ApplyHostActions(node, a->second->OnSegment(queue_.now(), seg));
  }
}

void Simulation::ApplyHostActions(const std::string& node, HostActions actions) {
  for (HostNote& n : actions.notes) {
    recorder_.Event(queue_.now(), n.kind, node, std::move(n.fields));
  }
  int port = topology_.HostPort(node);
  for (TimedSegment& t : actions.sends) {
    if (t.delay == SimTime(0)) {
      Emit(node, port, std::move(t.segment));
    } else {
      queue_.Schedule(queue_.now() + t.delay,
                      [this, node, port, seg = std::move(t.segment)]() mutable {
                        Emit(node, port, std::move(seg));
                      });
    }
  }
  for (const TimerRequest& t : actions.timers) {
    queue_.Schedule(queue_.now() + t.delay, [this, node, tag = t.tag] {
      HostActions next;
      if (auto d = decoys_.find(node); d != decoys_.end()) {
        next = d->second->OnTimer(queue_.now(), tag);
      } else if (auto a = attackers_.find(node); a != attackers_.end()) {
        next = a->second->OnTimer(queue_.now(), tag);
      }
      ApplyHostActions(node, std::move(next));
    });
  }
}

void Simulation::ApplyFlowMods(const std::string& sw,
                               const std::vector<FlowMod>& mods, bool traced) {
  dataplane::SwitchNode& node = switch_node(sw);
  for (const FlowMod& mod : mods) {
    if (mod.op == FlowMod::Op::kDeleteCookie) {
      std::size_t removed = node.RemoveByCookie(mod.cookie);
      if (traced) {
        recorder_.Event(queue_.now(), EventKind::kFlowInstalled, sw,
                        {{"op", "delete"},
                         {"cookie", fmt::format("{:#x}", mod.cookie)},
                         {"removed", std::to_string(removed)}});
      }
      continue;
    }
    dataplane::FlowEntry entry = mod.entry;
    entry.install_time = queue_.now();
    if (traced) {
      recorder_.Event(queue_.now(), EventKind::kFlowInstalled, sw,
                      {{"op", "add"},
                       {"cookie", fmt::format("{:#x}", entry.cookie)},
                       {"flow", dataplane::FormatMatch(entry.priority, entry.match)},
                       {"actions", dataplane::FormatActions(entry.actions)}});
    }
    node.Install(std::move(entry));
  }
}

void Simulation::SendFlowMods(const std::string& sw, std::vector<FlowMod> mods) {
  if (initializing_) {
    ApplyFlowMods(sw, mods, false);
    return;
  }
  queue_.Schedule(queue_.now() + config_.controller_latency,
                  [this, sw, mods = std::move(mods)] { ApplyFlowMods(sw, mods, true); });
}

void Simulation::PacketOut(const std::string& sw, int port, Segment seg) {
  queue_.Schedule(queue_.now() + config_.controller_latency,
                  [this, sw, port, seg = std::move(seg)]() mutable {
                    Emit(sw, port, std::move(seg));
                  });
}

void Simulation::StartTimer(SimTime delay, std::uint64_t tag) {
  queue_.Schedule(queue_.now() + delay, [this, tag] {
    if (controller_ != nullptr) controller_->OnTimer(*this, tag);
  });
}

void Simulation::Record(EventKind kind, EventFields fields) {
  recorder_.Event(queue_.now(), kind, std::string(kControllerNode),
                  std::move(fields));
}

std::uint32_t Simulation::NextIsn() {
  return static_cast<std::uint32_t>(rng_() & 0xffffffffULL);
}

}  // namespace honeydoc::simnet
