#include "honeydoc/harness/runner.h"

#include "honeydoc/core/error.h"

namespace honeydoc::harness {
namespace {

using orchestrator::ControllerConfig;
using orchestrator::DecoyBinding;
using orchestrator::SpfBinding;

const ScenarioSwitch& TheFcf(const Scenario& s) {
  const ScenarioSwitch* fcf = nullptr;
  for (const ScenarioSwitch& sw : s.switches) {
    if (sw.role != dataplane::SwitchRole::kFcf) continue;
    if (fcf != nullptr) throw ConfigError("scenario has more than one FCF switch");
    fcf = &sw;
  }
  if (fcf == nullptr) throw ConfigError("scenario has no FCF switch");
  return *fcf;
}

std::vector<std::pair<int, std::pair<std::string, int>>> LinksOf(const Scenario& s,
                                                                 const std::string& node) {
  std::vector<std::pair<int, std::pair<std::string, int>>> out;
  for (const ScenarioLink& l : s.links) {
    if (l.a_node == node) out.push_back({l.a_port, {l.b_node, l.b_port}});
    if (l.b_node == node) out.push_back({l.b_port, {l.a_node, l.a_port}});
  }
  return out;
}

// The single port of a host.
std::pair<std::string, int> Uplink(const Scenario& s, const std::string& host) {
  auto links = LinksOf(s, host);
  if (links.size() != 1) {
    throw ConfigError("host '" + host + "' must have exactly one link");
  }
  return links[0].second;
}

bool IsSpf(const Scenario& s, const std::string& name) {
  for (const ScenarioSwitch& sw : s.switches) {
    if (sw.name == name) return sw.role == dataplane::SwitchRole::kSpf;
  }
  return false;
}

}  // namespace

ControllerConfig BuildControllerConfig(const Scenario& s) {
  const ScenarioSwitch& fcf = TheFcf(s);
  ControllerConfig c;
  c.mechanism = s.mechanism;
  c.fcf = fcf.name;
  c.direct_target = s.direct_target;
  c.alert_delay = s.alert_delay;
  c.handshake_timeout = s.handshake_timeout;
  c.fixed_isn = s.controller_isn;
  c.policy = s.policy;
  for (const decoy::DecoyConfig& d : s.decoys) {
    DecoyBinding b;
    b.name = d.name;
    b.cls = d.cls;
    b.ip = d.ip;
    b.mac = d.mac;
    b.open_ports = d.open_ports;
    b.all_ports_open = d.all_ports_open;
    auto [sw, port] = Uplink(s, d.name);
    if (sw == fcf.name) {
      b.fcf_port = port;
    } else if (IsSpf(s, sw)) {
      for (const auto& [spf_port, far] : LinksOf(s, sw)) {
        if (spf_port == port) continue;
        if (far.first != fcf.name) {
          throw ConfigError("SPF '" + sw + "' must sit between the FCF and one decoy");
        }
        b.fcf_port = far.second;
        b.spf = SpfBinding{sw, spf_port, port};
      }
      if (!b.spf) throw ConfigError("SPF '" + sw + "' has no link to the FCF");
    } else {
      throw ConfigError("decoy '" + d.name + "' is not attached to the FCF or an SPF");
    }
    c.decoys.push_back(std::move(b));
  }
  for (const simnet::AttackerConfig& a : s.attackers) {
    auto [sw, port] = Uplink(s, a.name);
    if (sw != fcf.name) {
      throw ConfigError("attacker '" + a.name + "' must attach to the FCF");
    }
    c.attackers.push_back({a.ip, a.mac, port});
  }
  return c;
}

ScenarioRun::ScenarioRun(const Scenario& scenario) : scenario_(scenario) {
  ValidateScenario(scenario_);
  for (const decoy::ServiceScript& sc : scenario_.scripts) scripts_.Add(sc);

  simnet::Topology topo;
  for (const simnet::AttackerConfig& a : scenario_.attackers) {
    topo.AddNode(a.name, simnet::NodeKind::kAttacker);
  }
  for (const ScenarioSwitch& sw : scenario_.switches) {
    topo.AddNode(sw.name, simnet::NodeKind::kSwitch,
                 sw.role == dataplane::SwitchRole::kFcf);
  }
  for (const decoy::DecoyConfig& d : scenario_.decoys) {
    topo.AddNode(d.name, simnet::NodeKind::kDecoy);
  }
  for (const ScenarioLink& l : scenario_.links) {
    simnet::Link link;
    link.a_node = l.a_node;
    link.a_port = l.a_port;
    link.b_node = l.b_node;
    link.b_port = l.b_port;
    link.latency = l.latency.value_or(scenario_.link_latency);
    topo.AddLink(std::move(link));
  }

  orchestrator::ControllerConfig cc = BuildControllerConfig(scenario_);

  simnet::SimConfig sc;
  sc.controller_latency = scenario_.controller_latency;
  sc.controller_processing = scenario_.controller_processing;
  sc.horizon = scenario_.horizon;
  sc.seed = scenario_.seed;
  sim_ = std::make_unique<simnet::Simulation>(std::move(topo), sc);
  sim_->AddMeta("scenario", scenario_.name);
  sim_->AddMeta("mechanism", std::string(orchestrator::MechanismName(scenario_.mechanism)));
  sim_->AddMeta("seed", std::to_string(scenario_.seed));

  for (const ScenarioSwitch& sw : scenario_.switches) sim_->AddSwitch(sw.name, sw.role);
  for (decoy::DecoyConfig d : scenario_.decoys) {
    if (d.gateway_mac == MacAddr()) d.gateway_mac = scenario_.gateway_mac;
    sim_->AddDecoy(std::move(d), &scripts_);
  }
  for (simnet::AttackerConfig a : scenario_.attackers) {
    if (a.target_mac == MacAddr()) {
      for (const decoy::DecoyConfig& d : scenario_.decoys) {
        if (d.ip == a.target_ip) {
          a.target_mac = d.mac;
          break;
        }
      }
    }
    sim_->AddAttacker(std::move(a));
  }
  controller_ = std::make_unique<orchestrator::Controller>(std::move(cc), scenario_.rules);
  sim_->SetController(controller_.get());
}

void ScenarioRun::AddMeta(std::string key, std::string value) {
  sim_->AddMeta(std::move(key), std::move(value));
}

const Trace& ScenarioRun::Execute() { return sim_->Run(); }

Trace RunScenario(const Scenario& scenario) {
  ScenarioRun run(scenario);
  return run.Execute();
}

}  // namespace honeydoc::harness
