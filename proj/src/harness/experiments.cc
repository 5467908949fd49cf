#include "honeydoc/harness/experiments.h"

#include <algorithm>
#include <random>
#include <set>

#include <boost/math/distributions/chi_squared.hpp>
#include <fmt/format.h>

#include "honeydoc/core/error.h"
#include "honeydoc/dataplane/flow_dump.h"
#include "honeydoc/harness/runner.h"
#include "honeydoc/rules/parser.h"
#include "honeydoc/simnet/stats.h"

namespace honeydoc::harness {
namespace {

using orchestrator::Mechanism;

// Lets the controller install its initial entries into standalone switches.
class InitOnlyContext : public simnet::ControllerContext {
 public:
  explicit InitOnlyContext(std::map<std::string, dataplane::SwitchNode>* switches)
      : switches_(switches) {}

  SimTime Now() const override { return SimTime(0); }
  void SendFlowMods(const std::string& sw, std::vector<simnet::FlowMod> mods) override {
    auto it = switches_->find(sw);
    if (it == switches_->end()) throw ConfigError("unknown switch '" + sw + "'");
    for (simnet::FlowMod& m : mods) {
      if (m.op == simnet::FlowMod::Op::kAdd) {
        it->second.Install(std::move(m.entry));
      } else {
        it->second.RemoveByCookie(m.cookie);
      }
    }
  }
  void PacketOut(const std::string&, int, Segment) override {}
  void StartTimer(SimTime, std::uint64_t) override {}
  void Record(EventKind, EventFields) override {}
  std::uint32_t NextIsn() override { return 0; }

 private:
  std::map<std::string, dataplane::SwitchNode>* switches_;
};

std::string FrameLines(const Trace& trace, const std::set<std::string>& links,
                       const FiveTuple& tuple) {
  std::string out;
  for (const TraceEvent& e : trace.events) {
    if (!e.frame || !links.contains(e.location)) continue;
    FiveTuple t = FiveTupleOf(e.frame->segment);
    if (t != tuple && t != tuple.Reversed()) continue;
    out += FormatEventLine(e);
    out += '\n';
  }
  return out;
}

std::set<std::string> LinksOf(const Trace& trace, const std::string& node) {
  std::vector<std::string> v = trace.LinksOf(node);
  return {v.begin(), v.end()};
}

const decoy::ServiceScript& CatchAllScript() {
  static const decoy::ServiceScript kScript = {
      "catch-all", "sensor", {{std::nullopt, {}, "PROBE"}}};
  return kScript;
}

Scenario SensorScenario(const AttackPlan& plan, std::uint64_t seed,
                        std::string_view ruleset) {
  Scenario s;
  s.name = "reduce";
  s.mechanism = Mechanism::kM2;
  s.seed = seed;
  s.rules = rules::ParseRuleset(ruleset);
  s.switches.push_back({"fcf", dataplane::SwitchRole::kFcf});
  s.scripts.push_back(CatchAllScript());

  decoy::DecoyConfig sensor;
  sensor.name = "sensor";
  sensor.cls = decoy::DecoyClass::kMih;
  sensor.ip = IpAddr::Parse("10.1.1.2");
  sensor.mac = MacAddr::Parse("02:00:00:01:01:02");
  sensor.all_ports_open = true;
  sensor.default_script = CatchAllScript().name;
  s.decoys.push_back(sensor);

  simnet::AttackerConfig a;
  a.name = "scanner";
  a.ip = IpAddr::Parse("10.1.0.2");
  a.mac = MacAddr::Parse("02:00:00:01:00:02");
  a.target_ip = sensor.ip;
  a.target_mac = sensor.mac;
  a.script = {ToBytes("probe\r\n")};
  a.plan = plan.connections;
  a.connections = static_cast<int>(plan.connections.size());
  s.attackers.push_back(a);

  s.links.push_back({"scanner", 1, "fcf", 1, std::nullopt});
  s.links.push_back({"sensor", 1, "fcf", 2, std::nullopt});
  SimTime last{0};
  for (const auto& c : plan.connections) last = std::max(last, c.start);
  s.horizon = last + Millis(10000);
  return s;
}

}  // namespace

SensibilityResult ExpSensibility(const Scenario& scenario,
                                 const std::vector<std::uint16_t>& ports) {
  orchestrator::ControllerConfig cc = BuildControllerConfig(scenario);
  std::map<std::string, dataplane::SwitchNode> switches;
  for (const ScenarioSwitch& sw : scenario.switches) {
    switches.emplace(sw.name, dataplane::SwitchNode(sw.name, sw.role));
  }
  std::string fcf = cc.fcf;
  orchestrator::Controller controller(cc, scenario.rules);
  InitOnlyContext ctx(&switches);
  controller.Init(ctx);

  dataplane::SwitchNode& table = switches.at(fcf);
  SensibilityResult r;
  r.dump = dataplane::DumpFlows(table, SimTime(0));
  r.normalized = dataplane::NormalizedDump(table);

  if (scenario.attackers.empty() || cc.attackers.empty()) return r;
  const simnet::AttackerConfig& a = scenario.attackers.front();
  for (std::uint16_t port : ports) {
    Segment syn;
    syn.src_mac = a.mac;
    syn.dst_mac = a.target_mac;
    syn.src_ip = a.ip;
    syn.dst_ip = a.target_ip;
    syn.src_port = a.base_port;
    syn.dst_port = port;
    syn.flags = kSyn;
    // Probe a copy so the dump above stays at zero counters.
    dataplane::SwitchNode probe = table;
    dataplane::Outcome out = probe.ProcessIngress(syn, cc.attackers.front().fcf_port);
    Probe p{port, "denied"};
    if (std::holds_alternative<dataplane::SentToController>(out)) {
      p.disposition = "controller";
    } else if (auto* emit = std::get_if<dataplane::EmitOn>(&out)) {
      p.disposition = fmt::format("forwarded:{}", emit->port);
    }
    r.probes.push_back(p);
  }
  return r;
}

HandoverResult ExpHandover(Scenario scenario, Mechanism mechanism) {
  scenario.mechanism = mechanism;
  ScenarioRun run(scenario);
  run.AddMeta("experiment", "handover");
  HandoverResult r;
  r.trace = run.Execute();
  r.verdict = ValidateHandover(r.trace);
  std::vector<FirstPush> pushes = FirstPushes(r.trace);
  if (!pushes.empty()) {
    const FirstPush& p = pushes.front();
    std::string attacker;
    for (const TraceNode& n : r.trace.nodes) {
      if (n.kind == "attacker" && n.ip == p.tuple.src_ip) attacker = n.name;
    }
    r.attacker_graph = FrameLines(r.trace, LinksOf(r.trace, attacker), p.tuple);
    if (!p.decoy.empty()) {
      r.backend_graph = FrameLines(r.trace, LinksOf(r.trace, p.decoy), p.tuple);
    }
  }
  return r;
}

ExperimentReport ExpLatency(const Scenario& scenario, int connections, double rate_per_s,
                            std::vector<LatencyRun>* runs) {
  if (connections < 1) throw ConfigError("latency experiment needs n >= 1");
  if (scenario.attackers.empty()) throw ConfigError("latency scenario has no attacker");
  std::string hih;
  for (const decoy::DecoyConfig& d : scenario.decoys) {
    if (d.cls == decoy::DecoyClass::kHih) {
      hih = d.name;
      break;
    }
  }
  ExperimentReport report;
  for (Mechanism m : kLatencyMechanisms) {
    Scenario s = scenario;
    s.mechanism = m;
    s.attackers.front().connections = connections;
    s.attackers.front().rate_per_s = rate_per_s;
    ScenarioRun run(s);
    run.AddMeta("experiment", "latency");
    LatencyRun lr;
    lr.mechanism = m;
    lr.trace = run.Execute();
    lr.pushes = FirstPushes(lr.trace);
    lr.stats = Summarize(lr.pushes);
    std::string name(orchestrator::MechanismName(m));
    for (const FirstPush& p : lr.pushes) {
      if (auto l = p.latency()) report.latencies.push_back({name, p.conn_id, *l});
    }
    report.summary[name] = lr.stats;
    if (!hih.empty()) {
      for (const auto& [bin, n] : simnet::PacketsPerBin(lr.trace, hih, Millis(100))) {
        report.histogram.push_back({name, bin * 100, n});
      }
    }
    if (runs != nullptr) runs->push_back(std::move(lr));
  }
  return report;
}

AttackPlan GenerateAttack(std::size_t connections, double off_list, std::uint64_t seed,
                          IpAddr target, SimTime spacing) {
  constexpr std::size_t kFirstPort = 20000;
  if (connections > 65535 - kFirstPort) {
    throw ConfigError(fmt::format("at most {} connections per plan", 65535 - kFirstPort));
  }
  if (off_list < 0 || off_list > 1) throw ConfigError("off-list fraction must be in [0, 1]");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution pick_off(off_list);
  std::discrete_distribution<std::size_t> pick_listed(kTable3Hits.begin(),
                                                      kTable3Hits.end());
  std::uniform_int_distribution<int> any_port(1, 65535);
  std::set<std::uint16_t> listed(kTable3Ports.begin(), kTable3Ports.end());
  AttackPlan plan;
  for (std::size_t i = 0; i < connections; ++i) {
    simnet::ConnectionPlan c;
    c.start = spacing * static_cast<std::int64_t>(i);
    c.src_port = static_cast<std::uint16_t>(kFirstPort + i);
    c.dst_ip = target;
    if (pick_off(rng)) {
      do {
        c.dst_port = static_cast<std::uint16_t>(any_port(rng));
      } while (listed.contains(c.dst_port));
    } else {
      c.dst_port = kTable3Ports[pick_listed(rng)];
    }
    plan.connections.push_back(c);
  }
  return plan;
}

std::pair<double, double> ChiSquareFit(const std::vector<std::uint64_t>& observed,
                                       const std::vector<std::uint64_t>& weights) {
  if (observed.size() != weights.size() || observed.size() < 2) {
    throw ContractViolation("chi-square needs matching vectors of two or more cells");
  }
  double n = 0;
  double w = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    n += static_cast<double>(observed[i]);
    w += static_cast<double>(weights[i]);
  }
  if (n == 0) return {0, 1};
  double stat = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    double expected = n * static_cast<double>(weights[i]) / w;
    double d = static_cast<double>(observed[i]) - expected;
    stat += d * d / expected;
  }
  boost::math::chi_squared_distribution<double> dist(
      static_cast<double>(observed.size() - 1));
  return {stat, boost::math::cdf(boost::math::complement(dist, stat))};
}

ReductionResult ExpDataReduction(const AttackPlan& plan, std::uint64_t seed) {
  std::string allow;
  for (std::uint16_t port : kTable3Ports) {
    allow += fmt::format("alert tcp any any -> any {} (msg:\"MIH\"; priority:2;)\n", port);
  }
  allow += "alert tcp any any -> any any (msg:\"DROP\"; priority:0;)\n";
  const std::string open = "alert tcp any any -> any any (msg:\"MIH\"; priority:1;)\n";

  ReductionResult r;
  for (const simnet::ConnectionPlan& c : plan.connections) ++r.generated[c.dst_port];
  if (plan.connections.empty()) return r;

  r.before = DecoyPortHits(RunScenario(SensorScenario(plan, seed, open)));
  r.after = DecoyPortHits(RunScenario(SensorScenario(plan, seed, allow)));
  std::set<std::uint16_t> listed(kTable3Ports.begin(), kTable3Ports.end());
  for (const auto& [port, n] : r.after) {
    if (!listed.contains(port)) r.off_list_after += n;
  }
  std::vector<std::uint64_t> observed;
  for (std::uint16_t port : kTable3Ports) {
    auto it = r.before.find(port);
    observed.push_back(it == r.before.end() ? 0 : it->second);
  }
  std::tie(r.chi_square, r.p_value) = ChiSquareFit(
      observed, std::vector<std::uint64_t>(kTable3Hits.begin(), kTable3Hits.end()));
  return r;
}

}  // namespace honeydoc::harness
