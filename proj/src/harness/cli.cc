#include "honeydoc/harness/cli.h"

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "honeydoc/core/error.h"
#include "honeydoc/dataplane/flow_dump.h"
#include "honeydoc/harness/experiments.h"
#include "honeydoc/harness/runner.h"
#include "honeydoc/harness/validator.h"

namespace honeydoc::harness {
namespace {

using orchestrator::Mechanism;

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << text;
  if (!f) throw ConfigError("failed writing '" + path + "'");
}

std::string ReadFile(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

Scenario Load(const std::string& path, const std::optional<std::uint64_t>& seed) {
  Scenario s = LoadScenario(path);
  if (seed) s.seed = *seed;
  return s;
}

std::string Bundled(const char* file) { return (ScenarioDir() / file).string(); }

struct Options {
  std::string scenario;
  std::string trace;
  std::string out;
  std::string csv;
  std::string hist;
  std::string mech = "m2";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> at_ms;
  bool handover = false;
  int n = 100;
  int reduce_n = 10000;
  double rate = 10;
  double off_list = 0.9;
};

int DoRun(const Options& o, std::ostream& out, std::ostream& err) {
  ScenarioRun run(Load(o.scenario, o.seed));
  const Trace& trace = run.Execute();
  std::string text = WriteTrace(trace);
  if (o.out.empty()) {
    out << text;
  } else {
    WriteFile(o.out, text);
  }
  Verdict v = ValidateTrace(trace);
  err << v.Format();
  return v.ok() ? kExitOk : kExitValidation;
}

int DoSensibility(const Options& o, std::ostream& out) {
  std::string path = o.scenario.empty() ? Bundled("sensibility.scn") : o.scenario;
  SensibilityResult r = ExpSensibility(Load(path, o.seed));
  out << r.dump;
  for (const Probe& p : r.probes) {
    out << fmt::format("probe tcp/{}: {}\n", p.port, p.disposition);
  }
  return kExitOk;
}

int DoHandover(const Options& o, std::ostream& out) {
  std::optional<Mechanism> m = orchestrator::ParseMechanism(o.mech);
  if (!m || *m == Mechanism::kDirect) throw ConfigError("--mech must be m1 or m2");
  std::string path = o.scenario.empty() ? Bundled("fig8.scn") : o.scenario;
  HandoverResult r = ExpHandover(Load(path, o.seed), *m);
  std::string trace_path =
      o.out.empty() ? fmt::format("handover-{}.trace", orchestrator::MechanismName(*m))
                    : o.out;
  WriteFile(trace_path, WriteTrace(r.trace));
  out << "# attacker link\n" << r.attacker_graph;
  out << "# backend link\n" << r.backend_graph;
  out << r.verdict.Format();
  out << "trace written to " << trace_path << '\n';
  return r.verdict.ok() ? kExitOk : kExitValidation;
}

int DoLatency(const Options& o, std::ostream& out) {
  std::string path = o.scenario.empty() ? Bundled("smtp.scn") : o.scenario;
  ExperimentReport r = ExpLatency(Load(path, o.seed), o.n, o.rate);
  for (const auto& [mech, s] : r.summary) {
    out << fmt::format("{}: n={} mean={:.3f}ms p50={:.3f}ms p95={:.3f}ms\n", mech,
                       s.count, s.mean_ms, s.p50_ms, s.p95_ms);
  }
  if (o.csv.empty()) {
    out << LatencyCsv(r.latencies);
  } else {
    WriteFile(o.csv, LatencyCsv(r.latencies));
  }
  if (!o.hist.empty()) WriteFile(o.hist, HistogramCsv(r.histogram));
  return kExitOk;
}

int DoReduce(const Options& o, std::ostream& out) {
  if (o.reduce_n < 0) throw ConfigError("-n must not be negative");
  std::uint64_t seed = o.seed.value_or(SeedFromEnvironment().value_or(1));
  AttackPlan plan = GenerateAttack(static_cast<std::size_t>(o.reduce_n), o.off_list, seed,
                                   IpAddr::Parse("10.1.1.2"));
  ReductionResult r = ExpDataReduction(plan, seed);
  std::string csv = "port,generated,before,after\n";
  for (const auto& [port, n] : r.generated) {
    auto get = [&](const std::map<std::uint16_t, std::uint64_t>& m) {
      auto it = m.find(port);
      return it == m.end() ? std::uint64_t{0} : it->second;
    };
    csv += fmt::format("{},{},{},{}\n", port, n, get(r.before), get(r.after));
  }
  if (o.csv.empty()) {
    std::uint64_t before = 0;
    std::uint64_t after = 0;
    for (const auto& [p, n] : r.before) before += n;
    for (const auto& [p, n] : r.after) after += n;
    out << fmt::format("connections={} delivered_before={} delivered_after={}\n",
                       plan.connections.size(), before, after);
  } else {
    WriteFile(o.csv, csv);
  }
  out << fmt::format("off_list_after={} chi_square={:.4f} p={:.4f}\n", r.off_list_after,
                     r.chi_square, r.p_value);
  return kExitOk;
}

int DoDumpFlows(const Options& o, std::ostream& out) {
  Scenario s = Load(o.scenario, o.seed);
  if (o.at_ms) s.horizon = ParseMillis(*o.at_ms);
  ScenarioRun run(s);
  run.Execute();
  for (const ScenarioSwitch& sw : s.switches) {
    out << "# " << sw.name << " (" << dataplane::SwitchRoleName(sw.role) << ")\n";
    out << dataplane::DumpFlows(run.sim().switch_node(sw.name), run.sim().now());
  }
  return kExitOk;
}

int DoValidate(const Options& o, std::ostream& out) {
  Trace t = ReadTrace(ReadFile(o.trace));
  bool handover = o.handover || t.Meta("experiment") == "handover";
  Verdict v = handover ? ValidateHandover(t) : ValidateTrace(t);
  out << v.Format();
  return v.ok() ? kExitOk : kExitValidation;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deterministic honeynet orchestration simulator", "honeydoc"};
  app.require_subcommand(1);
  Options o;

  CLI::App* run = app.add_subcommand("run", "Run a scenario and write its trace");
  run->add_option("scenario", o.scenario, "Scenario file")->required();
  run->add_option("-o,--out", o.out, "Trace output (default stdout)");
  run->add_option("--seed", o.seed, "Override the scenario seed");

  CLI::App* exp = app.add_subcommand("exp", "Canned experiments");
  exp->require_subcommand(1);
  CLI::App* sens = exp->add_subcommand("sensibility", "Rule translation and probes");
  sens->add_option("--scenario", o.scenario, "Scenario file");
  sens->add_option("--seed", o.seed, "Override the scenario seed");
  CLI::App* hand = exp->add_subcommand("handover", "SSH redirection flow graphs");
  hand->add_option("--mech", o.mech, "m1 or m2")->capture_default_str();
  hand->add_option("--seed", o.seed, "Override the scenario seed");
  hand->add_option("--scenario", o.scenario, "Scenario file");
  hand->add_option("-o,--out", o.out, "Trace output");
  CLI::App* lat = exp->add_subcommand("latency", "First-push latency sweep");
  lat->add_option("--scenario", o.scenario, "Scenario file");
  lat->add_option("-n,--connections", o.n, "Connections per mechanism")
      ->capture_default_str();
  lat->add_option("--rate", o.rate, "Connections per second")->capture_default_str();
  lat->add_option("--seed", o.seed, "Override the scenario seed");
  lat->add_option("--csv", o.csv, "Latency CSV output (default stdout)");
  lat->add_option("--hist", o.hist, "Packet histogram CSV output");
  CLI::App* red = exp->add_subcommand("reduce", "Allowlist data reduction");
  red->add_option("-n,--connections", o.reduce_n, "Synthetic connections")
      ->capture_default_str();
  red->add_option("--off-list", o.off_list, "Fraction to ports off the allowlist")
      ->capture_default_str();
  red->add_option("--seed", o.seed, "Generator and run seed");
  red->add_option("--csv", o.csv, "Per-port CSV output");

  CLI::App* dump = app.add_subcommand("dump-flows", "Run a scenario and dump flow tables");
  dump->add_option("scenario", o.scenario, "Scenario file")->required();
  dump->add_option("--at", o.at_ms, "Stop the run at this time (ms)");
  dump->add_option("--seed", o.seed, "Override the scenario seed");

  CLI::App* val = app.add_subcommand("validate", "Check a trace file");
  val->add_option("trace", o.trace, "Trace file")->required();
  val->add_flag("--handover", o.handover, "Also check the SSH handover pattern");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kExitConfig;
  }

  try {
    if (run->parsed()) return DoRun(o, out, err);
    if (sens->parsed()) return DoSensibility(o, out);
    if (hand->parsed()) return DoHandover(o, out);
    if (lat->parsed()) return DoLatency(o, out);
    if (red->parsed()) return DoReduce(o, out);
    if (dump->parsed()) return DoDumpFlows(o, out);
    if (val->parsed()) return DoValidate(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  err << app.help();
  return kExitConfig;
}

}  // namespace honeydoc::harness
