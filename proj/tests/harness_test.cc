#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "honeydoc/core/error.h"
#include "honeydoc/dataplane/flow_dump.h"
#include "honeydoc/harness/cli.h"
#include "honeydoc/harness/experiments.h"
#include "honeydoc/harness/report.h"
#include "honeydoc/harness/runner.h"
#include "honeydoc/harness/scenario.h"
#include "honeydoc/harness/validator.h"

namespace honeydoc::harness {
namespace {

namespace fs = std::filesystem;
using orchestrator::Mechanism;

std::string ReadText(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path TempDir() {
  fs::path dir = fs::temp_directory_path() /
                 ("honeydoc-test-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
  fs::create_directories(dir);
  return dir;
}

constexpr const char* kMinimal =
    "[scenario]\n"
    "mechanism = m2\n"
    "seed = 4\n"
    "rules = handover.rules\n"
    "[topology]\n"
    "switch = fcf FCF\n"
    "[attacker a]\n"
    "ip = 10.1.0.2\n"
    "target = 10.1.1.2:22\n"
    "turn = \"x\"\n"
    "port = 1\n"
    "[decoy hih]\n"
    "class = HIH\n"
    "ip = 10.1.1.2\n"
    "open = 22\n"
    "port = 2\n";

std::size_t ParseErrorLine(const std::string& text) {
  try {
    ParseScenario(text, ScenarioDir());
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

TEST(Scenario, MinimalParses) {
  Scenario s = ParseScenario(kMinimal, ScenarioDir(), "min");
  EXPECT_EQ(s.seed, 4u);
  EXPECT_EQ(s.rules.size(), 2u);
  ASSERT_EQ(s.links.size(), 2u);
  EXPECT_EQ(s.links[0].b_node, "fcf");
  EXPECT_NO_THROW(RunScenario(s));
}

TEST(Scenario, ParseErrorsCarryLineNumbers) {
  std::string base = kMinimal;
  EXPECT_EQ(ParseErrorLine(base + "[bogus]\n"), 17u);
  EXPECT_EQ(ParseErrorLine(base + "class = MIH\n"), 17u);  // duplicate key
  EXPECT_EQ(ParseErrorLine(base + "colour = red\n"), 17u);
  EXPECT_EQ(ParseErrorLine(base + "[scenario]\n"), 17u);
  EXPECT_EQ(ParseErrorLine("# c\n\nseed = 1\n"), 3u);
  EXPECT_EQ(ParseErrorLine("[scenario]\nmechanism = m9\n"), 2u);
  EXPECT_EQ(ParseErrorLine("[scenario]\nseed = -3\n"), 2u);
  EXPECT_EQ(ParseErrorLine("[scenario\n"), 1u);
  EXPECT_EQ(ParseErrorLine("[attacker a]\nturn = \"unterminated\n"), 2u);
  EXPECT_EQ(ParseErrorLine("[decoy d]\nip = 10.1.1.300\n"), 2u);
}

TEST(Scenario, ConfigErrors) {
  std::string base = kMinimal;
  EXPECT_THROW(ParseScenario("[scenario]\nseed = 1\n", ScenarioDir()), ConfigError);
  EXPECT_THROW(ParseScenario("[scenario]\nmechanism = m1\n", ScenarioDir()), ConfigError);
  std::string missing_rules = base;
  missing_rules.replace(missing_rules.find("handover.rules"), 14, "nope.rules");
  EXPECT_THROW(ParseScenario(missing_rules, ScenarioDir()), ConfigError);
  EXPECT_THROW(LoadScenario(ScenarioDir() / "does-not-exist.scn"), ConfigError);
  // Two decoys sharing one FCF port.
  EXPECT_THROW(ParseScenario(base + "[decoy mih]\nclass = MIH\nip = 10.1.1.2\nopen = 22\n"
                                    "port = 2\n",
                             ScenarioDir()),
               ConfigError);
  // Same address, different MAC.
  EXPECT_THROW(ParseScenario(base + "mac = 02:00:00:00:00:01\n[decoy mih]\nclass = MIH\n"
                                    "ip = 10.1.1.2\nmac = 02:00:00:00:00:02\nopen = 22\n"
                                    "port = 3\n",
                             ScenarioDir()),
               ConfigError);
  EXPECT_THROW(ParseScenario(base + "script = 22 missing-script\n", ScenarioDir()),
               ConfigError);
  std::string bad_target = base;
  bad_target.replace(bad_target.find("10.1.1.2:22"), 11, "10.1.1.9:22");
  EXPECT_THROW(ParseScenario(bad_target, ScenarioDir()), ConfigError);
}

TEST(Scenario, ExplicitPortConflict) {
  Scenario s = LoadScenario(ScenarioDir() / "fig8.scn");
  s.links[1].b_port = 1;  // mih onto the attacker's FCF port
  try {
    ValidateScenario(s);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("port fcf:1 carries two links"), std::string::npos)
        << e.what();
  }
}

TEST(Scenario, Fig8Layout) {
  Scenario s = LoadScenario(ScenarioDir() / "fig8.scn");
  ASSERT_EQ(s.decoys.size(), 2u);
  EXPECT_EQ(s.decoys[0].ip, s.decoys[1].ip);
  EXPECT_EQ(s.decoys[0].mac, s.decoys[1].mac);
  orchestrator::ControllerConfig cc = BuildControllerConfig(s);
  ASSERT_EQ(cc.decoys.size(), 2u);
  EXPECT_EQ(cc.decoys[0].fcf_port, 2);
  EXPECT_FALSE(cc.decoys[0].spf);
  EXPECT_EQ(cc.decoys[1].fcf_port, 3);
  ASSERT_TRUE(cc.decoys[1].spf);
  EXPECT_EQ(cc.decoys[1].spf->sw, "spf-hih");
  EXPECT_EQ(cc.decoys[1].spf->fcf_side_port, 1);
  EXPECT_EQ(cc.decoys[1].spf->decoy_side_port, 2);
  EXPECT_EQ(cc.alert_delay, Millis(900));
}

TEST(Scenario, SeedFromEnvironment) {
  ::setenv("HONEYDOC_SEED", "99", 1);
  EXPECT_EQ(LoadScenario(ScenarioDir() / "fig8.scn").seed, 99u);
  ::setenv("HONEYDOC_SEED", "nine", 1);
  EXPECT_THROW(LoadScenario(ScenarioDir() / "fig8.scn"), ConfigError);
  ::unsetenv("HONEYDOC_SEED");
  EXPECT_EQ(LoadScenario(ScenarioDir() / "fig8.scn").seed, 7u);
}

TEST(Report, NearestRank) {
  std::vector<double> v;
  for (int i = 20; i >= 1; --i) v.push_back(i);
  EXPECT_EQ(NearestRank(v, 95), 19);  // rank ceil(0.95 * 20) = 19
  EXPECT_EQ(NearestRank(v, 50), 10);
  EXPECT_EQ(NearestRank(v, 100), 20);
  EXPECT_EQ(NearestRank({7}, 95), 7);
  EXPECT_EQ(NearestRank({1, 2, 3}, 50), 2);  // rank ceil(1.5) = 2
}

TEST(Report, SummarizeSkipsUndelivered) {
  std::vector<FirstPush> pushes(4);
  for (std::size_t i = 0; i < pushes.size(); ++i) {
    pushes[i].conn_id = i + 1;
    pushes[i].syn_time = Millis(10 * static_cast<std::int64_t>(i));
  }
  pushes[0].push_time = Millis(8);
  pushes[1].push_time = Millis(10 + 8);
  pushes[2].push_time = Millis(20 + 44);
  LatencyStats s = Summarize(pushes);
  EXPECT_EQ(s.count, 3u);
  EXPECT_DOUBLE_EQ(s.mean_ms, 20.0);
  EXPECT_DOUBLE_EQ(s.p50_ms, 8.0);
  EXPECT_DOUBLE_EQ(s.p95_ms, 44.0);
}

TEST(Report, CsvFormats) {
  EXPECT_EQ(LatencyCsv({{"m1", 3, SimTime(44001)}}), "mechanism,conn_id,latency_ms\nm1,3,44.001\n");
  EXPECT_EQ(HistogramCsv({{"m2", 100, 7}}), "mechanism,bin_start_ms,packets\nm2,100,7\n");
}

TEST(Experiments, SensibilityMatchesGolden) {
  SensibilityResult r = ExpSensibility(LoadScenario(ScenarioDir() / "sensibility.scn"));
  EXPECT_EQ(r.normalized, ReadText(fs::path(HONEYDOC_GOLDEN_DIR) / "sensibility.dump"));
  ASSERT_EQ(r.probes.size(), 3u);
  EXPECT_EQ(r.probes[0].disposition, "controller");
  EXPECT_EQ(r.probes[1].disposition, "controller");
  EXPECT_EQ(r.probes[2].disposition, "denied");
}

TEST(Experiments, HandoverGraphGolden) {
  HandoverResult r = ExpHandover(LoadScenario(ScenarioDir() / "fig8.scn"), Mechanism::kM2);
  EXPECT_TRUE(r.verdict.ok()) << r.verdict.Format();
  EXPECT_EQ(r.attacker_graph, ReadText(fs::path(HONEYDOC_GOLDEN_DIR) / "fig8-m2-attacker.txt"));
}

TEST(Experiments, LatencySingleConnection) {
  std::vector<LatencyRun> runs;
  ExperimentReport r = ExpLatency(LoadScenario(ScenarioDir() / "smtp.scn"), 1, 10, &runs);
  EXPECT_EQ(LatencyCsv(r.latencies),
            "mechanism,conn_id,latency_ms\ndirect,1,8.000\nm1,1,44.000\nm2,1,58.000\n");
  ASSERT_EQ(runs.size(), 3u);
  EXPECT_EQ(r.summary.at("m2").count, 1u);
}

TEST(Experiments, LatencyUnchangedAtHighRate) {
  ExperimentReport r = ExpLatency(LoadScenario(ScenarioDir() / "smtp.scn"), 50, 1000);
  const std::map<std::string, double> want = {{"direct", 8}, {"m1", 44}, {"m2", 58}};
  for (const LatencyRow& row : r.latencies) {
    EXPECT_EQ(row.latency, Millis(static_cast<std::int64_t>(want.at(row.mechanism))))
        << row.mechanism << " " << row.conn_id;
  }
  EXPECT_EQ(r.latencies.size(), 150u);
  EXPECT_FALSE(r.histogram.empty());
}

TEST(Experiments, ChiSquareKnownValue) {
  // Uniform expectation of 20 per cell: (100 + 0 + 100) / 20 = 10 with two
  // degrees of freedom, whose upper tail is exp(-x / 2).
  auto [stat, p] = ChiSquareFit({10, 20, 30}, {1, 1, 1});
  EXPECT_DOUBLE_EQ(stat, 10.0);
  EXPECT_NEAR(p, std::exp(-5.0), 1e-12);
  auto [stat2, p2] = ChiSquareFit({115, 28, 12, 2, 2, 7, 1, 1, 1},
                                  std::vector<std::uint64_t>(kTable3Hits.begin(), kTable3Hits.end()));
  EXPECT_NEAR(stat2, 0.0, 1e-12);
  EXPECT_NEAR(p2, 1.0, 1e-12);
}

TEST(Experiments, GenerateAttackProperties) {
  IpAddr target = IpAddr::Parse("10.1.1.2");
  AttackPlan a = GenerateAttack(2000, 0.9, 5, target);
  AttackPlan b = GenerateAttack(2000, 0.9, 5, target);
  ASSERT_EQ(a.connections.size(), 2000u);
  std::size_t off = 0;
  for (std::size_t i = 0; i < a.connections.size(); ++i) {
    const auto& c = a.connections[i];
    EXPECT_EQ(c.dst_port, b.connections[i].dst_port);
    EXPECT_EQ(c.dst_ip, target);
    EXPECT_EQ(c.start, Millis(5 * static_cast<std::int64_t>(i)));
    bool listed = std::find(kTable3Ports.begin(), kTable3Ports.end(), c.dst_port) !=
                  kTable3Ports.end();
    off += !listed;
  }
  // Binomial(2000, 0.9): four standard deviations is about 54.
  EXPECT_NEAR(static_cast<double>(off), 1800.0, 54.0);
  EXPECT_THROW(GenerateAttack(45536, 0.9, 1, target), ConfigError);
}

TEST(Experiments, EmptyReduction) {
  ReductionResult r = ExpDataReduction(GenerateAttack(0, 0.9, 1, IpAddr::Parse("10.1.1.2")), 1);
  EXPECT_TRUE(r.generated.empty());
  EXPECT_TRUE(r.before.empty());
  EXPECT_TRUE(r.after.empty());
  EXPECT_EQ(r.off_list_after, 0u);
}

TEST(Experiments, SmallReduction) {
  AttackPlan plan = GenerateAttack(300, 0.5, 3, IpAddr::Parse("10.1.1.2"));
  ReductionResult r = ExpDataReduction(plan, 3);
  std::uint64_t generated = 0, before = 0, after = 0, on_list = 0;
  for (const auto& [port, n] : r.generated) {
    generated += n;
    if (std::find(kTable3Ports.begin(), kTable3Ports.end(), port) != kTable3Ports.end()) {
      on_list += n;
    }
  }
  for (const auto& [port, n] : r.before) before += n;
  for (const auto& [port, n] : r.after) after += n;
  EXPECT_EQ(generated, 300u);
  EXPECT_EQ(before, 300u);
  EXPECT_EQ(after, on_list);
  EXPECT_EQ(r.off_list_after, 0u);
}

// ---- Validator on tampered traces -------------------------------------------

Trace HandoverTrace() {
  return ExpHandover(LoadScenario(ScenarioDir() / "fig8.scn"), Mechanism::kM2).trace;
}

bool Fails(const Verdict& v, const std::string& check) {
  for (const CheckResult& c : v.checks) {
    if (c.name == check) return !c.ok;
  }
  ADD_FAILURE() << "no check named " << check;
  return false;
}

TEST(Validator, CleanTracePasses) {
  Trace t = HandoverTrace();
  Verdict v = ValidateHandover(t);
  EXPECT_TRUE(v.ok()) << v.Format();
  EXPECT_EQ(v.first_failure(), nullptr);
  EXPECT_EQ(ValidateHandover(ReadTrace(WriteTrace(t))).Format(), v.Format());
}

TEST(Validator, DetectsFingerprintLeak) {
  Trace t = HandoverTrace();
  for (TraceEvent& e : t.events) {
    if (e.frame && e.location == "attacker-fcf" && e.frame->segment.src_port == 22) {
      e.frame->segment.src_mac = MacAddr::Parse("02:00:00:00:99:99");
      break;
    }
  }
  EXPECT_TRUE(Fails(ValidateTrace(t), "stealth"));
}

TEST(Validator, DetectsDuplicateDelivery) {
  Trace t = HandoverTrace();
  for (std::size_t i = 0; i < t.events.size(); ++i) {
    const TraceEvent& e = t.events[i];
    if (e.frame && e.location == "hih-spf-hih" && !e.frame->segment.payload.empty() &&
        e.frame->segment.dst_port == 22) {
      t.events.insert(t.events.begin() + static_cast<std::ptrdiff_t>(i) + 1, e);
      break;
    }
  }
  EXPECT_TRUE(Fails(ValidateTrace(t), "exactly-once"));
  EXPECT_TRUE(Fails(ValidateHandover(t), "backend-once"));
}

TEST(Validator, DetectsTimeTravelAndAckOverrun) {
  Trace t = HandoverTrace();
  std::swap(t.events[2].time, t.events[5].time);
  EXPECT_TRUE(Fails(ValidateTrace(t), "time-monotonic"));

  t = HandoverTrace();
  for (TraceEvent& e : t.events) {
    if (e.frame && e.location == "attacker-fcf" && e.frame->segment.src_port == 22 &&
        e.frame->segment.flags.Has(kAck) && !e.frame->segment.flags.Has(kSyn)) {
      e.frame->segment.ack += 1000;
      e.frame->rel_ack += 1000;
      break;
    }
  }
  EXPECT_TRUE(Fails(ValidateTrace(t), "ack-bounds"));
}

TEST(Validator, DetectsMissingRetransmissions) {
  Trace t = HandoverTrace();
  std::erase_if(t.events, [](const TraceEvent& e) {
    return e.frame && e.location == "attacker-fcf" && e.frame->segment.src_port != 22 &&
           !e.frame->segment.payload.empty() && e.time > Millis(100) && e.time < Millis(900);
  });
  EXPECT_TRUE(Fails(ValidateHandover(t), "retransmissions"));
}

// ---- CLI ---------------------------------------------------------------------

int Cli(std::vector<std::string> args, std::string* out = nullptr, std::string* err = nullptr) {
  std::vector<const char*> argv = {"honeydoc"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  int code = RunCli(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return code;
}

TEST(Cli, ExitCodes) {
  std::string out, err;
  EXPECT_EQ(Cli({"frobnicate"}, &out, &err), kExitConfig);
  EXPECT_EQ(Cli({}), kExitConfig);
  EXPECT_EQ(Cli({"run", (ScenarioDir() / "missing.scn").string()}, &out, &err), kExitConfig);
  EXPECT_NE(err.find("error: "), std::string::npos);
  EXPECT_EQ(Cli({"exp", "handover", "--mech", "direct"}), kExitConfig);
  EXPECT_EQ(Cli({"exp", "sensibility"}, &out), kExitOk);
  EXPECT_NE(out.find("priority=2,tcp,tp_dst=21 actions=CONTROLLER:65535"), std::string::npos);
  EXPECT_NE(out.find("probe tcp/22: denied"), std::string::npos);
}

TEST(Cli, RunAndValidate) {
  fs::path dir = TempDir();
  std::string trace = (dir / "fig8.trace").string();
  std::string out, err;
  ASSERT_EQ(Cli({"run", (ScenarioDir() / "fig8.scn").string(), "-o", trace}, &out, &err),
            kExitOk)
      << err;
  EXPECT_EQ(Cli({"validate", trace}, &out), kExitOk) << out;

  std::string handover = (dir / "handover.trace").string();
  ASSERT_EQ(Cli({"exp", "handover", "-o", handover}, &out), kExitOk) << out;
  EXPECT_NE(out.find("PASS migrated-ack"), std::string::npos);
  EXPECT_EQ(Cli({"validate", handover}, &out), kExitOk) << out;

  // A tampered file fails validation with exit code 1.
  Trace t = ReadTrace(ReadText(handover));
  std::swap(t.events[1].time, t.events[4].time);
  std::ofstream(dir / "bad.trace") << WriteTrace(t);
  EXPECT_EQ(Cli({"validate", (dir / "bad.trace").string()}, &out), kExitValidation);
  EXPECT_NE(out.find("FAIL time-monotonic"), std::string::npos);

  std::ofstream(dir / "junk.trace") << "#honeydoc-trace\t1\nnot a line\n";
  EXPECT_EQ(Cli({"validate", (dir / "junk.trace").string()}, &out, &err), kExitConfig);
  EXPECT_NE(err.find("line 2"), std::string::npos) << err;
  fs::remove_all(dir);
}

TEST(Cli, LatencyAndReduce) {
  std::string out;
  ASSERT_EQ(Cli({"exp", "latency", "-n", "1"}, &out), kExitOk);
  EXPECT_NE(out.find("m1: n=1 mean=44.000ms"), std::string::npos) << out;
  ASSERT_EQ(Cli({"exp", "reduce", "-n", "0"}, &out), kExitOk);
  EXPECT_NE(out.find("connections=0 delivered_before=0 delivered_after=0"), std::string::npos)
      << out;
  EXPECT_EQ(Cli({"exp", "reduce", "-n", "-5"}), kExitConfig);
}

TEST(Cli, DumpFlowsAt) {
  std::string out;
  ASSERT_EQ(Cli({"dump-flows", (ScenarioDir() / "fig8.scn").string(), "--at", "0.5"}, &out),
            kExitOk);
  EXPECT_NE(out.find("# fcf (FCF)"), std::string::npos);
  EXPECT_NE(out.find("# spf-hih (SPF)"), std::string::npos);
}

TEST(Cli, BinaryExitStatus) {
  std::string cmd = std::string(HONEYDOC_CLI) + " validate /nonexistent/x.trace 2>/dev/null";
  int status = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), kExitConfig);
  cmd = std::string(HONEYDOC_CLI) + " exp sensibility >/dev/null";
  status = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), kExitOk);
}

}  // namespace
}  // namespace honeydoc::harness
