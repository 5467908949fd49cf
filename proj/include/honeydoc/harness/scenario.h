#ifndef HONEYDOC_HARNESS_SCENARIO_H_
#define HONEYDOC_HARNESS_SCENARIO_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "honeydoc/dataplane/switch_node.h"
#include "honeydoc/decoy/decoy_host.h"
#include "honeydoc/decoy/script.h"
#include "honeydoc/orchestrator/connection.h"
#include "honeydoc/orchestrator/controller.h"
#include "honeydoc/rules/rule.h"
#include "honeydoc/simnet/attacker.h"

namespace honeydoc::harness {

struct ScenarioSwitch {
  std::string name;
  dataplane::SwitchRole role = dataplane::SwitchRole::kFcf;
};

struct ScenarioLink {
  std::string a_node;
  int a_port = 0;
  std::string b_node;
  int b_port = 0;
  std::optional<SimTime> latency;  // default: the topology's link latency
};

// Everything needed to build one run. Produced by ParseScenario or assembled
// directly by the experiments.
struct Scenario {
  std::string name;
  orchestrator::Mechanism mechanism = orchestrator::Mechanism::kM2;
  std::uint64_t seed = 0;
  SimTime horizon = Millis(60000);
  std::optional<std::filesystem::path> rules_path;
  std::vector<rules::ClassificationRule> rules;

  SimTime link_latency = Millis(1);
  SimTime controller_latency = Millis(5);
  SimTime controller_processing = Millis(2);
  MacAddr gateway_mac;
  std::vector<ScenarioSwitch> switches;
  std::vector<ScenarioLink> links;

  std::vector<decoy::DecoyConfig> decoys;
  std::vector<simnet::AttackerConfig> attackers;
  std::vector<decoy::ServiceScript> scripts;

  std::optional<orchestrator::OutboundPolicy> policy;
  SimTime alert_delay{0};
  SimTime handshake_timeout = Millis(3000);
  std::optional<std::uint32_t> controller_isn;
  std::optional<std::string> direct_target;
};

// Line-oriented sections with `key = value` pairs:
//   [scenario] [topology] [decoy NAME] [attacker NAME] [script NAME]
//   [policy] [controller]
// Relative rule paths resolve against `base_dir`. The rules file is read and
// parsed here. Throws ParseError (with line) for syntax problems and
// ConfigError for unresolved references.
Scenario ParseScenario(std::string_view text,
                       const std::filesystem::path& base_dir,
                       std::string name = "scenario");

// Reads and parses `path`; HONEYDOC_SEED, when set, replaces the seed.
// Throws ConfigError when the file is missing.
Scenario LoadScenario(const std::filesystem::path& path);

// Cross-reference checks shared by parsed and assembled scenarios: unique
// names, resolvable scripts and targets, identical-fingerprint decoys on
// distinct ports, one MAC per decoy address. Throws ConfigError.
void ValidateScenario(const Scenario& scenario);

// Reads HONEYDOC_SEED; throws ConfigError when it is set but not a number.
std::optional<std::uint64_t> SeedFromEnvironment();

// Bundled scenario directory (compile-time default).
std::filesystem::path ScenarioDir();

}  // namespace honeydoc::harness

#endif  // HONEYDOC_HARNESS_SCENARIO_H_
