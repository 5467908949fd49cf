#ifndef HONEYDOC_HARNESS_EXPERIMENTS_H_
#define HONEYDOC_HARNESS_EXPERIMENTS_H_

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "honeydoc/harness/report.h"
#include "honeydoc/harness/scenario.h"
#include "honeydoc/harness/validator.h"

namespace honeydoc::harness {

// ---- Rule-driven flow tables -------------------------------------------

struct Probe {
  std::uint16_t port = 0;
  std::string disposition;  // "controller", "denied" or "forwarded:<port>"
};

struct SensibilityResult {
  std::string dump;        // ovs-ofctl style FCF table after controller init
  std::string normalized;  // the same without durations
  std::vector<Probe> probes;
};

// Initialises the controller against a standalone FCF (no traffic), dumps
// the table, then pushes one attacker SYN per port through it.
SensibilityResult ExpSensibility(const Scenario& scenario,
                                 const std::vector<std::uint16_t>& ports = {21, 25, 22});

// ---- SSH redirection ------------------------------------------------------

struct HandoverResult {
  Trace trace;
  Verdict verdict;
  // Frame lines of the first connection, attacker link then backend link.
  std::string attacker_graph;
  std::string backend_graph;
};

HandoverResult ExpHandover(Scenario scenario, orchestrator::Mechanism mechanism);

// ---- First-push latency ---------------------------------------------------

struct LatencyRun {
  orchestrator::Mechanism mechanism = orchestrator::Mechanism::kDirect;
  Trace trace;
  std::vector<FirstPush> pushes;
  LatencyStats stats;
};

inline constexpr std::array<orchestrator::Mechanism, 3> kLatencyMechanisms = {
    orchestrator::Mechanism::kDirect, orchestrator::Mechanism::kM1,
    orchestrator::Mechanism::kM2};

// Runs the scenario's attacker with `connections` connections at `rate_per_s`
// under each mechanism. The report carries one CSV row per connection, the
// per-mechanism summary and 100 ms packet bins at the first HIH.
ExperimentReport ExpLatency(const Scenario& scenario, int connections, double rate_per_s,
                            std::vector<LatencyRun>* runs = nullptr);

// ---- Data reduction ---------------------------------------------------------

inline constexpr std::array<std::uint16_t, 9> kTable3Ports = {
    21, 42, 135, 445, 1433, 5060, 40950, 42737, 53360};
inline constexpr std::array<std::uint64_t, 9> kTable3Hits = {115, 28, 12, 2, 2,
                                                             7,   1,  1,  1};

struct AttackPlan {
  std::vector<simnet::ConnectionPlan> connections;
};

// Seeded synthetic scan: a fraction `off_list` of the connections targets a
// uniformly chosen port outside the allowlist, the rest follow the Table III
// hit counts.
AttackPlan GenerateAttack(std::size_t connections, double off_list, std::uint64_t seed,
                          IpAddr target, SimTime spacing = Millis(5));

struct ReductionResult {
  std::map<std::uint16_t, std::uint64_t> generated;
  std::map<std::uint16_t, std::uint64_t> before;  // decoy-delivered, no filter
  std::map<std::uint16_t, std::uint64_t> after;   // decoy-delivered, allowlist
  std::uint64_t off_list_after = 0;
  // Goodness of fit of the on-list part of `before` to Table III.
  double chi_square = 0;
  double p_value = 1;
};

// Builds the catch-all sensor scenario, replays the plan without filtering
// and under the Table III allowlist.
ReductionResult ExpDataReduction(const AttackPlan& plan, std::uint64_t seed);

// Pearson statistic and upper-tail p for observed counts against expected
// proportions (weights need not be normalised).
std::pair<double, double> ChiSquareFit(const std::vector<std::uint64_t>& observed,
                                       const std::vector<std::uint64_t>& weights);

}  // namespace honeydoc::harness

#endif  // HONEYDOC_HARNESS_EXPERIMENTS_H_
