#ifndef HONEYDOC_ORCHESTRATOR_CONNECTION_H_
#define HONEYDOC_ORCHESTRATOR_CONNECTION_H_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "honeydoc/core/five_tuple.h"
#include "honeydoc/core/seq.h"

namespace honeydoc::orchestrator {

// kDirect is the static-forwarding baseline: no controller on the data path.
enum class Mechanism { kDirect, kM1, kM2 };

std::string_view MechanismName(Mechanism m);  // "direct" / "m1" / "m2"
std::optional<Mechanism> ParseMechanism(std::string_view name);

enum class Phase { kP1Established, kP2Migrating, kP3Synchronized, kTerminated };

std::string_view PhaseName(Phase p);  // "P1" / "P2" / "P3" / "TERMINATED"
std::optional<Phase> ParsePhase(std::string_view name);

// P1 -> P2 -> P3, and P1/P2 -> Terminated.
bool CanTransition(Phase from, Phase to);

enum class DecisionKind { kDrop, kForwardTo, kRedirectTo };

std::string_view DecisionKindName(DecisionKind k);  // "drop" / "forward" / "redirect"

struct Decision {
  DecisionKind kind = DecisionKind::kDrop;
  std::string decoy;  // empty for kDrop
  bool operator==(const Decision&) const = default;
};

// Offsets that map the frontend's sequence space onto the backend's:
// ack_diff is added to attacker->backend ACKs, seq_diff to backend->attacker
// SEQs. ack_diff lies in (-2^31, 2^31].
struct SeqDiffs {
  SeqDelta ack_diff = 0;
  SeqDelta seq_diff = 0;
  bool operator==(const SeqDiffs&) const = default;
};

SeqDiffs ComputeDiffs(std::uint32_t frontend_isn, std::uint32_t backend_isn);

struct ConnectionRecord {
  std::uint64_t id = 0;
  FiveTuple key;  // attacker -> decoy
  Phase phase = Phase::kP1Established;
  Mechanism mechanism = Mechanism::kM1;
  int attacker_port = 0;
  MacAddr attacker_mac;
  MacAddr advertised_mac;
  std::uint32_t attacker_isn = 0;
  std::optional<std::uint32_t> frontend_isn;  // known from the start in M1
  std::optional<std::uint32_t> backend_isn;
  std::optional<std::string> frontend;        // M2 frontend decoy
  std::optional<Segment> stored_payload;      // first payload until handed off
  std::vector<Segment> pending;               // later segments held meanwhile
  std::optional<Decision> decision;
  std::optional<std::string> target;
  std::optional<SeqDiffs> diffs;
  std::uint64_t timer_generation = 0;
  bool torn_down = false;
  // (seq, length, flags) of attacker segments already handed to the backend.
  std::set<std::tuple<std::uint32_t, std::size_t, std::uint8_t>> forwarded;
};

// Moves to `to`; throws ContractViolation for an illegal transition.
void AdvancePhase(ConnectionRecord& conn, Phase to);

// Throws ContractViolation when the record is internally inconsistent:
// backend ISN and diffs only in P2/P3 and always in P3; the stored payload
// never survives into P3.
void CheckInvariants(const ConnectionRecord& conn);

}  // namespace honeydoc::orchestrator

#endif  // HONEYDOC_ORCHESTRATOR_CONNECTION_H_
