#include "honeydoc/orchestrator/connection.h"

#include "honeydoc/core/error.h"

namespace honeydoc::orchestrator {

std::string_view MechanismName(Mechanism m) {
  switch (m) {
    case Mechanism::kDirect:
      return "direct";
    case Mechanism::kM1:
      return "m1";
    case Mechanism::kM2:
      return "m2";
  }
  return "?";
}

std::optional<Mechanism> ParseMechanism(std::string_view name) {
  if (name == "direct") return Mechanism::kDirect;
  if (name == "m1" || name == "M1") return Mechanism::kM1;
  if (name == "m2" || name == "M2") return Mechanism::kM2;
  return std::nullopt;
}

std::string_view PhaseName(Phase p) {
  switch (p) {
    case Phase::kP1Established:
      return "P1";
    case Phase::kP2Migrating:
      return "P2";
    case Phase::kP3Synchronized:
      return "P3";
    case Phase::kTerminated:
      return "TERMINATED";
  }
  return "?";
}

std::optional<Phase> ParsePhase(std::string_view name) {
  if (name == "P1") return Phase::kP1Established;
  if (name == "P2") return Phase::kP2Migrating;
  if (name == "P3") return Phase::kP3Synchronized;
  if (name == "TERMINATED") return Phase::kTerminated;
  return std::nullopt;
}

bool CanTransition(Phase from, Phase to) {
  switch (from) {
    case Phase::kP1Established:
      return to == Phase::kP2Migrating || to == Phase::kTerminated;
    case Phase::kP2Migrating:
      return to == Phase::kP3Synchronized || to == Phase::kTerminated;
    case Phase::kP3Synchronized:
    case Phase::kTerminated:
      return false;
  }
  return false;
}

std::string_view DecisionKindName(DecisionKind k) {
  switch (k) {
    case DecisionKind::kDrop:
      return "drop";
    case DecisionKind::kForwardTo:
      return "forward";
    case DecisionKind::kRedirectTo:
      return "redirect";
  }
  return "?";
}

SeqDiffs ComputeDiffs(std::uint32_t frontend_isn, std::uint32_t backend_isn) {
  SeqDelta ack = SeqOffset(backend_isn, frontend_isn);
  return {ack, -ack};
}

void AdvancePhase(ConnectionRecord& conn, Phase to) {
  if (!CanTransition(conn.phase, to)) {
    throw ContractViolation("illegal phase transition " +
                            std::string(PhaseName(conn.phase)) + " -> " +
                            std::string(PhaseName(to)));
  }
  conn.phase = to;
}

void CheckInvariants(const ConnectionRecord& conn) {
  bool migrating = conn.phase == Phase::kP2Migrating ||
                   conn.phase == Phase::kP3Synchronized;
  if (conn.backend_isn && !migrating) {
    throw ContractViolation("backend ISN outside P2/P3");
  }
  if (conn.diffs.has_value() != conn.backend_isn.has_value()) {
    throw ContractViolation("diffs and backend ISN out of step");
  }
  if (conn.phase == Phase::kP3Synchronized && !conn.backend_isn) {
    throw ContractViolation("P3 without backend ISN");
  }
  if (conn.phase == Phase::kP3Synchronized && conn.stored_payload) {
    throw ContractViolation("stored payload retained in P3");
  }
}

}  // namespace honeydoc::orchestrator
