#ifndef HONEYDOC_HARNESS_VALIDATOR_H_
#define HONEYDOC_HARNESS_VALIDATOR_H_

#include <optional>
#include <string>
#include <vector>

#include "honeydoc/core/trace.h"

namespace honeydoc::harness {

struct CheckResult {
  std::string name;
  bool ok = true;
  std::string detail;
};

struct Verdict {
  std::vector<CheckResult> checks;

  bool ok() const;
  const CheckResult* first_failure() const;
  // One "PASS name" / "FAIL name: detail" line per check.
  std::string Format() const;
};

// Checks every trace must satisfy:
//   time-monotonic   events never go back in time
//   stealth          frames towards an attacker carry a decoy identity, and
//                    each advertised address shows a single MAC
//   ack-bounds       on host links, no TCP ACK covers bytes the peer has not sent
//   exactly-once     each payload byte reaches a migration target once
//   phase-order      per-connection phases only move forward
Verdict ValidateTrace(const Trace& trace);

// ValidateTrace plus the redirection pattern of the SSH handover experiment,
// checked on the first migrated connection:
//   handshake        attacker link opens with Seq=0 / Seq=0,Ack=1 / Seq=1,Ack=1
//   first-payload    the first attacker PSH has Len=43 at Seq=1,Ack=1
//   migrated-ack     the first frame to the attacker after synchronisation
//                    acks 44
//   retransmissions  attacker PSH retransmits before synchronisation, none after
//   backend-replay   backend link shows SYN, SYN/ACK, ACK then the payload
//   backend-once     exactly one payload frame reaches the backend, at Seq=1
//   old-terminated   the frontend connection is released (RST in m2)
Verdict ValidateHandover(const Trace& trace);

}  // namespace honeydoc::harness

#endif  // HONEYDOC_HARNESS_VALIDATOR_H_
