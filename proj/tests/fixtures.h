#ifndef HONEYDOC_TESTS_FIXTURES_H_
#define HONEYDOC_TESTS_FIXTURES_H_

#include <cstdint>
#include <string>

#include <fmt/format.h>

#include "honeydoc/harness/runner.h"
#include "honeydoc/harness/scenario.h"

namespace honeydoc::testing {

// SSH-style handover scene with a scripted dialogue of `turns` exchanges and
// every ISN pinned.
inline harness::Scenario DialogueScenario(orchestrator::Mechanism mech,
                                          std::uint32_t attacker_isn,
                                          std::uint32_t frontend_isn,
                                          std::uint32_t backend_isn, int turns) {
  std::string attacker_turns;
  std::string script_turns;
  for (int i = 0; i < turns; ++i) {
    attacker_turns += fmt::format("turn = \"C{}-{}\\r\\n\"\n", i, std::string(i * 7 % 40, 'x'));
    script_turns += fmt::format("turn = ANY => \"R{}-{}\\r\\n\" stage T{}\n", i,
                                std::string(i * 13 % 50, 'y'), i);
  }
  std::string text = fmt::format(
      "[scenario]\nmechanism = {}\nseed = 1\nhorizon_ms = 20000\nrules = handover.rules\n"
      "[topology]\nswitch = fcf FCF\nswitch = spf-hih SPF\n"
      "link = attacker:1 fcf:1\nlink = mih:1 fcf:2\nlink = spf-hih:1 fcf:3\n"
      "link = hih:1 spf-hih:2\n"
      "[attacker attacker]\nip = 10.1.0.2\nmac = 02:00:00:01:00:02\n"
      "target = 10.1.1.2:22\nisn = {}\n{}"
      "[decoy mih]\nclass = MIH\nip = 10.1.1.2\nmac = 02:00:00:01:01:02\nopen = 22\n"
      "script = 22 dialogue\nisn = {}\n"
      "[decoy hih]\nclass = HIH\nip = 10.1.1.2\nmac = 02:00:00:01:01:02\nopen = 22\n"
      "script = 22 dialogue\nisn = {}\n"
      "[script dialogue]\ntag = dlg\n{}"
      "[controller]\nisn = {}\n",
      orchestrator::MechanismName(mech), attacker_isn, attacker_turns, frontend_isn,
      backend_isn, script_turns, frontend_isn);
  return harness::ParseScenario(text, harness::ScenarioDir(), "dialogue");
}

// Byte streams seen by both ends of the single attacker connection.
struct Streams {
  Bytes attacker_sent;
  Bytes attacker_received;
  Bytes backend_received;
  Bytes backend_sent;
};

inline Streams StreamsOf(const harness::ScenarioRun& run) {
  Streams s;
  const auto& conn = run.sim().attacker("attacker").connections().at(0);
  s.attacker_sent = conn.sent;
  s.attacker_received = conn.received;
  for (const auto& [key, stream] : run.sim().decoy("hih").streams()) {
    s.backend_received.insert(s.backend_received.end(), stream.received.begin(),
                              stream.received.end());
    s.backend_sent.insert(s.backend_sent.end(), stream.sent.begin(), stream.sent.end());
  }
  return s;
}

}  // namespace honeydoc::testing

#endif  // HONEYDOC_TESTS_FIXTURES_H_
