#ifndef HONEYDOC_ORCHESTRATOR_CONTROLLER_H_
#define HONEYDOC_ORCHESTRATOR_CONTROLLER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "honeydoc/decoy/decoy_host.h"
#include "honeydoc/orchestrator/connection.h"
#include "honeydoc/rules/translate.h"
#include "honeydoc/simnet/simulation.h"

namespace honeydoc::orchestrator {

// The switch that rewrites sequence numbers in front of one decoy.
struct SpfBinding {
  std::string sw;
  int fcf_side_port = 0;
  int decoy_side_port = 0;
};

// How the controller reaches one decoy: the FCF port leading to it (directly
// or through its SPF).
struct DecoyBinding {
  std::string name;
  decoy::DecoyClass cls = decoy::DecoyClass::kMih;
  IpAddr ip;
  MacAddr mac;
  std::set<std::uint16_t> open_ports;
  bool all_ports_open = false;
  bool IsOpen(std::uint16_t port) const {
    return all_ports_open || open_ports.contains(port);
  }
  int fcf_port = 0;
  std::optional<SpfBinding> spf;
};

struct AttackerBinding {
  IpAddr ip;
  MacAddr mac;
  int fcf_port = 0;
};

struct OutboundPolicy {
  enum class Default { kDiscard, kAllow };
  Default default_action = Default::kDiscard;
  std::map<std::pair<IpAddr, std::uint16_t>, std::string> redirect_map;
};

struct ControllerConfig {
  Mechanism mechanism = Mechanism::kM2;
  std::string fcf;
  std::vector<DecoyBinding> decoys;     // declaration order
  std::vector<AttackerBinding> attackers;
  std::optional<std::string> direct_target;  // kDirect; default first HIH
  SimTime alert_delay{0};                    // classifier latency
  SimTime handshake_timeout = Millis(3000);
  std::optional<std::uint32_t> fixed_isn;    // frontend ISN in M1
  std::optional<OutboundPolicy> policy;
};

// Per-connection entries outrank everything the ruleset installs.
inline constexpr int kConnPriority = 65000;
inline constexpr int kTapPriority = 64000;

// The SDN controller: decision engine plus both migration mechanisms.
class Controller : public simnet::ControllerApp {
 public:
  // Translates the ruleset. Throws ConfigError when a rule needs a decoy
  // class the scenario lacks, or a binding or policy is inconsistent.
  Controller(ControllerConfig config,
             const std::vector<rules::ClassificationRule>& ruleset);

  void Init(simnet::ControllerContext& ctx) override;
  void OnPacketIn(simnet::ControllerContext& ctx, const std::string& sw,
                  int in_port, const Segment& seg) override;
  void OnTimer(simnet::ControllerContext& ctx, std::uint64_t tag) override;

  const ControllerConfig& config() const { return config_; }
  const rules::TranslationResult& translation() const { return translation_; }
  const std::map<FiveTuple, ConnectionRecord>& connections() const {
    return conns_;
  }
  // Classifier invocations per attacker->decoy tuple.
  const std::map<FiveTuple, int>& classify_counts() const {
    return classify_counts_;
  }
  std::uint64_t absorbed_retransmissions() const { return absorbed_; }

 private:
  enum TimerKind : std::uint64_t { kAlertTimer = 0, kHandshakeTimer = 1 };

  const DecoyBinding* FindDecoy(const std::string& name) const;
  const DecoyBinding* DecoyOnPort(int fcf_port) const;
  bool IsDecoyIp(IpAddr ip) const;
  // Round robin over decoys of `cls` carrying `ip`, in declaration order.
  const DecoyBinding* Pick(decoy::DecoyClass cls, IpAddr ip);
  // Round robin over non-HIH decoys carrying `ip` with `port` open.
  const DecoyBinding* PickFrontend(IpAddr ip, std::uint16_t port);
  ConnectionRecord* Find(const FiveTuple& key);

  void InstallDirect(simnet::ControllerContext& ctx);
  void FromAttacker(simnet::ControllerContext& ctx, int in_port,
                    const Segment& seg);
  void FromDecoy(simnet::ControllerContext& ctx, const DecoyBinding& from,
                 const Segment& seg);
  void OnSyn(simnet::ControllerContext& ctx, int in_port, const Segment& seg);
  void OnUdp(simnet::ControllerContext& ctx, int in_port, const Segment& seg);
  void OnAttackerSegment(simnet::ControllerContext& ctx, ConnectionRecord& conn,
                         const Segment& seg);
  void Decide(simnet::ControllerContext& ctx, ConnectionRecord& conn);
  void Pin(simnet::ControllerContext& ctx, ConnectionRecord& conn);
  void StartReplay(simnet::ControllerContext& ctx, ConnectionRecord& conn,
                   const DecoyBinding& target);
  void OnBackendSynAck(simnet::ControllerContext& ctx, ConnectionRecord& conn,
                       const DecoyBinding& target, const Segment& seg);
  void OnFrontendSynAck(simnet::ControllerContext& ctx, ConnectionRecord& conn,
                        const DecoyBinding& frontend, const Segment& seg);
  void Terminate(simnet::ControllerContext& ctx, ConnectionRecord& conn,
                 const std::string& reason);
  // Releases the frontend's copy of a connection: RST in M2, bookkeeping only
  // in M1. Idempotent.
  void Teardown(simnet::ControllerContext& ctx, ConnectionRecord& conn,
                const std::string& reason = "migrated");
  void ForwardToBackend(simnet::ControllerContext& ctx, ConnectionRecord& conn,
                        const Segment& seg);
  void OutboundControl(simnet::ControllerContext& ctx, const DecoyBinding& from,
                       const Segment& seg);
  void RecordDecision(simnet::ControllerContext& ctx, const ConnectionRecord& conn,
                      EventFields extra);

  ControllerConfig config_;
  rules::TranslationResult translation_;
  std::map<FiveTuple, ConnectionRecord> conns_;
  std::map<std::uint64_t, FiveTuple> by_id_;
  std::map<FiveTuple, int> classify_counts_;
  std::map<decoy::DecoyClass, std::size_t> round_robin_;
  std::size_t frontend_rr_ = 0;
  std::set<FiveTuple> outbound_seen_;
  std::map<FiveTuple, std::optional<std::string>> udp_decisions_;
  std::uint64_t next_id_ = 1;
  std::uint64_t absorbed_ = 0;
};

}  // namespace honeydoc::orchestrator

#endif  // HONEYDOC_ORCHESTRATOR_CONTROLLER_H_
