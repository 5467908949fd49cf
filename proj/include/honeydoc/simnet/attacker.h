#ifndef HONEYDOC_SIMNET_ATTACKER_H_
#define HONEYDOC_SIMNET_ATTACKER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "honeydoc/core/host.h"

namespace honeydoc::simnet {

// Overrides the generated schedule for one connection.
struct ConnectionPlan {
  SimTime start{0};
  std::uint16_t src_port = 0;
  IpAddr dst_ip;
  std::uint16_t dst_port = 0;
};

struct AttackerConfig {
  std::string name;
  IpAddr ip;
  MacAddr mac;
  IpAddr target_ip;
  MacAddr target_mac;
  std::uint16_t target_port = 0;
  std::vector<Bytes> script;  // payload turns, one per server response
  SimTime retransmit_initial = Millis(200);
  double retransmit_backoff = 2.0;
  int max_retries = 3;
  // Advances the script when the server stays silent after acking a turn.
  SimTime turn_timeout = Millis(500);
  double rate_per_s = 10.0;
  int connections = 1;
  SimTime start{0};
  std::uint16_t base_port = 36093;
  std::optional<std::uint32_t> fixed_isn;
  // When non-empty, replaces the rate/connections/base_port schedule.
  std::vector<ConnectionPlan> plan;
};

enum class AttackerConnState {
  kPending,
  kSynSent,
  kEstablished,
  kFinWait,
  kClosed,
  kReset,
  kAbandoned,
};

struct AttackerConn {
  std::size_t id = 0;
  ConnectionPlan plan;
  AttackerConnState state = AttackerConnState::kPending;
  std::uint32_t iss = 0;
  std::uint32_t snd_una = 0;
  std::uint32_t snd_nxt = 0;
  std::uint32_t rcv_nxt = 0;
  std::size_t next_turn = 0;
  bool response_seen = false;
  int retries = 0;          // of the currently outstanding data
  int total_retransmits = 0;
  SimTime first_send{0};
  std::uint64_t generation = 0;
  std::vector<Segment> unacked;
  Bytes sent;
  Bytes received;
};

// Scripted TCP client with exponential-backoff retransmission. Retry k of an
// unacknowledged send goes out initial * backoff^(k-1) after the first
// transmission; the connection is abandoned at the following expiry.
class AttackerHost {
 public:
  // Throws ConfigError for a non-positive rate or negative retry count.
  AttackerHost(AttackerConfig config, IsnSource isn);

  const AttackerConfig& config() const { return config_; }
  const std::string& name() const { return config_.name; }
  const std::vector<AttackerConn>& connections() const { return conns_; }

  HostActions Start();
  HostActions OnSegment(SimTime now, const Segment& seg);
  HostActions OnTimer(SimTime now, std::uint64_t tag);

 private:
  enum TimerKind : std::uint64_t { kStart = 0, kRetransmit = 1, kTurn = 2 };

  static std::uint64_t Tag(std::size_t conn, std::uint64_t gen, TimerKind kind);
  Segment Make(const AttackerConn& c, TcpFlags flags, std::uint32_t seq,
               Bytes payload = {}) const;
  void Transmit(SimTime now, AttackerConn& c, std::vector<Segment> segs,
                HostActions& out);
  void SendNextTurn(SimTime now, AttackerConn& c, HostActions& out);
  void Note(HostActions& out, const AttackerConn& c, std::string event) const;

  AttackerConfig config_;
  IsnSource isn_;
  std::vector<AttackerConn> conns_;
  std::map<std::uint16_t, std::size_t> by_port_;
};

}  // namespace honeydoc::simnet

#endif  // HONEYDOC_SIMNET_ATTACKER_H_
