#ifndef HONEYDOC_DECOY_DECOY_HOST_H_
#define HONEYDOC_DECOY_DECOY_HOST_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "honeydoc/core/five_tuple.h"
#include "honeydoc/core/host.h"
#include "honeydoc/decoy/activity_log.h"
#include "honeydoc/decoy/script.h"

namespace honeydoc::decoy {

enum class DecoyClass { kLih, kMih, kHih };

std::string_view DecoyClassName(DecoyClass cls);  // "LIH" / "MIH" / "HIH"
std::optional<DecoyClass> ParseDecoyClass(std::string_view name);

// A connection the decoy opens by itself, e.g. a compromised HIH calling out.
struct OutboundIntent {
  SimTime at{0};
  IpAddr dst_ip;
  std::uint16_t dst_port = 0;
  Proto proto = Proto::kTcp;
  Bytes payload;
  bool operator==(const OutboundIntent&) const = default;
};

struct DecoyConfig {
  bool IsOpen(std::uint16_t port) const {
    return all_ports_open || open_ports.contains(port);
  }

  std::string name;
  DecoyClass cls = DecoyClass::kMih;
  IpAddr ip;
  MacAddr mac;
  std::set<std::uint16_t> open_ports;
  bool all_ports_open = false;  // a catch-all sensor
  std::map<std::uint16_t, std::string> scripts;  // port -> script name
  std::optional<std::string> default_script;     // for ports without one
  SimTime response_delay{0};
  std::optional<std::uint32_t> fixed_isn;
  // Next-hop MAC for frames to addresses that are not decoys.
  MacAddr gateway_mac;
  std::vector<OutboundIntent> outbound;
};

// Per-connection application data, kept after the connection closes.
struct AppStream {
  Bytes received;
  Bytes sent;
};

// Minimal TCP endpoint: handshake, strict in-order delivery, cumulative ACK,
// FIN and RST. Never retransmits.
class DecoyHost {
 public:
  // `scripts` must outlive the host.
  DecoyHost(DecoyConfig config, const ScriptLibrary* scripts, IsnSource isn);

  const DecoyConfig& config() const { return config_; }
  const std::string& name() const { return config_.name; }

  // Timers for the configured outbound intents.
  HostActions Start();
  HostActions OnSegment(SimTime now, const Segment& seg);
  HostActions OnTimer(SimTime now, std::uint64_t tag);

  // Command-level activity record for an HIH payload. Throws
  // ContractViolation on other classes; nullopt for empty payloads.
  std::optional<ActivityLogEntry> HihRecordActivity(SimTime now,
                                                    const Segment& seg,
                                                    std::string stage) const;

  const ActivityLog& log() const { return log_; }
  std::size_t open_connections() const { return conns_.size(); }
  bool HasConnection(const FiveTuple& remote_to_local) const {
    return conns_.contains(remote_to_local);
  }
  // Keyed by the remote->local tuple.
  const std::map<FiveTuple, AppStream>& streams() const { return streams_; }

 private:
  enum class State { kSynSent, kSynReceived, kEstablished };

  struct Conn {
    State state = State::kSynReceived;
    std::uint32_t iss = 0;
    std::uint32_t irs = 0;
    std::uint32_t snd_nxt = 0;
    std::uint32_t rcv_nxt = 0;
    std::size_t cursor = 0;
    std::size_t responses = 0;
    const ServiceScript* script = nullptr;
    Bytes pending_payload;  // outbound client data sent after the handshake
  };

  Segment Reply(const Segment& in, TcpFlags flags, std::uint32_t seq,
                std::uint32_t ack, Bytes payload = {}) const;
  std::uint32_t NewIsn();
  void OnPayload(SimTime now, const FiveTuple& key, Conn& conn,
                 const Segment& seg, HostActions& out);
  void Respond(const Segment& in, Conn& conn, const FiveTuple& key,
               const Bytes& data, HostActions& out);
  void Note(HostActions& out, std::string event, const FiveTuple& key) const;

  DecoyConfig config_;
  const ScriptLibrary* scripts_;
  IsnSource isn_;
  std::map<FiveTuple, Conn> conns_;
  std::map<FiveTuple, AppStream> streams_;
  ActivityLog log_;
  std::uint16_t next_ephemeral_ = 40000;
};

}  // namespace honeydoc::decoy

#endif  // HONEYDOC_DECOY_DECOY_HOST_H_
