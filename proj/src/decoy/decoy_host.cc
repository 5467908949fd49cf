#include "honeydoc/decoy/decoy_host.h"

#include <algorithm>

#include <fmt/format.h>

#include "honeydoc/core/error.h"

namespace honeydoc::decoy {
namespace {

std::string Remote(const FiveTuple& key) {
  return fmt::format("{}:{}", key.src_ip.ToString(), key.src_port);
}

}  // namespace

std::string_view DecoyClassName(DecoyClass cls) {
  switch (cls) {
    case DecoyClass::kLih:
      return "LIH";
    case DecoyClass::kMih:
      return "MIH";
    case DecoyClass::kHih:
      return "HIH";
  }
  return "?";
}

std::optional<DecoyClass> ParseDecoyClass(std::string_view name) {
  if (name == "LIH") return DecoyClass::kLih;
  if (name == "MIH") return DecoyClass::kMih;
  if (name == "HIH") return DecoyClass::kHih;
  return std::nullopt;
}

DecoyHost::DecoyHost(DecoyConfig config, const ScriptLibrary* scripts,
                     IsnSource isn)
    : config_(std::move(config)), scripts_(scripts), isn_(std::move(isn)) {}

std::uint32_t DecoyHost::NewIsn() {
  return config_.fixed_isn ? *config_.fixed_isn : isn_();
}

Segment DecoyHost::Reply(const Segment& in, TcpFlags flags, std::uint32_t seq,
                         std::uint32_t ack, Bytes payload) const {
  Segment out;
  out.src_mac = config_.mac;
  out.dst_mac = in.src_mac;
  out.src_ip = config_.ip;
  out.dst_ip = in.src_ip;
  out.proto = in.proto;
  out.src_port = in.dst_port;
  out.dst_port = in.src_port;
  if (in.is_tcp()) {
    out.flags = flags;
    out.seq = seq;
    out.ack = ack;
  }
  out.payload = std::move(payload);
  return out;
}

void DecoyHost::Note(HostActions& out, std::string event,
                     const FiveTuple& key) const {
  out.Note(EventKind::kDecoyLog,
           {{"event", std::move(event)}, {"remote", Remote(key)}});
}

HostActions DecoyHost::Start() {
  HostActions out;
  for (std::size_t i = 0; i < config_.outbound.size(); ++i) {
    out.Timer(config_.outbound[i].at, i);
  }
  return out;
}

HostActions DecoyHost::OnTimer(SimTime /*now*/, std::uint64_t tag) {
  HostActions out;
  if (tag >= config_.outbound.size()) return out;
  const OutboundIntent& intent = config_.outbound[tag];
  Segment seg;
  seg.src_mac = config_.mac;
  seg.dst_mac = config_.gateway_mac;
  seg.src_ip = config_.ip;
  seg.dst_ip = intent.dst_ip;
  seg.proto = intent.proto;
  seg.src_port = next_ephemeral_++;
  seg.dst_port = intent.dst_port;
  FiveTuple key = FiveTupleOf(seg).Reversed();
  if (intent.proto == Proto::kUdp) {
    seg.payload = intent.payload;
    auto& stream = streams_[key].sent;
    stream.insert(stream.end(), intent.payload.begin(), intent.payload.end());
    out.Send(std::move(seg));
    Note(out, "outbound-udp", key);
    return out;
  }
  Conn conn;
  conn.state = State::kSynSent;
  conn.iss = NewIsn();
  conn.snd_nxt = conn.iss + 1;
  conn.pending_payload = intent.payload;
  seg.flags = kSyn;
  seg.seq = conn.iss;
  conns_[key] = std::move(conn);
  out.Send(std::move(seg));
  Note(out, "outbound-syn", key);
  return out;
}

HostActions DecoyHost::OnSegment(SimTime now, const Segment& seg) {
  HostActions out;
  if (seg.dst_ip != config_.ip) return out;
  FiveTuple key = FiveTupleOf(seg);

  if (!seg.is_tcp()) {
    if (seg.payload.empty()) return out;
    auto& stream = streams_[key].received;
    stream.insert(stream.end(), seg.payload.begin(), seg.payload.end());
    Note(out, "udp", key);
    return out;
  }

  auto it = conns_.find(key);
  if (seg.flags.Has(kRst)) {
    if (it != conns_.end()) {
      conns_.erase(it);
      Note(out, "reset", key);
    }
    return out;
  }

  if (it == conns_.end()) {
    if (!seg.flags.Has(kSyn) || seg.flags.Has(kAck)) return out;
    if (!config_.IsOpen(seg.dst_port)) {
      out.Send(Reply(seg, TcpFlags(kRst | kAck), 0, seg.seq + 1));
      return out;
    }
    Conn conn;
    conn.iss = NewIsn();
    conn.irs = seg.seq;
    conn.snd_nxt = conn.iss + 1;
    conn.rcv_nxt = seg.seq + 1;
    std::optional<std::string> script = config_.default_script;
    if (auto s = config_.scripts.find(seg.dst_port); s != config_.scripts.end()) {
      script = s->second;
    }
    if (script && scripts_ != nullptr) conn.script = scripts_->Find(*script);
    out.Send(Reply(seg, TcpFlags(kSyn | kAck), conn.iss, conn.rcv_nxt));
    conns_[key] = conn;
    Note(out, "accept", key);
    return out;
  }

  Conn& conn = it->second;
  if (conn.state == State::kSynSent) {
    if (seg.flags.Has(kSyn) && seg.flags.Has(kAck) && seg.ack == conn.snd_nxt) {
      conn.irs = seg.seq;
      conn.rcv_nxt = seg.seq + 1;
      conn.state = State::kEstablished;
      out.Send(Reply(seg, kAck, conn.snd_nxt, conn.rcv_nxt));
      if (!conn.pending_payload.empty()) {
        Respond(seg, conn, key, conn.pending_payload, out);
        conn.pending_payload.clear();
      }
    }
    return out;
  }

  if (seg.flags.Has(kSyn)) {
    if (conn.state == State::kSynReceived && seg.seq == conn.irs) {
      out.Send(Reply(seg, TcpFlags(kSyn | kAck), conn.iss, conn.rcv_nxt));
    }
    return out;
  }

  if (seg.flags.Has(kAck) && conn.state == State::kSynReceived &&
      seg.ack == conn.snd_nxt) {
    conn.state = State::kEstablished;
  }
  if (!seg.payload.empty()) OnPayload(now, key, conn, seg, out);

  if (seg.flags.Has(kFin) &&
      seg.seq + static_cast<std::uint32_t>(seg.payload.size()) == conn.rcv_nxt) {
    conn.rcv_nxt += 1;
    out.Send(Reply(seg, TcpFlags(kFin | kAck), conn.snd_nxt, conn.rcv_nxt));
    conns_.erase(key);
    Note(out, "close", key);
  }
  return out;
}

void DecoyHost::OnPayload(SimTime now, const FiveTuple& key, Conn& conn,
                          const Segment& seg, HostActions& out) {
  if (seg.seq != conn.rcv_nxt) {
    out.Send(Reply(seg, kAck, conn.snd_nxt, conn.rcv_nxt));
    return;
  }
  conn.state = State::kEstablished;
  conn.rcv_nxt += static_cast<std::uint32_t>(seg.payload.size());
  auto& stream = streams_[key].received;
  stream.insert(stream.end(), seg.payload.begin(), seg.payload.end());

  std::optional<std::size_t> turn;
  if (conn.script != nullptr) turn = conn.script->Match(seg.payload, conn.cursor);
  std::string stage = turn ? conn.script->turns[*turn].stage : "";
  std::string tag = conn.script ? conn.script->log_tag : "tcp";

  std::optional<ActivityLogEntry> entry;
  if (config_.cls == DecoyClass::kHih) {
    entry = HihRecordActivity(now, seg, stage.empty() ? "-" : stage);
  } else if (!stage.empty()) {
    entry = ActivityLogEntry{now,  config_.name, seg.src_ip, seg.src_port,
                             tag,  seg.payload,  seg.payload.size(), stage};
  }
  if (entry) {
    entry->tag = tag;
    out.Note(EventKind::kDecoyLog,
             {{"event", "activity"},
              {"remote", Remote(key)},
              {"bytes", std::to_string(entry->bytes)},
              {"stage", entry->stage}});
    log_.Append(std::move(*entry));
  }

  Bytes response;
  if (turn) {
    conn.cursor = *turn + 1;
    bool lih_spent = config_.cls == DecoyClass::kLih && conn.responses >= 1;
    if (!lih_spent) response = conn.script->turns[*turn].respond;
  }
  if (response.empty()) {
    out.Send(Reply(seg, kAck, conn.snd_nxt, conn.rcv_nxt));
    return;
  }
  Respond(seg, conn, key, response, out);
}

void DecoyHost::Respond(const Segment& in, Conn& conn, const FiveTuple& key,
                        const Bytes& data, HostActions& out) {
  SimTime delay = config_.response_delay;
  if (delay > SimTime(0)) out.Send(Reply(in, kAck, conn.snd_nxt, conn.rcv_nxt));
  for (std::size_t off = 0; off < data.size(); off += kMaxSegmentPayload) {
    std::size_t n = std::min(kMaxSegmentPayload, data.size() - off);
    bool last = off + n == data.size();
    Bytes chunk(data.begin() + static_cast<std::ptrdiff_t>(off),
                data.begin() + static_cast<std::ptrdiff_t>(off + n));
    TcpFlags flags = last ? TcpFlags(kPsh | kAck) : TcpFlags(kAck);
    out.Send(Reply(in, flags, conn.snd_nxt, conn.rcv_nxt, std::move(chunk)),
             delay);
    conn.snd_nxt += static_cast<std::uint32_t>(n);
  }
  auto& stream = streams_[key].sent;
  stream.insert(stream.end(), data.begin(), data.end());
  ++conn.responses;
}

std::optional<ActivityLogEntry> DecoyHost::HihRecordActivity(
    SimTime now, const Segment& seg, std::string stage) const {
  if (config_.cls != DecoyClass::kHih) {
    throw ContractViolation("activity recording requested on non-HIH decoy " +
                            config_.name);
  }
  if (seg.payload.empty()) return std::nullopt;
  return ActivityLogEntry{now,         config_.name,       seg.src_ip,
                          seg.src_port, "hih",             seg.payload,
                          seg.payload.size(), std::move(stage)};
}

}  // namespace honeydoc::decoy
