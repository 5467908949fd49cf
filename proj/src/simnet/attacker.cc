#include "honeydoc/simnet/attacker.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "honeydoc/core/error.h"
#include "honeydoc/core/seq.h"

namespace honeydoc::simnet {

AttackerHost::AttackerHost(AttackerConfig config, IsnSource isn)
    : config_(std::move(config)), isn_(std::move(isn)) {
  if (config_.plan.empty()) {
    if (!(config_.rate_per_s > 0)) throw ConfigError("attacker rate must be > 0");
    if (config_.connections < 0) throw ConfigError("negative connection count");
    for (int i = 0; i < config_.connections; ++i) {
      ConnectionPlan p;
      p.start = config_.start +
                SimTime(static_cast<std::int64_t>(std::llround(i * 1e6 / config_.rate_per_s)));
      int port = config_.base_port + i;
      if (port > 65535) throw ConfigError("attacker source ports exhausted");
      p.src_port = static_cast<std::uint16_t>(port);
      p.dst_ip = config_.target_ip;
      p.dst_port = config_.target_port;
      config_.plan.push_back(p);
    }
  }
  if (config_.max_retries < 0) throw ConfigError("negative retry count");
  if (!(config_.retransmit_backoff >= 1.0)) {
    throw ConfigError("retransmit backoff must be >= 1");
  }
  for (std::size_t i = 0; i < config_.plan.size(); ++i) {
    AttackerConn c;
    c.id = i;
    c.plan = config_.plan[i];
    if (!by_port_.emplace(c.plan.src_port, i).second) {
      throw ConfigError(fmt::format("attacker source port {} used twice",
                                    c.plan.src_port));
    }
    conns_.push_back(std::move(c));
  }
}

std::uint64_t AttackerHost::Tag(std::size_t conn, std::uint64_t gen,
                                TimerKind kind) {
  return (static_cast<std::uint64_t>(conn) << 40) | ((gen & 0xffffffffffULL) << 2) |
         kind;
}

Segment AttackerHost::Make(const AttackerConn& c, TcpFlags flags,
                           std::uint32_t seq, Bytes payload) const {
  Segment s;
  s.src_mac = config_.mac;
  s.dst_mac = config_.target_mac;
  s.src_ip = config_.ip;
  s.dst_ip = c.plan.dst_ip;
  s.proto = Proto::kTcp;
  s.src_port = c.plan.src_port;
  s.dst_port = c.plan.dst_port;
  s.flags = flags;
  s.seq = seq;
  s.ack = flags.Has(kAck) ? c.rcv_nxt : 0;
  s.payload = std::move(payload);
  return s;
}

void AttackerHost::Note(HostActions& out, const AttackerConn& c,
                        std::string event) const {
  out.Note(EventKind::kDecision,
           {{"event", std::move(event)},
            {"conn", std::to_string(c.id)},
            {"sport", std::to_string(c.plan.src_port)}});
}

HostActions AttackerHost::Start() {
  HostActions out;
  for (const AttackerConn& c : conns_) out.Timer(c.plan.start, Tag(c.id, 0, kStart));
  return out;
}

void AttackerHost::Transmit(SimTime now, AttackerConn& c,
                            std::vector<Segment> segs, HostActions& out) {
  for (const Segment& s : segs) out.Send(s);
  c.unacked = std::move(segs);
  c.retries = 0;
  c.first_send = now;
  ++c.generation;
  out.Timer(config_.retransmit_initial, Tag(c.id, c.generation, kRetransmit));
}

void AttackerHost::SendNextTurn(SimTime now, AttackerConn& c, HostActions& out) {
  c.response_seen = false;
  if (c.next_turn >= config_.script.size()) {
    Segment fin = Make(c, TcpFlags(kFin | kAck), c.snd_nxt);
    c.snd_nxt += 1;
    c.state = AttackerConnState::kFinWait;
    Transmit(now, c, {fin}, out);
    return;
  }
  const Bytes& data = config_.script[c.next_turn++];
  std::vector<Segment> segs;
  for (std::size_t off = 0; off < data.size(); off += kMaxSegmentPayload) {
    std::size_t n = std::min(kMaxSegmentPayload, data.size() - off);
    bool last = off + n == data.size();
    Bytes chunk(data.begin() + static_cast<std::ptrdiff_t>(off),
                data.begin() + static_cast<std::ptrdiff_t>(off + n));
    segs.push_back(Make(c, last ? TcpFlags(kPsh | kAck) : TcpFlags(kAck),
                        c.snd_nxt, std::move(chunk)));
    c.snd_nxt += static_cast<std::uint32_t>(n);
  }
  c.sent.insert(c.sent.end(), data.begin(), data.end());
  if (segs.empty()) {
    // An empty turn only waits for the server.
    c.unacked.clear();
    ++c.generation;
    out.Timer(config_.turn_timeout, Tag(c.id, c.generation, kTurn));
    return;
  }
  Transmit(now, c, std::move(segs), out);
}

HostActions AttackerHost::OnTimer(SimTime now, std::uint64_t tag) {
  HostActions out;
  std::size_t id = tag >> 40;
  std::uint64_t gen = (tag >> 2) & 0xffffffffffULL;
  auto kind = static_cast<TimerKind>(tag & 3);
  if (id >= conns_.size()) return out;
  AttackerConn& c = conns_[id];

  switch (kind) {
    case kStart: {
      if (c.state != AttackerConnState::kPending) return out;
      c.iss = config_.fixed_isn ? *config_.fixed_isn : isn_();
      c.snd_una = c.iss;
      c.snd_nxt = c.iss + 1;
      c.state = AttackerConnState::kSynSent;
      Transmit(now, c, {Make(c, kSyn, c.iss)}, out);
      return out;
    }
    case kRetransmit: {
      if (gen != c.generation || c.unacked.empty()) return out;
      if (c.retries >= config_.max_retries) {
        c.state = AttackerConnState::kAbandoned;
        c.unacked.clear();
        ++c.generation;
        Note(out, c, "abandoned");
        return out;
      }
      ++c.retries;
      ++c.total_retransmits;
      for (Segment s : c.unacked) {
        if (s.flags.Has(kAck)) s.ack = c.rcv_nxt;
        out.Send(std::move(s));
      }
      double factor = std::pow(config_.retransmit_backoff, c.retries);
      SimTime next = c.first_send +
                     SimTime(static_cast<std::int64_t>(std::llround(
                         static_cast<double>(config_.retransmit_initial.count()) *
                         factor)));
      out.Timer(next - now, tag);
      return out;
    }
    case kTurn: {
      if (gen != c.generation || c.state != AttackerConnState::kEstablished) {
        return out;
      }
      SendNextTurn(now, c, out);
      return out;
    }
  }
  return out;
}

HostActions AttackerHost::OnSegment(SimTime now, const Segment& seg) {
  HostActions out;
  if (!seg.is_tcp() || seg.dst_ip != config_.ip) return out;
  auto it = by_port_.find(seg.dst_port);
  if (it == by_port_.end()) return out;
  AttackerConn& c = conns_[it->second];
  if (seg.src_ip != c.plan.dst_ip || seg.src_port != c.plan.dst_port) return out;

  if (seg.flags.Has(kRst)) {
    if (c.state == AttackerConnState::kSynSent ||
        c.state == AttackerConnState::kEstablished ||
        c.state == AttackerConnState::kFinWait) {
      c.state = AttackerConnState::kReset;
      c.unacked.clear();
      ++c.generation;
      Note(out, c, "reset");
    }
    return out;
  }

  if (c.state == AttackerConnState::kSynSent) {
    if (!seg.flags.Has(kSyn) || !seg.flags.Has(kAck) || seg.ack != c.iss + 1) {
      return out;
    }
    c.rcv_nxt = seg.seq + 1;
    c.snd_una = seg.ack;
    c.state = AttackerConnState::kEstablished;
    c.unacked.clear();
    ++c.generation;
    out.Send(Make(c, kAck, c.snd_nxt));
    SendNextTurn(now, c, out);
    return out;
  }

  if (c.state != AttackerConnState::kEstablished &&
      c.state != AttackerConnState::kFinWait) {
    return out;
  }

  if (seg.flags.Has(kSyn)) {
    // Our handshake ACK was lost or the server repeated itself.
    out.Send(Make(c, kAck, c.snd_nxt));
    return out;
  }

  bool all_acked_before = c.snd_una == c.snd_nxt;
  if (seg.flags.Has(kAck) && SeqBefore(c.snd_una, seg.ack) &&
      !SeqBefore(c.snd_nxt, seg.ack)) {
    c.snd_una = seg.ack;
    std::erase_if(c.unacked, [&](const Segment& s) {
      std::uint32_t end = s.seq + static_cast<std::uint32_t>(s.payload.size()) +
                          (s.flags.Has(kFin) || s.flags.Has(kSyn) ? 1 : 0);
      return !SeqBefore(seg.ack, end);
    });
    if (c.unacked.empty()) ++c.generation;
  }
  bool all_acked = c.snd_una == c.snd_nxt;

  bool in_order = seg.seq == c.rcv_nxt;
  if (!seg.payload.empty()) {
    if (in_order) {
      c.rcv_nxt += static_cast<std::uint32_t>(seg.payload.size());
      c.received.insert(c.received.end(), seg.payload.begin(), seg.payload.end());
      if (seg.flags.Has(kPsh)) c.response_seen = true;
    }
    out.Send(Make(c, kAck, c.snd_nxt));
  }

  if (seg.flags.Has(kFin) &&
      seg.seq + static_cast<std::uint32_t>(seg.payload.size()) == c.rcv_nxt) {
    c.rcv_nxt += 1;
    if (c.state == AttackerConnState::kFinWait) {
      out.Send(Make(c, kAck, c.snd_nxt));
    } else {
      out.Send(Make(c, TcpFlags(kFin | kAck), c.snd_nxt));
      c.snd_nxt += 1;
    }
    c.state = AttackerConnState::kClosed;
    c.unacked.clear();
    ++c.generation;
    Note(out, c, "closed");
    return out;
  }

  if (c.state != AttackerConnState::kEstablished || !all_acked) return out;
  if (c.response_seen) {
    SendNextTurn(now, c, out);
  } else if (!all_acked_before) {
    // Our turn was just acknowledged; give the server time to answer.
    out.Timer(config_.turn_timeout, Tag(c.id, c.generation, kTurn));
  }
  return out;
}

}  // namespace honeydoc::simnet
