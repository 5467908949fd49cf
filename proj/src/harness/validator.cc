#include "honeydoc/harness/validator.h"

#include <map>
#include <set>

#include <fmt/format.h>

#include "honeydoc/core/five_tuple.h"
#include "honeydoc/core/seq.h"
#include "honeydoc/orchestrator/connection.h"

namespace honeydoc::harness {
namespace {

using orchestrator::Phase;

CheckResult Pass(std::string name) { return {std::move(name), true, ""}; }
CheckResult Fail(std::string name, std::string detail) {
  return {std::move(name), false, std::move(detail)};
}

std::string Describe(const TraceEvent& e) {
  const FrameRecord& f = *e.frame;
  return fmt::format("{} {} {} Seq={} Ack={} Len={}", FormatMillis(e.time), e.location,
                     f.segment.flags.ToString(), f.rel_seq, f.rel_ack,
                     f.segment.length());
}

CheckResult CheckMonotonic(const Trace& t) {
  for (std::size_t i = 1; i < t.events.size(); ++i) {
    if (t.events[i].time < t.events[i - 1].time) {
      return Fail("time-monotonic",
                  fmt::format("event {} at {} precedes {}", i,
                              FormatMillis(t.events[i].time),
                              FormatMillis(t.events[i - 1].time)));
    }
  }
  return Pass("time-monotonic");
}

CheckResult CheckStealth(const Trace& t) {
  std::set<std::pair<IpAddr, MacAddr>> identities;
  for (const TraceNode& n : t.nodes) {
    if (n.kind == "decoy" && n.ip && n.mac) identities.emplace(*n.ip, *n.mac);
  }
  std::map<IpAddr, MacAddr> seen;
  for (const TraceNode& n : t.nodes) {
    if (n.kind != "attacker" || !n.ip) continue;
    std::vector<std::string> links = t.LinksOf(n.name);
    std::set<std::string> on(links.begin(), links.end());
    for (const TraceEvent& e : t.events) {
      if (!e.frame || !on.contains(e.location)) continue;
      const Segment& s = e.frame->segment;
      if (s.src_ip == *n.ip) continue;
      if (!identities.contains({s.src_ip, s.src_mac})) {
        return Fail("stealth", fmt::format("{} reveals {} / {}", Describe(e),
                                           s.src_ip.ToString(), s.src_mac.ToString()));
      }
      auto [it, fresh] = seen.emplace(s.src_ip, s.src_mac);
      if (!fresh && it->second != s.src_mac) {
        return Fail("stealth", fmt::format("{} shows a second MAC {} for {}",
                                           Describe(e), s.src_mac.ToString(),
                                           s.src_ip.ToString()));
      }
    }
  }
  return Pass("stealth");
}

// Only links with a host at one end: between switches the two directions may
// sit in different sequence spaces while an SPF is being programmed.
CheckResult CheckAckBounds(const Trace& t) {
  std::set<std::string> host_links;
  for (const TraceNode& n : t.nodes) {
    if (n.kind == "switch") continue;
    for (std::string& l : t.LinksOf(n.name)) host_links.insert(std::move(l));
  }
  using Endpoint = std::pair<IpAddr, std::uint16_t>;
  // (link, endpoint) -> relative end of everything it has sent on that link.
  std::map<std::pair<std::string, Endpoint>, std::uint32_t> sent_end;
  for (const TraceEvent& e : t.events) {
    if (!e.frame || !e.frame->segment.is_tcp() || !host_links.contains(e.location)) {
      continue;
    }
    const Segment& s = e.frame->segment;
    Endpoint src{s.src_ip, s.src_port};
    Endpoint dst{s.dst_ip, s.dst_port};
    auto src_key = std::pair{e.location, src};
    auto dst_key = std::pair{e.location, dst};
    if (s.flags.Has(kSyn)) sent_end[src_key] = 0;
    if (auto it = sent_end.find(src_key); it != sent_end.end()) {
      std::uint32_t end = e.frame->rel_seq + static_cast<std::uint32_t>(s.length()) +
                          (s.flags.Has(kSyn) ? 1 : 0) + (s.flags.Has(kFin) ? 1 : 0);
      if (SeqBefore(it->second, end)) it->second = end;
    }
    if (!s.flags.Has(kAck)) continue;
    auto peer = sent_end.find(dst_key);
    if (peer == sent_end.end()) continue;
    if (SeqBefore(peer->second, e.frame->rel_ack)) {
      return Fail("ack-bounds",
                  fmt::format("{} acks beyond the peer's data (sent up to {})",
                              Describe(e), peer->second));
    }
  }
  return Pass("ack-bounds");
}

struct Sync {
  std::string conn;
  FiveTuple tuple;
  std::string target;
  SimTime time{0};
};

std::vector<Sync> Synchronised(const Trace& t) {
  std::vector<Sync> out;
  for (const TraceEvent& e : t.events) {
    if (e.kind != EventKind::kDecision || e.Field("event") != "synchronized") continue;
    out.push_back({e.Field("conn"), FiveTuple::Parse(e.Field("tuple")),
                   e.Field("target"), e.time});
  }
  return out;
}

std::set<std::string> LinkSet(const Trace& t, std::string_view node) {
  std::vector<std::string> v = t.LinksOf(node);
  return {v.begin(), v.end()};
}

CheckResult CheckExactlyOnce(const Trace& t) {
  for (const Sync& sync : Synchronised(t)) {
    std::set<std::string> links = LinkSet(t, sync.target);
    std::set<std::pair<std::uint32_t, std::size_t>> delivered;
    for (const TraceEvent& e : t.events) {
      if (!e.frame || !links.contains(e.location)) continue;
      const Segment& s = e.frame->segment;
      if (s.payload.empty() || FiveTupleOf(s) != sync.tuple) continue;
      if (!delivered.emplace(e.frame->rel_seq, s.length()).second) {
        return Fail("exactly-once",
                    fmt::format("{} delivered twice to {}", Describe(e), sync.target));
      }
    }
  }
  return Pass("exactly-once");
}

CheckResult CheckPhaseOrder(const Trace& t) {
  std::map<std::string, Phase> last;
  for (const TraceEvent& e : t.events) {
    if (e.kind != EventKind::kDecision || !e.HasField("conn") || !e.HasField("phase")) {
      continue;
    }
    std::optional<Phase> p = orchestrator::ParsePhase(e.Field("phase"));
    if (!p) return Fail("phase-order", "unknown phase '" + e.Field("phase") + "'");
    auto [it, fresh] = last.emplace(e.Field("conn"), *p);
    if (fresh || it->second == *p) continue;
    if (!orchestrator::CanTransition(it->second, *p)) {
      return Fail("phase-order",
                  fmt::format("conn {} went {} -> {} at {}", e.Field("conn"),
                              orchestrator::PhaseName(it->second),
                              orchestrator::PhaseName(*p), FormatMillis(e.time)));
    }
    it->second = *p;
  }
  return Pass("phase-order");
}

// Frames of one connection (either direction) on a set of links.
std::vector<const TraceEvent*> ConnFrames(const Trace& t, const std::set<std::string>& links,
                                          const FiveTuple& tuple) {
  std::vector<const TraceEvent*> out;
  for (const TraceEvent& e : t.events) {
    if (!e.frame || !links.contains(e.location)) continue;
    FiveTuple ft = FiveTupleOf(e.frame->segment);
    if (ft == tuple || ft == tuple.Reversed()) out.push_back(&e);
  }
  return out;
}

bool Is(const TraceEvent* e, std::uint8_t flags, std::uint32_t seq, std::uint32_t ack,
        std::size_t len) {
  return e->frame->segment.flags.bits() == flags && e->frame->rel_seq == seq &&
         e->frame->rel_ack == ack && e->frame->segment.length() == len;
}

void HandoverChecks(const Trace& t, Verdict& v) {
  std::vector<Sync> syncs = Synchronised(t);
  if (syncs.empty()) {
    v.checks.push_back(Fail("handover", "no connection was synchronised"));
    return;
  }
  const Sync& sync = syncs.front();
  const FiveTuple& tuple = sync.tuple;

  std::string attacker;
  for (const TraceNode& n : t.nodes) {
    if (n.kind == "attacker" && n.ip == tuple.src_ip) attacker = n.name;
  }
  std::vector<const TraceEvent*> up = ConnFrames(t, LinkSet(t, attacker), tuple);
  auto from_attacker = [&](const TraceEvent* e) {
    return FiveTupleOf(e->frame->segment) == tuple;
  };

  // Handshake.
  {
    std::vector<const TraceEvent*> hs;
    for (const TraceEvent* e : up) {
      if (hs.size() < 3) hs.push_back(e);
    }
    if (hs.size() == 3 && from_attacker(hs[0]) && Is(hs[0], kSyn, 0, 0, 0) &&
        !from_attacker(hs[1]) && Is(hs[1], kSyn | kAck, 0, 1, 0) &&
        from_attacker(hs[2]) && Is(hs[2], kAck, 1, 1, 0)) {
      v.checks.push_back(Pass("handshake"));
    } else {
      std::string seen;
      for (const TraceEvent* e : hs) seen += "\n  " + Describe(*e);
      v.checks.push_back(Fail("handshake", "unexpected opening:" + seen));
    }
  }

  const TraceEvent* first = nullptr;
  for (const TraceEvent* e : up) {
    if (from_attacker(e) && !e->frame->segment.payload.empty()) {
      first = e;
      break;
    }
  }
  if (first != nullptr && Is(first, kPsh | kAck, 1, 1, 43)) {
    v.checks.push_back(Pass("first-payload"));
  } else {
    v.checks.push_back(Fail("first-payload", first ? Describe(*first) : "no payload"));
  }

  {
    const TraceEvent* next = nullptr;
    for (const TraceEvent* e : up) {
      if (!from_attacker(e) && e->time > sync.time) {
        next = e;
        break;
      }
    }
    if (next != nullptr && next->frame->segment.flags.Has(kAck) &&
        next->frame->rel_ack == 44) {
      v.checks.push_back(Pass("migrated-ack"));
    } else {
      v.checks.push_back(Fail("migrated-ack", next ? Describe(*next)
                                                   : "nothing reached the attacker"));
    }
  }

  {
    int before = 0;
    const TraceEvent* after = nullptr;
    for (const TraceEvent* e : up) {
      if (first == nullptr || e == first || !from_attacker(e)) continue;
      const Segment& s = e->frame->segment;
      if (!s.flags.Has(kPsh) || e->frame->rel_seq != first->frame->rel_seq) continue;
      if (e->time < sync.time) {
        ++before;
      } else if (after == nullptr) {
        after = e;
      }
    }
    if (before >= 1 && after == nullptr) {
      v.checks.push_back(Pass("retransmissions"));
    } else if (after != nullptr) {
      v.checks.push_back(Fail("retransmissions", "after migration: " + Describe(*after)));
    } else {
      v.checks.push_back(Fail("retransmissions", "none before migration"));
    }
  }

  std::vector<const TraceEvent*> down = ConnFrames(t, LinkSet(t, sync.target), tuple);
  {
    bool ok = down.size() >= 4 && from_attacker(down[0]) && Is(down[0], kSyn, 0, 0, 0) &&
              !from_attacker(down[1]) && Is(down[1], kSyn | kAck, 0, 1, 0) &&
              from_attacker(down[2]) && Is(down[2], kAck, 1, 1, 0) &&
              from_attacker(down[3]) && Is(down[3], kPsh | kAck, 1, 1, 43);
    if (ok) {
      v.checks.push_back(Pass("backend-replay"));
    } else {
      std::string seen;
      for (std::size_t i = 0; i < down.size() && i < 4; ++i) {
        seen += "\n  " + Describe(*down[i]);
      }
      v.checks.push_back(Fail("backend-replay", "unexpected backend opening:" + seen));
    }
  }
  {
    int n = 0;
    bool at_one = true;
    for (const TraceEvent* e : down) {
      if (!from_attacker(e) || e->frame->segment.payload.empty()) continue;
      ++n;
      at_one = at_one && (n > 1 || e->frame->rel_seq == 1);
    }
    if (n == 1 && at_one) {
      v.checks.push_back(Pass("backend-once"));
    } else {
      v.checks.push_back(
          Fail("backend-once", fmt::format("{} payload frames reached the backend", n)));
    }
  }

  {
    const TraceEvent* term = nullptr;
    for (const TraceEvent& e : t.events) {
      if (e.kind == EventKind::kConnTerminated && e.Field("conn") == sync.conn) {
        term = &e;
        break;
      }
    }
    if (term == nullptr) {
      v.checks.push_back(Fail("old-terminated", "no termination event"));
    } else if (t.Meta("mechanism") == "m2") {
      std::string frontend = term->Field("frontend");
      bool rst = false;
      for (const TraceEvent* e : ConnFrames(t, LinkSet(t, frontend), tuple)) {
        rst = rst || (from_attacker(e) && e->frame->segment.flags.Has(kRst));
      }
      if (term->Field("rst") == "yes" && rst) {
        v.checks.push_back(Pass("old-terminated"));
      } else {
        v.checks.push_back(
            Fail("old-terminated", "no RST reached frontend '" + frontend + "'"));
      }
    } else {
      v.checks.push_back(Pass("old-terminated"));
    }
  }
}

}  // namespace

bool Verdict::ok() const { return first_failure() == nullptr; }

const CheckResult* Verdict::first_failure() const {
  for (const CheckResult& c : checks) {
    if (!c.ok) return &c;
  }
  return nullptr;
}

std::string Verdict::Format() const {
  std::string out;
  for (const CheckResult& c : checks) {
    out += c.ok ? "PASS " + c.name : "FAIL " + c.name + ": " + c.detail;
    out += '\n';
  }
  return out;
}

Verdict ValidateTrace(const Trace& trace) {
  Verdict v;
  v.checks.push_back(CheckMonotonic(trace));
  v.checks.push_back(CheckStealth(trace));
  v.checks.push_back(CheckAckBounds(trace));
  v.checks.push_back(CheckExactlyOnce(trace));
  v.checks.push_back(CheckPhaseOrder(trace));
  return v;
}

Verdict ValidateHandover(const Trace& trace) {
  Verdict v = ValidateTrace(trace);
  HandoverChecks(trace, v);
  return v;
}

}  // namespace honeydoc::harness
