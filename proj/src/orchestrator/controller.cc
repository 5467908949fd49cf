#include "honeydoc/orchestrator/controller.h"

#include <algorithm>

#include <fmt/format.h>

#include "honeydoc/core/error.h"
#include "honeydoc/rules/classify.h"

namespace honeydoc::orchestrator {
namespace {

using dataplane::FlowAction;
using dataplane::FlowEntry;
using dataplane::MatchFields;
using simnet::ControllerContext;
using simnet::FlowMod;

constexpr std::uint64_t kGenMask = (1ULL << 22) - 1;

std::uint64_t Tag(std::uint64_t id, std::uint64_t gen, std::uint64_t kind) {
  return (id << 24) | ((gen & kGenMask) << 2) | kind;
}

MatchFields TupleMatch(const FiveTuple& t, std::optional<int> in_port) {
  MatchFields m;
  m.in_port = in_port;
  m.proto = t.proto;
  m.src_ip = t.src_ip;
  m.dst_ip = t.dst_ip;
  m.src_port = t.src_port;
  m.dst_port = t.dst_port;
  return m;
}

MatchFields InPort(int port, std::optional<IpAddr> dst_ip = std::nullopt) {
  MatchFields m;
  m.in_port = port;
  m.dst_ip = dst_ip;
  return m;
}

FlowEntry Entry(int priority, MatchFields match, std::vector<FlowAction> actions,
                std::uint64_t cookie) {
  FlowEntry e;
  e.priority = priority;
  e.match = std::move(match);
  e.actions = std::move(actions);
  e.cookie = cookie;
  return e;
}

decoy::DecoyClass ClassOf(rules::RuleAction action) {
  return action == rules::RuleAction::kHih ? decoy::DecoyClass::kHih
                                           : decoy::DecoyClass::kMih;
}

}  // namespace

Controller::Controller(ControllerConfig config,
                       const std::vector<rules::ClassificationRule>& ruleset)
    : config_(std::move(config)), translation_(rules::TranslateRules(ruleset)) {
  if (config_.fcf.empty()) throw ConfigError("controller needs an FCF switch");
  for (const DecoyBinding& d : config_.decoys) {
    if (d.fcf_port <= 0) throw ConfigError("decoy '" + d.name + "' has no FCF port");
    if (FindDecoy(d.name) != &d) throw ConfigError("duplicate decoy '" + d.name + "'");
  }
  if (config_.mechanism != Mechanism::kDirect) {
    for (const rules::ClassificationRule& r : translation_.controller_rules) {
      if (r.action == rules::RuleAction::kDrop) continue;
      decoy::DecoyClass cls = ClassOf(r.action);
      bool present = std::any_of(config_.decoys.begin(), config_.decoys.end(),
                                 [&](const DecoyBinding& d) { return d.cls == cls; });
      if (!present) {
        throw ConfigError(fmt::format(
            "rule {} asks for {} but no decoy of that class exists",
            FormatRule(r), decoy::DecoyClassName(cls)));
      }
    }
  }
  if (config_.direct_target && !FindDecoy(*config_.direct_target)) {
    throw ConfigError("unknown direct target '" + *config_.direct_target + "'");
  }
  if (config_.policy) {
    for (const auto& [dst, name] : config_.policy->redirect_map) {
      if (!FindDecoy(name)) {
        throw ConfigError("outbound redirect to unknown decoy '" + name + "'");
      }
    }
  }
}

const DecoyBinding* Controller::FindDecoy(const std::string& name) const {
  for (const DecoyBinding& d : config_.decoys) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

const DecoyBinding* Controller::DecoyOnPort(int fcf_port) const {
  for (const DecoyBinding& d : config_.decoys) {
    if (d.fcf_port == fcf_port) return &d;
  }
  return nullptr;
}

bool Controller::IsDecoyIp(IpAddr ip) const {
  return std::any_of(config_.decoys.begin(), config_.decoys.end(),
                     [&](const DecoyBinding& d) { return d.ip == ip; });
}

const DecoyBinding* Controller::Pick(decoy::DecoyClass cls, IpAddr ip) {
  std::vector<const DecoyBinding*> candidates;
  for (const DecoyBinding& d : config_.decoys) {
    if (d.cls == cls && d.ip == ip) candidates.push_back(&d);
  }
  if (candidates.empty()) return nullptr;
  std::size_t& next = round_robin_[cls];
  return candidates[next++ % candidates.size()];
}

const DecoyBinding* Controller::PickFrontend(IpAddr ip, std::uint16_t port) {
  std::vector<const DecoyBinding*> candidates;
  for (const DecoyBinding& d : config_.decoys) {
    if (d.cls != decoy::DecoyClass::kHih && d.ip == ip &&
        d.IsOpen(port)) {
      candidates.push_back(&d);
    }
  }
  if (candidates.empty()) return nullptr;
  return candidates[frontend_rr_++ % candidates.size()];
}

ConnectionRecord* Controller::Find(const FiveTuple& key) {
  auto it = conns_.find(key);
  return it == conns_.end() ? nullptr : &it->second;
}

void Controller::RecordDecision(ControllerContext& ctx,
                                const ConnectionRecord& conn, EventFields extra) {
  EventFields fields = {{"conn", std::to_string(conn.id)},
                        {"tuple", conn.key.ToString()},
                        {"mech", std::string(MechanismName(conn.mechanism))},
                        {"phase", std::string(PhaseName(conn.phase))}};
  fields.insert(fields.end(), extra.begin(), extra.end());
  ctx.Record(EventKind::kDecision, std::move(fields));
}

void Controller::Init(ControllerContext& ctx) {
  for (const DecoyBinding& d : config_.decoys) {
    if (!d.spf) continue;
    ctx.SendFlowMods(
        d.spf->sw,
        {FlowMod::Add(Entry(0, InPort(d.spf->fcf_side_port),
                            {dataplane::Output{d.spf->decoy_side_port}}, 0)),
         FlowMod::Add(Entry(0, InPort(d.spf->decoy_side_port),
                            {dataplane::Output{d.spf->fcf_side_port}}, 0))});
  }
  if (config_.mechanism == Mechanism::kDirect) {
    InstallDirect(ctx);
    return;
  }
  std::vector<FlowMod> mods;
  for (const FlowEntry& e : translation_.dataplane_entries) {
    mods.push_back(FlowMod::Add(e));
  }
  if (config_.policy) {
    std::set<int> tapped;
    for (const DecoyBinding& d : config_.decoys) {
      if (!tapped.insert(d.fcf_port).second) continue;
      mods.push_back(FlowMod::Add(Entry(kTapPriority,
                                        InPort(d.fcf_port),
                                        {dataplane::ToController{}}, 0)));
    }
  }
  ctx.SendFlowMods(config_.fcf, std::move(mods));
}

void Controller::InstallDirect(ControllerContext& ctx) {
  const DecoyBinding* target = nullptr;
  if (config_.direct_target) {
    target = FindDecoy(*config_.direct_target);
  } else {
    for (const DecoyBinding& d : config_.decoys) {
      if (d.cls == decoy::DecoyClass::kHih) {
        target = &d;
        break;
      }
    }
    if (target == nullptr && !config_.decoys.empty()) target = &config_.decoys[0];
  }
  if (target == nullptr) return;
  std::vector<FlowMod> mods;
  for (const AttackerBinding& a : config_.attackers) {
    mods.push_back(FlowMod::Add(
        Entry(kConnPriority, InPort(a.fcf_port),
              {dataplane::Output{target->fcf_port}}, 0)));
    mods.push_back(FlowMod::Add(
        Entry(kConnPriority,
              InPort(target->fcf_port, a.ip),
              {dataplane::Output{a.fcf_port}}, 0)));
  }
  ctx.SendFlowMods(config_.fcf, std::move(mods));
}

void Controller::OnPacketIn(ControllerContext& ctx, const std::string& sw,
                            int in_port, const Segment& seg) {
  if (sw != config_.fcf) return;
  if (const DecoyBinding* from = DecoyOnPort(in_port)) {
    FromDecoy(ctx, *from, seg);
  } else {
    FromAttacker(ctx, in_port, seg);
  }
}

void Controller::FromAttacker(ControllerContext& ctx, int in_port,
                              const Segment& seg) {
  if (config_.mechanism == Mechanism::kDirect) return;
  if (!seg.is_tcp()) {
    OnUdp(ctx, in_port, seg);
    return;
  }
  ConnectionRecord* conn = Find(FiveTupleOf(seg));
  if (conn == nullptr) {
    if (seg.flags.Has(kSyn) && !seg.flags.Has(kAck)) OnSyn(ctx, in_port, seg);
    return;
  }
  OnAttackerSegment(ctx, *conn, seg);
}

void Controller::OnSyn(ControllerContext& ctx, int in_port, const Segment& seg) {
  if (!IsDecoyIp(seg.dst_ip)) return;
  FiveTuple key = FiveTupleOf(seg);
  ConnectionRecord rec;
  rec.key = key;
  rec.mechanism = config_.mechanism;
  rec.attacker_port = in_port;
  rec.attacker_mac = seg.src_mac;
  rec.advertised_mac = seg.dst_mac;
  rec.attacker_isn = seg.seq;

  const DecoyBinding* frontend = nullptr;
  if (config_.mechanism == Mechanism::kM1) {
    bool open = std::any_of(config_.decoys.begin(), config_.decoys.end(),
                            [&](const DecoyBinding& d) {
                              return d.ip == seg.dst_ip &&
                                     d.IsOpen(seg.dst_port);
                            });
    if (!open) {
      ctx.Record(EventKind::kDecision,
                 {{"tuple", key.ToString()}, {"event", "closed-port"}});
      return;
    }
  } else {
    frontend = PickFrontend(seg.dst_ip, seg.dst_port);
    if (frontend == nullptr) {
      ctx.Record(EventKind::kDecision,
                 {{"tuple", key.ToString()}, {"event", "closed-port"}});
      return;
    }
    rec.frontend = frontend->name;
  }

  rec.id = next_id_++;
  by_id_[rec.id] = key;
  ConnectionRecord& conn = conns_[key] = std::move(rec);

  if (config_.mechanism == Mechanism::kM1) {
    conn.frontend_isn = config_.fixed_isn ? *config_.fixed_isn : ctx.NextIsn();
    Segment synack;
    synack.src_mac = seg.dst_mac;
    synack.dst_mac = seg.src_mac;
    synack.src_ip = seg.dst_ip;
    synack.dst_ip = seg.src_ip;
    synack.src_port = seg.dst_port;
    synack.dst_port = seg.src_port;
    synack.flags = TcpFlags(kSyn | kAck);
    synack.seq = *conn.frontend_isn;
    synack.ack = seg.seq + 1;
    ctx.PacketOut(config_.fcf, in_port, synack);
    RecordDecision(ctx, conn, {{"event", "syn"}, {"frontend", "controller"}});
    return;
  }
  ctx.SendFlowMods(config_.fcf,
                   {FlowMod::Add(Entry(kConnPriority,
                                       TupleMatch(key.Reversed(), frontend->fcf_port),
                                       {dataplane::ToController{}}, conn.id))});
  ctx.PacketOut(config_.fcf, frontend->fcf_port, seg);
  RecordDecision(ctx, conn, {{"event", "syn"}, {"frontend", frontend->name}});
}

void Controller::OnAttackerSegment(ControllerContext& ctx, ConnectionRecord& conn,
                                   const Segment& seg) {
  if (conn.phase == Phase::kTerminated) return;
  const DecoyBinding* frontend = conn.frontend ? FindDecoy(*conn.frontend) : nullptr;
  bool pinned = conn.decision && conn.phase == Phase::kP1Established &&
                conn.decision->decoy == conn.frontend.value_or("");

  if (seg.flags.Has(kRst)) {
    if (conn.phase == Phase::kP3Synchronized) {
      ForwardToBackend(ctx, conn, seg);
      return;
    }
    if (frontend != nullptr) ctx.PacketOut(config_.fcf, frontend->fcf_port, seg);
    conn.torn_down = true;
    Terminate(ctx, conn, "attacker-reset");
    return;
  }

  if (seg.flags.Has(kSyn)) {
    if (conn.phase != Phase::kP1Established) return;
    if (config_.mechanism == Mechanism::kM1) {
      Segment synack;
      synack.src_mac = conn.advertised_mac;
      synack.dst_mac = conn.attacker_mac;
      synack.src_ip = conn.key.dst_ip;
      synack.dst_ip = conn.key.src_ip;
      synack.src_port = conn.key.dst_port;
      synack.dst_port = conn.key.src_port;
      synack.flags = TcpFlags(kSyn | kAck);
      synack.seq = *conn.frontend_isn;
      synack.ack = conn.attacker_isn + 1;
      ctx.PacketOut(config_.fcf, conn.attacker_port, synack);
    } else if (frontend != nullptr && !conn.frontend_isn) {
      ctx.PacketOut(config_.fcf, frontend->fcf_port, seg);
    }
    return;
  }

  if (conn.phase == Phase::kP3Synchronized) {
    ForwardToBackend(ctx, conn, seg);
    return;
  }
  bool awaiting = conn.stored_payload.has_value() ||
                  conn.phase == Phase::kP2Migrating;

  if (seg.payload.empty()) {
    if (awaiting) {
      if (seg.flags.Has(kFin)) conn.pending.push_back(seg);
      return;
    }
    if (frontend != nullptr) ctx.PacketOut(config_.fcf, frontend->fcf_port, seg);
    return;
  }

  if (pinned) {
    ctx.PacketOut(config_.fcf, frontend->fcf_port, seg);
    return;
  }
  if (!awaiting && !conn.decision) {
    ++classify_counts_[conn.key];
    conn.stored_payload = seg;
    if (config_.alert_delay > SimTime(0)) {
      ctx.StartTimer(config_.alert_delay,
                     Tag(conn.id, conn.timer_generation, kAlertTimer));
    } else {
      Decide(ctx, conn);
    }
    return;
  }
  auto same = [&](const Segment& s) {
    return s.seq == seg.seq && s.payload == seg.payload;
  };
  if ((conn.stored_payload && same(*conn.stored_payload)) ||
      std::any_of(conn.pending.begin(), conn.pending.end(), same)) {
    ++absorbed_;
    return;
  }
  conn.pending.push_back(seg);
}

void Controller::Decide(ControllerContext& ctx, ConnectionRecord& conn) {
  if (conn.decision || !conn.stored_payload) return;
  std::optional<rules::Alert> alert =
      rules::Classify(*conn.stored_payload, translation_.controller_rules);
  ctx.Record(EventKind::kAlert,
             {{"conn", std::to_string(conn.id)},
              {"tuple", conn.key.ToString()},
              {"action", alert ? std::string(rules::RuleActionName(alert->action))
                               : "NOMATCH"},
              {"sid", alert ? std::to_string(alert->sid) : "-"},
              {"priority",
               alert ? std::to_string(alert->matched_rule_priority) : "-"}});

  if (!alert || alert->action == rules::RuleAction::kDrop) {
    conn.decision = Decision{DecisionKind::kDrop, ""};
    Terminate(ctx, conn, alert ? "drop" : "no-match");
    return;
  }
  decoy::DecoyClass cls = ClassOf(alert->action);
  const DecoyBinding* frontend = conn.frontend ? FindDecoy(*conn.frontend) : nullptr;
  if (frontend != nullptr && cls == decoy::DecoyClass::kMih &&
      frontend->cls == decoy::DecoyClass::kMih) {
    conn.decision = Decision{DecisionKind::kForwardTo, frontend->name};
    Pin(ctx, conn);
    return;
  }
  const DecoyBinding* target = Pick(cls, conn.key.dst_ip);
  if (target == nullptr) {
    conn.decision = Decision{DecisionKind::kDrop, ""};
    Terminate(ctx, conn, "no-target");
    return;
  }
  conn.decision = Decision{
      cls == decoy::DecoyClass::kHih ? DecisionKind::kRedirectTo
                                     : DecisionKind::kForwardTo,
      target->name};
  StartReplay(ctx, conn, *target);
}

void Controller::Pin(ControllerContext& ctx, ConnectionRecord& conn) {
  const DecoyBinding& frontend = *FindDecoy(*conn.frontend);
  conn.target = frontend.name;
  ctx.SendFlowMods(
      config_.fcf,
      {FlowMod::Delete(conn.id),
       FlowMod::Add(Entry(kConnPriority, TupleMatch(conn.key, conn.attacker_port),
                          {dataplane::Output{frontend.fcf_port}}, conn.id)),
       FlowMod::Add(Entry(kConnPriority,
                          TupleMatch(conn.key.Reversed(), frontend.fcf_port),
                          {dataplane::Output{conn.attacker_port}}, conn.id))});
  ctx.PacketOut(config_.fcf, frontend.fcf_port, *conn.stored_payload);
  for (const Segment& s : conn.pending) ctx.PacketOut(config_.fcf, frontend.fcf_port, s);
  conn.stored_payload.reset();
  conn.pending.clear();
  RecordDecision(ctx, conn,
                 {{"event", "decision"},
                  {"decision", "forward"},
                  {"target", frontend.name}});
}

void Controller::StartReplay(ControllerContext& ctx, ConnectionRecord& conn,
                             const DecoyBinding& target) {
  conn.target = target.name;
  RecordDecision(ctx, conn,
                 {{"event", "decision"},
                  {"decision", std::string(DecisionKindName(conn.decision->kind))},
                  {"target", target.name}});
  if (!target.spf) {
    Terminate(ctx, conn, "no-spf-for-" + target.name);
    return;
  }
  AdvancePhase(conn, Phase::kP2Migrating);
  std::vector<FlowMod> mods = {
      FlowMod::Delete(conn.id),
      FlowMod::Add(Entry(kConnPriority, TupleMatch(conn.key.Reversed(), target.fcf_port),
                         {dataplane::ToController{}}, conn.id)),
      FlowMod::Add(Entry(kConnPriority, TupleMatch(conn.key, conn.attacker_port),
                         {dataplane::ToController{}}, conn.id))};
  if (const DecoyBinding* frontend = conn.frontend ? FindDecoy(*conn.frontend) : nullptr) {
    mods.push_back(FlowMod::Add(Entry(kConnPriority,
                                      TupleMatch(conn.key.Reversed(), frontend->fcf_port),
                                      {dataplane::Drop{}}, conn.id)));
  }
  ctx.SendFlowMods(config_.fcf, std::move(mods));

  Segment syn;
  syn.src_mac = conn.attacker_mac;
  syn.dst_mac = target.mac;
  syn.src_ip = conn.key.src_ip;
  syn.dst_ip = conn.key.dst_ip;
  syn.src_port = conn.key.src_port;
  syn.dst_port = conn.key.dst_port;
  syn.flags = kSyn;
  syn.seq = conn.attacker_isn;
  ctx.PacketOut(config_.fcf, target.fcf_port, syn);
  ++conn.timer_generation;
  ctx.StartTimer(config_.handshake_timeout,
                 Tag(conn.id, conn.timer_generation, kHandshakeTimer));
  RecordDecision(ctx, conn, {{"event", "replay"}, {"target", target.name}});
}

void Controller::FromDecoy(ControllerContext& ctx, const DecoyBinding& from,
                           const Segment& seg) {
  if (seg.is_tcp()) {
    if (ConnectionRecord* conn = Find(FiveTupleOf(seg).Reversed())) {
      if (conn->phase == Phase::kP1Established && conn->frontend == from.name &&
          !conn->frontend_isn && seg.flags.Has(kSyn) && seg.flags.Has(kAck)) {
        OnFrontendSynAck(ctx, *conn, from, seg);
      } else if (conn->phase == Phase::kP2Migrating && conn->target == from.name &&
                 !conn->backend_isn) {
        if (seg.flags.Has(kSyn) && seg.flags.Has(kAck) &&
            seg.ack == conn->attacker_isn + 1) {
          OnBackendSynAck(ctx, *conn, from, seg);
        } else if (seg.flags.Has(kRst)) {
          Terminate(ctx, *conn, "backend-reset");
        }
      }
      return;
    }
  }
  if (!config_.policy || IsDecoyIp(seg.dst_ip)) return;
  if (seg.is_tcp() && !(seg.flags.Has(kSyn) && !seg.flags.Has(kAck))) return;
  OutboundControl(ctx, from, seg);
}

void Controller::OnFrontendSynAck(ControllerContext& ctx, ConnectionRecord& conn,
                                  const DecoyBinding& frontend, const Segment& seg) {
  conn.frontend_isn = seg.seq;
  ctx.SendFlowMods(
      config_.fcf,
      {FlowMod::Delete(conn.id),
       FlowMod::Add(Entry(kConnPriority,
                          TupleMatch(conn.key.Reversed(), frontend.fcf_port),
                          {dataplane::Output{conn.attacker_port}}, conn.id))});
  ctx.PacketOut(config_.fcf, conn.attacker_port, seg);
  RecordDecision(ctx, conn, {{"event", "frontend-synack"}, {"frontend", frontend.name}});
}

void Controller::OnBackendSynAck(ControllerContext& ctx, ConnectionRecord& conn,
                                 const DecoyBinding& target, const Segment& seg) {
  ++conn.timer_generation;
  conn.backend_isn = seg.seq;
  conn.diffs = ComputeDiffs(*conn.frontend_isn, *conn.backend_isn);
  const SpfBinding& spf = *target.spf;
  ctx.SendFlowMods(
      spf.sw,
      {FlowMod::Delete(conn.id),
       FlowMod::Add(Entry(kConnPriority, TupleMatch(conn.key, spf.fcf_side_port),
                          {dataplane::SetTcpAckDiff{conn.diffs->ack_diff},
                           dataplane::Output{spf.decoy_side_port}},
                          conn.id)),
       FlowMod::Add(Entry(kConnPriority,
                          TupleMatch(conn.key.Reversed(), spf.decoy_side_port),
                          {dataplane::SetTcpSeqDiff{conn.diffs->seq_diff},
                           dataplane::Output{spf.fcf_side_port}},
                          conn.id))});
  std::vector<FlowMod> mods = {
      FlowMod::Delete(conn.id),
      FlowMod::Add(Entry(kConnPriority, TupleMatch(conn.key, conn.attacker_port),
                         {dataplane::Output{target.fcf_port}}, conn.id)),
      FlowMod::Add(Entry(kConnPriority, TupleMatch(conn.key.Reversed(), target.fcf_port),
                         {dataplane::Output{conn.attacker_port}}, conn.id))};
  if (const DecoyBinding* frontend = conn.frontend ? FindDecoy(*conn.frontend) : nullptr) {
    mods.push_back(FlowMod::Add(Entry(kConnPriority,
                                      TupleMatch(conn.key.Reversed(), frontend->fcf_port),
                                      {dataplane::Drop{}}, conn.id)));
  }
  ctx.SendFlowMods(config_.fcf, std::move(mods));

  // Handshake completion in attacker/frontend sequence space; the SPF maps
  // the ACK onto the backend's ISN.
  Segment ack;
  ack.src_mac = conn.attacker_mac;
  ack.dst_mac = target.mac;
  ack.src_ip = conn.key.src_ip;
  ack.dst_ip = conn.key.dst_ip;
  ack.src_port = conn.key.src_port;
  ack.dst_port = conn.key.dst_port;
  ack.flags = kAck;
  ack.seq = conn.attacker_isn + 1;
  ack.ack = *conn.frontend_isn + 1;
  ctx.PacketOut(config_.fcf, target.fcf_port, ack);

  AdvancePhase(conn, Phase::kP3Synchronized);
  Segment stored = *conn.stored_payload;
  std::vector<Segment> pending = std::move(conn.pending);
  conn.stored_payload.reset();
  conn.pending.clear();
  ForwardToBackend(ctx, conn, stored);
  for (const Segment& s : pending) ForwardToBackend(ctx, conn, s);
  CheckInvariants(conn);
  RecordDecision(ctx, conn,
                 {{"event", "synchronized"},
                  {"target", target.name},
                  {"ack_diff", std::to_string(conn.diffs->ack_diff)},
                  {"seq_diff", std::to_string(conn.diffs->seq_diff)}});
  Teardown(ctx, conn);
}

void Controller::ForwardToBackend(ControllerContext& ctx, ConnectionRecord& conn,
                                  const Segment& seg) {
  if (!conn.forwarded.emplace(seg.seq, seg.payload.size(), seg.flags.bits()).second) {
    ++absorbed_;
    return;
  }
  const DecoyBinding& target = *FindDecoy(*conn.target);
  ctx.PacketOut(config_.fcf, target.fcf_port, seg);
}

void Controller::Teardown(ControllerContext& ctx, ConnectionRecord& conn,
                          const std::string& reason) {
  if (conn.torn_down) return;
  conn.torn_down = true;
  const DecoyBinding* frontend = conn.frontend ? FindDecoy(*conn.frontend) : nullptr;
  if (frontend == nullptr) {
    ctx.Record(EventKind::kConnTerminated, {{"conn", std::to_string(conn.id)},
                                            {"tuple", conn.key.ToString()},
                                            {"frontend", "controller"},
                                            {"reason", reason},
                                            {"rst", "no"}});
    return;
  }
  Segment rst;
  rst.src_mac = conn.attacker_mac;
  rst.dst_mac = frontend->mac;
  rst.src_ip = conn.key.src_ip;
  rst.dst_ip = conn.key.dst_ip;
  rst.src_port = conn.key.src_port;
  rst.dst_port = conn.key.dst_port;
  rst.flags = kRst;
  rst.seq = conn.attacker_isn + 1;
  ctx.PacketOut(config_.fcf, frontend->fcf_port, rst);
  ctx.Record(EventKind::kConnTerminated, {{"conn", std::to_string(conn.id)},
                                          {"tuple", conn.key.ToString()},
                                          {"frontend", frontend->name},
                                          {"reason", reason},
                                          {"rst", "yes"}});
}

void Controller::Terminate(ControllerContext& ctx, ConnectionRecord& conn,
                           const std::string& reason) {
  if (conn.phase == Phase::kTerminated) return;
  ++conn.timer_generation;
  AdvancePhase(conn, Phase::kTerminated);
  conn.stored_payload.reset();
  conn.pending.clear();
  ctx.SendFlowMods(config_.fcf,
                   {FlowMod::Delete(conn.id),
                    FlowMod::Add(Entry(kConnPriority,
                                       TupleMatch(conn.key, conn.attacker_port),
                                       {dataplane::Drop{}}, conn.id))});
  RecordDecision(ctx, conn, {{"event", "terminated"}, {"reason", reason}});
  if (conn.frontend && !conn.torn_down) {
    Teardown(ctx, conn, reason);
    return;
  }
  ctx.Record(EventKind::kConnTerminated, {{"conn", std::to_string(conn.id)},
                                          {"tuple", conn.key.ToString()},
                                          {"reason", reason}});
}

void Controller::OnTimer(ControllerContext& ctx, std::uint64_t tag) {
  std::uint64_t id = tag >> 24;
  std::uint64_t gen = (tag >> 2) & kGenMask;
  std::uint64_t kind = tag & 3;
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return;
  ConnectionRecord* conn = Find(it->second);
  if (conn == nullptr || (conn->timer_generation & kGenMask) != gen) return;
  if (kind == kAlertTimer) {
    if (conn->phase == Phase::kP1Established) Decide(ctx, *conn);
  } else if (kind == kHandshakeTimer) {
    if (conn->phase == Phase::kP2Migrating && !conn->backend_isn) {
      Terminate(ctx, *conn, "handshake-timeout");
    }
  }
}

void Controller::OnUdp(ControllerContext& ctx, int in_port, const Segment& seg) {
  if (!IsDecoyIp(seg.dst_ip)) return;
  FiveTuple key = FiveTupleOf(seg);
  auto known = udp_decisions_.find(key);
  if (known != udp_decisions_.end()) {
    if (known->second) {
      ctx.PacketOut(config_.fcf, FindDecoy(*known->second)->fcf_port, seg);
    }
    return;
  }
  ++classify_counts_[key];
  std::optional<rules::Alert> alert =
      rules::Classify(seg, translation_.controller_rules);
  const DecoyBinding* target = nullptr;
  if (alert && alert->action != rules::RuleAction::kDrop) {
    target = Pick(ClassOf(alert->action), seg.dst_ip);
  }
  std::uint64_t cookie = next_id_++;
  if (target == nullptr) {
    udp_decisions_[key] = std::nullopt;
    ctx.SendFlowMods(config_.fcf,
                     {FlowMod::Add(Entry(kConnPriority, TupleMatch(key, in_port),
                                         {dataplane::Drop{}}, cookie))});
    ctx.Record(EventKind::kDecision,
               {{"tuple", key.ToString()}, {"event", "decision"}, {"decision", "drop"}});
    return;
  }
  udp_decisions_[key] = target->name;
  ctx.SendFlowMods(
      config_.fcf,
      {FlowMod::Add(Entry(kConnPriority, TupleMatch(key, in_port),
                          {dataplane::Output{target->fcf_port}}, cookie)),
       FlowMod::Add(Entry(kConnPriority, TupleMatch(key.Reversed(), target->fcf_port),
                          {dataplane::Output{in_port}}, cookie))});
  ctx.PacketOut(config_.fcf, target->fcf_port, seg);
  ctx.Record(EventKind::kDecision, {{"tuple", key.ToString()},
                                    {"event", "decision"},
                                    {"decision", "forward"},
                                    {"target", target->name}});
}

void Controller::OutboundControl(ControllerContext& ctx, const DecoyBinding& from,
                                 const Segment& seg) {
  FiveTuple key = FiveTupleOf(seg);
  if (!outbound_seen_.insert(key).second) return;
  std::uint64_t cookie = next_id_++;
  const OutboundPolicy& policy = *config_.policy;
  EventFields fields = {{"tuple", key.ToString()},
                        {"event", "outbound"},
                        {"from", from.name}};

  auto hit = policy.redirect_map.find({key.dst_ip, key.dst_port});
  if (hit != policy.redirect_map.end()) {
    const DecoyBinding& target = *FindDecoy(hit->second);
    std::vector<FlowAction> fwd;
    std::vector<FlowAction> rev;
    Segment out = seg;
    if (target.ip != key.dst_ip || target.mac != seg.dst_mac) {
      fwd.push_back(dataplane::RewriteDst{target.ip, target.mac});
      rev.push_back(dataplane::RewriteSrc{key.dst_ip, seg.dst_mac});
      out.dst_ip = target.ip;
      out.dst_mac = target.mac;
    }
    fwd.push_back(dataplane::Output{target.fcf_port});
    rev.push_back(dataplane::Output{from.fcf_port});
    FiveTuple back{target.ip, key.dst_port, key.src_ip, key.src_port, key.proto};
    ctx.SendFlowMods(
        config_.fcf,
        {FlowMod::Add(Entry(kConnPriority, TupleMatch(key, from.fcf_port),
                            std::move(fwd), cookie)),
         FlowMod::Add(Entry(kConnPriority, TupleMatch(back, target.fcf_port),
                            std::move(rev), cookie))});
    ctx.PacketOut(config_.fcf, target.fcf_port, out);
    fields.emplace_back("decision", "redirect");
    fields.emplace_back("target", target.name);
    ctx.Record(EventKind::kDecision, std::move(fields));
    return;
  }

  if (policy.default_action == OutboundPolicy::Default::kAllow &&
      !config_.attackers.empty()) {
    int uplink = config_.attackers.front().fcf_port;
    ctx.SendFlowMods(
        config_.fcf,
        {FlowMod::Add(Entry(kConnPriority, TupleMatch(key, from.fcf_port),
                            {dataplane::Output{uplink}}, cookie)),
         FlowMod::Add(Entry(kConnPriority, TupleMatch(key.Reversed(), uplink),
                            {dataplane::Output{from.fcf_port}}, cookie))});
    ctx.PacketOut(config_.fcf, uplink, seg);
    fields.emplace_back("decision", "allow");
    ctx.Record(EventKind::kDecision, std::move(fields));
    return;
  }

  ctx.SendFlowMods(config_.fcf,
                   {FlowMod::Add(Entry(kConnPriority, TupleMatch(key, from.fcf_port),
                                       {dataplane::Drop{}}, cookie))});
  fields.emplace_back("decision", "discard");
  ctx.Record(EventKind::kDecision, std::move(fields));
}

}  // namespace honeydoc::orchestrator
