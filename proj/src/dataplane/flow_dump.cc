#include "honeydoc/dataplane/flow_dump.h"

#include <fmt/format.h>

#include <variant>

namespace honeydoc::dataplane {
namespace {

std::string FormatAction(const FlowAction& action) {
  if (std::holds_alternative<Drop>(action)) return "drop";
  if (const auto* o = std::get_if<Output>(&action)) {
    return fmt::format("output:{}", o->port);
  }
  if (std::holds_alternative<ToController>(action)) return "CONTROLLER:65535";
  if (const auto* s = std::get_if<SetTcpSeqDiff>(&action)) {
    return fmt::format("set_tcp_seq_diff:{}", s->delta);
  }
  if (const auto* a = std::get_if<SetTcpAckDiff>(&action)) {
    return fmt::format("set_tcp_ack_diff:{}", a->delta);
  }
  if (const auto* d = std::get_if<RewriteDst>(&action)) {
    return fmt::format("mod_nw_dst:{},mod_dl_dst:{}", d->ip.ToString(),
                       d->mac.ToString());
  }
  const auto& s = std::get<RewriteSrc>(action);
  return fmt::format("mod_nw_src:{},mod_dl_src:{}", s.ip.ToString(),
                     s.mac.ToString());
}

}  // namespace

std::string FormatMatch(int priority, const MatchFields& match) {
  std::string out = fmt::format("priority={}", priority);
  if (match.proto) out += fmt::format(",{}", ProtoName(*match.proto));
  if (match.in_port) out += fmt::format(",in_port={}", *match.in_port);
  if (match.src_ip) out += ",nw_src=" + match.src_ip->ToString();
  if (match.dst_ip) out += ",nw_dst=" + match.dst_ip->ToString();
  if (match.src_port) out += fmt::format(",tp_src={}", *match.src_port);
  if (match.dst_port) out += fmt::format(",tp_dst={}", *match.dst_port);
  return out;
}

std::string FormatActions(const std::vector<FlowAction>& actions) {
  std::string out;
  for (const FlowAction& a : actions) {
    if (!out.empty()) out += ',';
    out += FormatAction(a);
  }
  return out;
}

std::string FormatEntry(const FlowEntry& entry, SimTime now) {
  SimTime age = now - entry.install_time;
  return fmt::format(
      "cookie={:#x}, duration={}.{:03}s, table=0, n_packets={}, n_bytes={}, "
      "{} actions={}",
      entry.cookie, age.count() / 1000000, (age.count() / 1000) % 1000,
      entry.n_packets, entry.n_bytes, FormatMatch(entry.priority, entry.match),
      FormatActions(entry.actions));
}

std::string DumpFlows(const SwitchNode& sw, SimTime now) {
  std::string out;
  for (const FlowEntry& e : sw.table()) out += FormatEntry(e, now) + "\n";
  return out;
}

std::string NormalizedDump(const SwitchNode& sw) {
  std::string out;
  for (const FlowEntry& e : sw.table()) {
    out += fmt::format(
        "cookie={:#x}, table=0, n_packets={}, n_bytes={}, {} actions={}\n",
        e.cookie, e.n_packets, e.n_bytes, FormatMatch(e.priority, e.match),
                       FormatActions(e.actions));
  }
  return out;
}

}  // namespace honeydoc::dataplane
