#include "honeydoc/harness/report.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "honeydoc/core/five_tuple.h"

namespace honeydoc::harness {
namespace {

std::set<std::string> LinksOfKind(const Trace& trace, std::string_view kind) {
  std::set<std::string> out;
  for (const TraceNode& n : trace.nodes) {
    if (n.kind != kind) continue;
    for (std::string& l : trace.LinksOf(n.name)) out.insert(std::move(l));
  }
  return out;
}

std::string DecoyOn(const Trace& trace, const std::string& link) {
  for (const TraceLink& l : trace.links) {
    if (l.name != link) continue;
    for (const TraceNode& n : trace.nodes) {
      if (n.kind == "decoy" && l.Touches(n.name)) return n.name;
    }
  }
  return {};
}

}  // namespace

std::vector<FirstPush> FirstPushes(const Trace& trace) {
  std::set<std::string> attacker_links = LinksOfKind(trace, "attacker");
  std::set<std::string> decoy_links = LinksOfKind(trace, "decoy");
  std::set<IpAddr> attacker_ips;
  for (const TraceNode& n : trace.nodes) {
    if (n.kind == "attacker" && n.ip) attacker_ips.insert(*n.ip);
  }
  std::vector<FirstPush> out;
  std::map<FiveTuple, std::size_t> index;
  for (const TraceEvent& e : trace.events) {
    if (!e.frame || !e.frame->segment.is_tcp()) continue;
    const Segment& s = e.frame->segment;
    FiveTuple t = FiveTupleOf(s);
    if (attacker_links.contains(e.location) && attacker_ips.contains(s.src_ip) &&
        s.flags.Has(kSyn) && !s.flags.Has(kAck) && !index.contains(t)) {
      index.emplace(t, out.size());
      FirstPush p;
      p.conn_id = out.size() + 1;
      p.tuple = t;
      p.syn_time = e.time;
      out.push_back(std::move(p));
      continue;
    }
    if (s.payload.empty() || !decoy_links.contains(e.location)) continue;
    auto it = index.find(t);
    if (it == index.end() || out[it->second].push_time) continue;
    out[it->second].push_time = e.time;
    out[it->second].decoy = DecoyOn(trace, e.location);
  }
  return out;
}

double NearestRank(std::vector<double> values, double pct) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  auto rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * values.size()));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

LatencyStats Summarize(const std::vector<FirstPush>& pushes) {
  std::vector<double> ms;
  for (const FirstPush& p : pushes) {
    if (auto l = p.latency()) ms.push_back(static_cast<double>(l->count()) / 1000.0);
  }
  LatencyStats s;
  s.count = ms.size();
  if (ms.empty()) return s;
  s.mean_ms = std::accumulate(ms.begin(), ms.end(), 0.0) / static_cast<double>(ms.size());
  s.p50_ms = NearestRank(ms, 50);
  s.p95_ms = NearestRank(ms, 95);
  return s;
}

std::string LatencyCsv(const std::vector<LatencyRow>& rows) {
  std::string out = "mechanism,conn_id,latency_ms\n";
  for (const LatencyRow& r : rows) {
    out += fmt::format("{},{},{}\n", r.mechanism, r.conn_id, FormatMillis(r.latency));
  }
  return out;
}

std::string HistogramCsv(const std::vector<HistogramRow>& rows) {
  std::string out = "mechanism,bin_start_ms,packets\n";
  for (const HistogramRow& r : rows) {
    out += fmt::format("{},{},{}\n", r.mechanism, r.bin_start_ms, r.packets);
  }
  return out;
}

std::map<std::uint16_t, std::uint64_t> DecoyPortHits(const Trace& trace) {
  std::set<std::string> decoy_links = LinksOfKind(trace, "decoy");
  std::set<IpAddr> decoy_ips;
  for (const TraceNode& n : trace.nodes) {
    if (n.kind == "decoy" && n.ip) decoy_ips.insert(*n.ip);
  }
  std::set<FiveTuple> counted;
  std::map<std::uint16_t, std::uint64_t> hits;
  for (const TraceEvent& e : trace.events) {
    if (!e.frame || !decoy_links.contains(e.location)) continue;
    const Segment& s = e.frame->segment;
    if (!decoy_ips.contains(s.dst_ip) || decoy_ips.contains(s.src_ip)) continue;
    if (counted.insert(FiveTupleOf(s)).second) ++hits[s.dst_port];
  }
  return hits;
}

SimTime ControllerPathOverhead(SimTime channel_latency, SimTime processing) {
  return 3 * (2 * channel_latency + processing);
}

}  // namespace honeydoc::harness
