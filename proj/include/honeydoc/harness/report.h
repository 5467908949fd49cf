#ifndef HONEYDOC_HARNESS_REPORT_H_
#define HONEYDOC_HARNESS_REPORT_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "honeydoc/core/five_tuple.h"
#include "honeydoc/core/trace.h"

namespace honeydoc::harness {

// One attacker connection: from its first SYN on the attacker link to the
// first payload-bearing segment of that connection delivered on a decoy link.
struct FirstPush {
  std::size_t conn_id = 0;  // 1-based, in order of first SYN
  FiveTuple tuple;
  SimTime syn_time{0};
  std::optional<SimTime> push_time;
  std::string decoy;

  std::optional<SimTime> latency() const {
    if (!push_time) return std::nullopt;
    return *push_time - syn_time;
  }
};

std::vector<FirstPush> FirstPushes(const Trace& trace);

struct LatencyStats {
  std::size_t count = 0;
  double mean_ms = 0;
  double p50_ms = 0;  // nearest rank
  double p95_ms = 0;
};

// Over the connections that delivered a payload.
LatencyStats Summarize(const std::vector<FirstPush>& pushes);
double NearestRank(std::vector<double> values, double pct);

struct LatencyRow {
  std::string mechanism;
  std::size_t conn_id = 0;
  SimTime latency{0};
};

struct HistogramRow {
  std::string mechanism;
  std::int64_t bin_start_ms = 0;
  std::uint64_t packets = 0;
};

// Everything here is recomputable from the traces the experiment wrote.
struct ExperimentReport {
  std::vector<LatencyRow> latencies;
  std::map<std::string, LatencyStats> summary;  // by mechanism
  std::vector<HistogramRow> histogram;
  std::map<std::uint16_t, std::uint64_t> port_hits;
  std::vector<std::string> flow_dumps;
};

// "mechanism,conn_id,latency_ms" with a header row.
std::string LatencyCsv(const std::vector<LatencyRow>& rows);
// "mechanism,bin_start_ms,packets" with a header row.
std::string HistogramCsv(const std::vector<HistogramRow>& rows);

// Distinct connections (by tuple) that put at least one frame on a decoy
// link, counted per destination port. UDP flows count once per tuple.
std::map<std::uint16_t, std::uint64_t> DecoyPortHits(const Trace& trace);

// Extra first-push delay the controller path adds to a connection that ends
// on a replayed backend: three controller round trips (SYN, first payload,
// backend SYN/ACK), each one channel latency up, processing, one down.
SimTime ControllerPathOverhead(SimTime channel_latency, SimTime processing);

}  // namespace honeydoc::harness

#endif  // HONEYDOC_HARNESS_REPORT_H_
