#ifndef HONEYDOC_DECOY_ACTIVITY_LOG_H_
#define HONEYDOC_DECOY_ACTIVITY_LOG_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "honeydoc/core/addr.h"
#include "honeydoc/core/bytes.h"
#include "honeydoc/core/time.h"

namespace honeydoc::decoy {

struct ActivityLogEntry {
  SimTime time{0};
  std::string decoy;
  IpAddr remote_ip;
  std::uint16_t remote_port = 0;
  std::string tag;
  Bytes message;
  std::size_t bytes = 0;
  std::string stage;
  bool operator==(const ActivityLogEntry&) const = default;
};

class ActivityLog {
 public:
  void Append(ActivityLogEntry entry) { entries_.push_back(std::move(entry)); }
  const std::vector<ActivityLogEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<ActivityLogEntry> entries_;
};

// Amun-style line, simulated time 0 mapped to 1970-01-01 00:00:00,000:
//   1970-01-01 00:00:04,947 INFO [vuln_ftp] Attacker: 10.1.0.2
//   Message: ['USER anonymous\r\n'] Bytes: 16 Stage: FTPD_STAGE1
std::string FormatLogLine(const ActivityLogEntry& entry);
std::string ExportLogs(const ActivityLog& log);

// Inverse of ExportLogs for the fields a line carries (time, tag, remote ip,
// message, byte count, stage). Throws ParseError with the line number.
std::vector<ActivityLogEntry> ParseLogs(std::string_view text);

}  // namespace honeydoc::decoy

#endif  // HONEYDOC_DECOY_ACTIVITY_LOG_H_
