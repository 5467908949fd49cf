#include "honeydoc/decoy/activity_log.h"

#include <charconv>
#include <chrono>
#include <regex>

#include <fmt/format.h>

#include "honeydoc/core/error.h"

namespace honeydoc::decoy {
namespace {

namespace chr = std::chrono;

const std::regex& LineRegex() {
  static const auto* re = new std::regex(
      R"(^(\d{4})-(\d{2})-(\d{2}) (\d{2}):(\d{2}):(\d{2}),(\d{3}) INFO \[([^\]]*)\] )"
      R"(Attacker: (\S+) Message: \['(.*)'\] Bytes: (\d+) Stage: (.*)$)");
  return *re;
}

}  // namespace

std::string FormatLogLine(const ActivityLogEntry& entry) {
  auto ms = chr::duration_cast<chr::milliseconds>(entry.time);
  chr::sys_days day = chr::floor<chr::days>(chr::sys_time<chr::milliseconds>(ms));
  chr::year_month_day ymd(day);
  chr::hh_mm_ss<chr::milliseconds> tod(ms - day.time_since_epoch());
  return fmt::format(
      "{:04}-{:02}-{:02} {:02}:{:02}:{:02},{:03} INFO [{}] Attacker: {} "
      "Message: ['{}'] Bytes: {} Stage: {}",
      static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
      static_cast<unsigned>(ymd.day()), tod.hours().count(),
      tod.minutes().count(), tod.seconds().count(), tod.subseconds().count(),
      entry.tag, entry.remote_ip.ToString(), EscapeBytes(entry.message),
      entry.bytes, entry.stage);
}

std::string ExportLogs(const ActivityLog& log) {
  std::string out;
  for (const ActivityLogEntry& e : log.entries()) out += FormatLogLine(e) + "\n";
  return out;
}

std::vector<ActivityLogEntry> ParseLogs(std::string_view text) {
  std::vector<ActivityLogEntry> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string line(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    std::smatch m;
    if (!std::regex_match(line, m, LineRegex())) {
      throw ParseError("not an activity log line", line_no, 0);
    }
    auto num = [&](int i) { return std::stoi(m[i].str()); };
    chr::year_month_day ymd{chr::year(num(1)), chr::month(num(2)),
                            chr::day(num(3))};
    if (!ymd.ok()) throw ParseError("bad date", line_no, 0);
    auto t = chr::sys_days(ymd).time_since_epoch() + chr::hours(num(4)) +
             chr::minutes(num(5)) + chr::seconds(num(6)) +
             chr::milliseconds(num(7));
    ActivityLogEntry e;
    e.time = chr::duration_cast<SimTime>(t);
    e.tag = m[8].str();
    try {
      e.remote_ip = IpAddr::Parse(m[9].str());
      e.message = UnescapeBytes(m[10].str());
    } catch (const ParseError& err) {
      throw ParseError(err.detail(), line_no, err.offset());
    }
    e.bytes = std::stoul(m[11].str());
    e.stage = m[12].str();
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace honeydoc::decoy
