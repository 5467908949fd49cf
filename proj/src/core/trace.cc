#include "honeydoc/core/trace.h"

#include <array>
#include <charconv>

#include <fmt/format.h>

#include "honeydoc/core/error.h"

namespace honeydoc {
namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 6> kKindNames = {{
    {EventKind::kFrameDelivered, "FrameDelivered"},
    {EventKind::kAlert, "Alert"},
    {EventKind::kDecision, "Decision"},
    {EventKind::kFlowInstalled, "FlowInstalled"},
    {EventKind::kDecoyLog, "DecoyLog"},
    {EventKind::kConnTerminated, "ConnTerminated"},
}};

constexpr std::string_view kHeader = "#honeydoc-trace\t1";

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t tab = line.find('\t', pos);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
}

// Escapes the characters that would break the line/column structure.
std::string EscapeField(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string UnescapeField(std::string_view text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '\\' || i + 1 == text.size()) {
      out.push_back(text[i]);
      continue;
    }
    char e = text[++i];
    switch (e) {
      case 't': out.push_back('\t'); break;
      case 'n': out.push_back('\n'); break;
      case 'r': out.push_back('\r'); break;
      default: out.push_back(e);
    }
  }
  return out;
}

template <typename T>
T ParseNumber(std::string_view text, const char* what) {
  T value{};
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw ParseError(std::string("bad ") + what + " '" + std::string(text) + "'",
                     0, 0);
  }
  return value;
}

std::string FormatEndpoint(IpAddr ip, std::uint16_t port) {
  return fmt::format("{}:{}", ip.ToString(), port);
}

void ParseEndpoint(std::string_view text, IpAddr& ip, std::uint16_t& port) {
  auto colon = text.rfind(':');
  if (colon == std::string_view::npos) {
    throw ParseError("bad endpoint '" + std::string(text) + "'", 0, 0);
  }
  ip = IpAddr::Parse(text.substr(0, colon));
  port = ParseNumber<std::uint16_t>(text.substr(colon + 1), "port");
}

std::pair<std::string, int> ParseNodePort(std::string_view text) {
  auto colon = text.rfind(':');
  if (colon == std::string_view::npos) {
    throw ParseError("bad node:port '" + std::string(text) + "'", 0, 0);
  }
  return {std::string(text.substr(0, colon)),
          ParseNumber<int>(text.substr(colon + 1), "port")};
}

}  // namespace

std::string_view EventKindName(EventKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<EventKind> ParseEventKind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::string TraceEvent::Field(std::string_view key) const {
  for (const auto& [k, v] : fields) {
    if (k == key) return v;
  }
  return {};
}

bool TraceEvent::HasField(std::string_view key) const {
  for (const auto& [k, v] : fields) {
    if (k == key) return true;
  }
  return false;
}

std::string Trace::Meta(std::string_view key) const {
  for (const auto& [k, v] : meta) {
    if (k == key) return v;
  }
  return {};
}

const TraceNode* Trace::FindNode(std::string_view name) const {
  for (const auto& node : nodes) {
    if (node.name == name) return &node;
  }
  return nullptr;
}

std::vector<std::string> Trace::LinksOf(std::string_view node) const {
  std::vector<std::string> out;
  for (const auto& link : links) {
    if (link.Touches(node)) out.push_back(link.name);
  }
  return out;
}

std::string FormatEventLine(const TraceEvent& event) {
  std::string line = fmt::format("{}\t{}\t{}", FormatMillis(event.time),
                                 EventKindName(event.kind),
                                 EscapeField(event.location));
  if (event.kind == EventKind::kFrameDelivered) {
    if (!event.frame) {
      throw ContractViolation("FrameDelivered event without a frame");
    }
    const Segment& s = event.frame->segment;
    line += fmt::format(
        "\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
        FormatEndpoint(s.src_ip, s.src_port),
        FormatEndpoint(s.dst_ip, s.dst_port), s.flags.ToString(),
        event.frame->rel_seq, event.frame->rel_ack, s.payload.size(), s.seq,
        s.ack, s.src_mac.ToString(), s.dst_mac.ToString(), ProtoName(s.proto),
        s.payload.empty() ? std::string("-") : HexEncode(s.payload));
    return line;
  }
  for (const auto& [key, value] : event.fields) {
    line += '\t';
    line += EscapeField(key);
    line += '=';
    line += EscapeField(value);
  }
  return line;
}

TraceEvent ParseEventLine(std::string_view line) {
  auto cols = SplitTabs(line);
  if (cols.size() < 3) throw ParseError("trace line has too few columns", 0, 0);
  TraceEvent event;
  event.time = ParseMillis(cols[0]);
  auto kind = ParseEventKind(cols[1]);
  if (!kind) {
    throw ParseError("unknown event kind '" + std::string(cols[1]) + "'", 0, 0);
  }
  event.kind = *kind;
  event.location = UnescapeField(cols[2]);
  if (event.kind == EventKind::kFrameDelivered) {
    if (cols.size() != 15) {
      throw ParseError("frame line needs 15 columns, got " +
                           std::to_string(cols.size()),
                       0, 0);
    }
    FrameRecord frame;
    Segment& s = frame.segment;
    ParseEndpoint(cols[3], s.src_ip, s.src_port);
    ParseEndpoint(cols[4], s.dst_ip, s.dst_port);
    s.flags = TcpFlags::Parse(cols[5]);
    frame.rel_seq = ParseNumber<std::uint32_t>(cols[6], "relseq");
    frame.rel_ack = ParseNumber<std::uint32_t>(cols[7], "relack");
    auto len = ParseNumber<std::size_t>(cols[8], "len");
    s.seq = ParseNumber<std::uint32_t>(cols[9], "seq");
    s.ack = ParseNumber<std::uint32_t>(cols[10], "ack");
    s.src_mac = MacAddr::Parse(cols[11]);
    s.dst_mac = MacAddr::Parse(cols[12]);
    auto proto = ParseProto(cols[13]);
    if (!proto) throw ParseError("bad protocol column", 0, 0);
    s.proto = *proto;
    if (cols[14] != "-") s.payload = HexDecode(cols[14]);
    if (s.payload.size() != len) {
      throw ParseError("len column disagrees with payload", 0, 0);
    }
    event.frame = std::move(frame);
    return event;
  }
  for (std::size_t i = 3; i < cols.size(); ++i) {
    auto eq = cols[i].find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("field without '=': '" + std::string(cols[i]) + "'", 0,
                       0);
    }
    event.fields.emplace_back(UnescapeField(cols[i].substr(0, eq)),
                              UnescapeField(cols[i].substr(eq + 1)));
  }
  return event;
}

std::string WriteTrace(const Trace& trace) {
  std::string out(kHeader);
  out += '\n';
  for (const auto& [k, v] : trace.meta) {
    out += fmt::format("#meta\t{}\t{}\n", EscapeField(k), EscapeField(v));
  }
  for (const auto& n : trace.nodes) {
    out += fmt::format("#node\t{}\t{}\t{}\t{}\t{}\n", n.name, n.kind, n.role,
                       n.ip ? n.ip->ToString() : "-",
                       n.mac ? n.mac->ToString() : "-");
  }
  for (const auto& l : trace.links) {
    out += fmt::format("#link\t{}\t{}:{}\t{}:{}\t{}\n", l.name, l.a_node,
                       l.a_port, l.b_node, l.b_port, FormatMillis(l.latency));
  }
  for (const auto& e : trace.events) {
    out += FormatEventLine(e);
    out += '\n';
  }
  return out;
}

Trace ReadTrace(std::string_view text) {
  Trace trace;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool saw_header = false;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (line.empty()) continue;
    try {
      if (line.front() == '#') {
        auto cols = SplitTabs(line);
        if (cols[0] == "#honeydoc-trace") {
          saw_header = true;
        } else if (cols[0] == "#meta" && cols.size() == 3) {
          trace.meta.emplace_back(UnescapeField(cols[1]),
                                  UnescapeField(cols[2]));
        } else if (cols[0] == "#node" && cols.size() == 6) {
          TraceNode n{std::string(cols[1]), std::string(cols[2]),
                      std::string(cols[3]), std::nullopt, std::nullopt};
          if (cols[4] != "-") n.ip = IpAddr::Parse(cols[4]);
          if (cols[5] != "-") n.mac = MacAddr::Parse(cols[5]);
          trace.nodes.push_back(std::move(n));
        } else if (cols[0] == "#link" && cols.size() == 5) {
          TraceLink l;
          l.name = std::string(cols[1]);
          std::tie(l.a_node, l.a_port) = ParseNodePort(cols[2]);
          std::tie(l.b_node, l.b_port) = ParseNodePort(cols[3]);
          l.latency = ParseMillis(cols[4]);
          trace.links.push_back(std::move(l));
        }
        // Other comment lines are ignored.
        continue;
      }
      trace.events.push_back(ParseEventLine(line));
    } catch (const ParseError& e) {
      throw ParseError(e.detail(), line_no, e.offset());
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no, 0);
    }
  }
  if (!saw_header && !trace.events.empty()) {
    throw ParseError("missing #honeydoc-trace header", 1, 0);
  }
  return trace;
}

FrameRecord RelativeSeqTracker::Annotate(const std::string& location,
                                         const Segment& seg) {
  FrameRecord rec{seg, seg.seq, seg.ack};
  if (!seg.is_tcp()) {
    rec.rel_seq = 0;
    rec.rel_ack = 0;
    return rec;
  }
  Endpoint src{seg.src_ip.value(), seg.src_port};
  Endpoint dst{seg.dst_ip.value(), seg.dst_port};
  Key key{location, std::min(src, dst), std::max(src, dst), seg.proto};
  auto& isns = isns_[key];
  if (seg.flags.Has(kSyn)) isns[src] = seg.seq;
  if (auto it = isns.find(src); it != isns.end()) {
    rec.rel_seq = seg.seq - it->second;
  }
  if (!seg.flags.Has(kAck)) {
    rec.rel_ack = 0;
  } else if (auto it = isns.find(dst); it != isns.end()) {
    rec.rel_ack = seg.ack - it->second;
  }
  return rec;
}

void TraceRecorder::Frame(SimTime time, const std::string& location,
                          const Segment& seg) {
  TraceEvent e;
  e.time = time;
  e.kind = EventKind::kFrameDelivered;
  e.location = location;
  e.frame = tracker_.Annotate(location, seg);
  Append(std::move(e));
}

void TraceRecorder::Event(SimTime time, EventKind kind,
                          const std::string& location, EventFields fields) {
  TraceEvent e;
  e.time = time;
  e.kind = kind;
  e.location = location;
  e.fields = std::move(fields);
  Append(std::move(e));
}

void TraceRecorder::Append(TraceEvent event) {
  if (!trace_.events.empty() && event.time < trace_.events.back().time) {
    throw ContractViolation("trace time went backwards at " +
                            FormatMillis(event.time));
  }
  trace_.events.push_back(std::move(event));
}

}  // namespace honeydoc
