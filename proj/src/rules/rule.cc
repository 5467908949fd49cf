#include "honeydoc/rules/rule.h"

#include <fmt/format.h>

namespace honeydoc::rules {
namespace {

std::string IpOrAny(const std::optional<IpAddr>& ip) {
  return ip ? ip->ToString() : "any";
}

std::string PortOrAny(const std::optional<std::uint16_t>& port) {
  return port ? std::to_string(*port) : "any";
}

// Content literal for the rule grammar: printable bytes verbatim, the rest as
// |hex| runs.
std::string FormatContent(const Bytes& content) {
  std::string out;
  bool in_hex = false;
  for (std::uint8_t b : content) {
    bool plain = b >= 0x20 && b < 0x7f && b != '"' && b != '|' && b != '\\' &&
                 b != ';';
    if (plain) {
      if (in_hex) out += '|';
      in_hex = false;
      out += static_cast<char>(b);
    } else {
      out += in_hex ? " " : "|";
      in_hex = true;
      out += fmt::format("{:02x}", b);
    }
  }
  if (in_hex) out += '|';
  return out;
}

}  // namespace

std::string_view RuleActionName(RuleAction action) {
  switch (action) {
    case RuleAction::kDrop:
      return "DROP";
    case RuleAction::kMih:
      return "MIH";
    case RuleAction::kHih:
      return "HIH";
  }
  return "?";
}

std::optional<RuleAction> ParseRuleAction(std::string_view name) {
  if (name == "DROP") return RuleAction::kDrop;
  if (name == "MIH") return RuleAction::kMih;
  if (name == "HIH") return RuleAction::kHih;
  return std::nullopt;
}

bool ClassificationRule::MatchesHeader(const Segment& seg) const {
  if (proto && *proto != seg.proto) return false;
  if (src_ip && *src_ip != seg.src_ip) return false;
  if (dst_ip && *dst_ip != seg.dst_ip) return false;
  if (src_port && *src_port != seg.src_port) return false;
  if (dst_port && *dst_port != seg.dst_port) return false;
  return true;
}

bool ClassificationRule::MatchesSegment(const Segment& seg) const {
  if (!MatchesHeader(seg)) return false;
  return !content || ContainsBytes(seg.payload, *content);
}

std::string FormatRule(const ClassificationRule& rule) {
  std::string out = fmt::format(
      "alert {} {} {} -> {} {} (msg:\"{}\";",
      rule.proto ? ProtoName(*rule.proto) : "any", IpOrAny(rule.src_ip),
      PortOrAny(rule.src_port), IpOrAny(rule.dst_ip), PortOrAny(rule.dst_port),
      RuleActionName(rule.action));
  if (rule.sid) out += fmt::format(" sid:{};", *rule.sid);
  out += fmt::format(" priority:{};", rule.priority);
  if (rule.content) out += " content:\"" + FormatContent(*rule.content) + "\";";
  out += ")";
  return out;
}

}  // namespace honeydoc::rules
