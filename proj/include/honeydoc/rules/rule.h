#ifndef HONEYDOC_RULES_RULE_H_
#define HONEYDOC_RULES_RULE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "honeydoc/core/addr.h"
#include "honeydoc/core/bytes.h"
#include "honeydoc/core/segment.h"

namespace honeydoc::rules {

enum class RuleAction { kDrop, kMih, kHih };

std::string_view RuleActionName(RuleAction action);  // "DROP" / "MIH" / "HIH"
std::optional<RuleAction> ParseRuleAction(std::string_view name);

// Absent optionals mean `any`.
struct ClassificationRule {
  std::optional<Proto> proto;
  std::optional<IpAddr> src_ip;
  std::optional<std::uint16_t> src_port;
  std::optional<IpAddr> dst_ip;
  std::optional<std::uint16_t> dst_port;
  RuleAction action = RuleAction::kDrop;
  std::optional<std::uint32_t> sid;
  int priority = 0;
  std::optional<Bytes> content;

  // 0 when the rule carries no sid.
  std::uint32_t sid_or_zero() const { return sid.value_or(0); }

  // Header fields only; content is checked by MatchesSegment.
  bool MatchesHeader(const Segment& seg) const;
  bool MatchesSegment(const Segment& seg) const;

  bool operator==(const ClassificationRule&) const = default;
};

// Canonical one-line form accepted back by ParseRule.
std::string FormatRule(const ClassificationRule& rule);

struct Alert {
  RuleAction action = RuleAction::kDrop;
  std::uint32_t sid = 0;
  int matched_rule_priority = 0;
  bool operator==(const Alert&) const = default;
};

}  // namespace honeydoc::rules

#endif  // HONEYDOC_RULES_RULE_H_
