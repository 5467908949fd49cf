#include "honeydoc/rules/translate.h"

namespace honeydoc::rules {

dataplane::MatchFields MatchOf(const ClassificationRule& rule) {
  dataplane::MatchFields m;
  m.proto = rule.proto;
  m.src_ip = rule.src_ip;
  m.dst_ip = rule.dst_ip;
  m.src_port = rule.src_port;
  m.dst_port = rule.dst_port;
  return m;
}

TranslationResult TranslateRules(const std::vector<ClassificationRule>& rules) {
  TranslationResult result;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const ClassificationRule& rule = rules[i];
    dataplane::FlowEntry entry;
    entry.priority = rule.priority;
    entry.match = MatchOf(rule);
    if (rule.action == RuleAction::kDrop && !rule.content) {
      entry.actions = {dataplane::Drop{}};
    } else {
      entry.actions = {dataplane::ToController{}};
      result.controller_rules.push_back(rule);
      result.controller_source.push_back(i);
    }
    result.dataplane_entries.push_back(std::move(entry));
    result.entry_source.push_back(i);
  }
  return result;
}

}  // namespace honeydoc::rules
