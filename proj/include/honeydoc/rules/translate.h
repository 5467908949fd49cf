#ifndef HONEYDOC_RULES_TRANSLATE_H_
#define HONEYDOC_RULES_TRANSLATE_H_

#include <cstddef>
#include <vector>

#include "honeydoc/dataplane/flow.h"
#include "honeydoc/rules/rule.h"

namespace honeydoc::rules {

struct TranslationResult {
  std::vector<dataplane::FlowEntry> dataplane_entries;
  std::vector<ClassificationRule> controller_rules;
  // Index into the input ruleset for each dataplane entry.
  std::vector<std::size_t> entry_source;
  // Index into the input ruleset for each controller rule.
  std::vector<std::size_t> controller_source;
};

// The match a rule's header fields produce in the flow table.
dataplane::MatchFields MatchOf(const ClassificationRule& rule);

// DROP rules without content become drop entries. Every other rule becomes
// a send-to-controller entry with the same header match and is retained for
// payload classification. Entries keep the rule's priority and cookie 0.
TranslationResult TranslateRules(const std::vector<ClassificationRule>& rules);

}  // namespace honeydoc::rules

#endif  // HONEYDOC_RULES_TRANSLATE_H_
