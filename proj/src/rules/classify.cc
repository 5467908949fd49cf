#include "honeydoc/rules/classify.h"

namespace honeydoc::rules {

std::optional<Alert> Classify(const Segment& seg,
                              const std::vector<ClassificationRule>& rules) {
  const ClassificationRule* best = nullptr;
  for (const ClassificationRule& rule : rules) {
    if (!rule.MatchesSegment(seg)) continue;
    if (best == nullptr || rule.priority > best->priority ||
        (rule.priority == best->priority &&
         rule.sid_or_zero() < best->sid_or_zero())) {
      best = &rule;
    }
  }
  if (best == nullptr) return std::nullopt;
  return Alert{best->action, best->sid_or_zero(), best->priority};
}

}  // namespace honeydoc::rules
