#ifndef HONEYDOC_RULES_CLASSIFY_H_
#define HONEYDOC_RULES_CLASSIFY_H_

#include <optional>
#include <vector>

#include "honeydoc/rules/rule.h"

namespace honeydoc::rules {

// Best match: highest priority, then lowest sid (rules without a sid sort as
// 0), then file order. nullopt when nothing matches; callers fail closed.
std::optional<Alert> Classify(const Segment& seg,
                              const std::vector<ClassificationRule>& rules);

}  // namespace honeydoc::rules

#endif  // HONEYDOC_RULES_CLASSIFY_H_
