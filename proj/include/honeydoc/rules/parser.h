#ifndef HONEYDOC_RULES_PARSER_H_
#define HONEYDOC_RULES_PARSER_H_

#include <string_view>
#include <vector>

#include "honeydoc/rules/rule.h"

namespace honeydoc::rules {

// Grammar (one logical line):
//   alert <tcp|udp|any> <ip|any> <port|any> (->|→) <ip|any> <port|any>
//         ( msg:"DROP|MIH|HIH"; [sid:N;] [priority:N;] [content:"...";] )
// Content accepts \" \\ \; escapes and |hex bytes| runs. Throws ParseError
// carrying the byte offset of the problem.
ClassificationRule ParseRule(std::string_view text);

// One rule per line; `#` starts a comment line, blank lines are skipped and a
// trailing backslash joins the next physical line. Sids must be unique.
// Errors report the first offending (physical) line.
std::vector<ClassificationRule> ParseRuleset(std::string_view text);

}  // namespace honeydoc::rules

#endif  // HONEYDOC_RULES_PARSER_H_
