#pragma once

#include "awareauto/rule.hpp"

#include <string>
#include <string_view>

namespace awareauto {

/// Parses the line-oriented rule-text document:
///
///     OPERATION: CREATE|MODIFY|DELETE
///     NAME: <text>|NONE
///     TRIGGERS:
///       T<i> | EVENT | <text>
///       T<i> | STATE | <text>
///       T<i> | STATE(<int><unit>) | <text>
///     ACTIONS:
///       G<k> WHEN T<i>[,T<j>...]:
///         A<m> | <text>
///         A<m> | WAIT <int><unit>
///
/// Keywords are case-insensitive, indentation and blank lines are ignored.
/// Throws ParseError with the 1-based line/column of the first problem.
NLRule parse_rule_text(std::string_view document);

// Canonical rendering; parse_rule_text(serialize_rule_text(r)) == r.
std::string serialize_rule_text(const NLRule& rule);

// Pulls a rule-text document out of free-form model output: drops code fences
// and anything before the first OPERATION: line. Returns the input unchanged
// when no OPERATION: line exists.
std::string extract_rule_text(std::string_view raw);

} // namespace awareauto
