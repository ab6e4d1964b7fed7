#pragma once

#include "awareauto/rule.hpp"

#include "json.hpp"

#include <string>
#include <string_view>

namespace awareauto {

// Display tuples. Targets may contain spaces but not '-'; everything after
// the interface (triggers: up to the mode) belongs to the condition or
// parameter, so those may contain '-'. Throws TupleError.
GroundedTrigger parse_trigger_tuple(std::string_view display);
GroundedAction parse_action_tuple(std::string_view display);
std::string display(const GroundedTrigger& t);
std::string display(const GroundedAction& a);

// JSON wire format. The parser throws SchemaError naming the JSON pointer of
// the offending field; it does not enforce feasibility invariants, since model
// output is validated afterwards.
nlohmann::json to_json(const GroundedRule& rule);
nlohmann::json to_json(const GroundedTrigger& t);
nlohmann::json to_json(const GroundedAction& a);
nlohmann::json to_json(const GroundingError& e);
GroundedRule grounded_from_json(const nlohmann::json& doc);
GroundedRule parse_grounded_json(std::string_view text);
std::string serialize_grounded_json(const GroundedRule& rule, int indent = 2);

// Throws InvalidArgument when feasibility/error/pair invariants do not hold.
void check_invariants(const GroundedRule& rule);

// Lower-cased, trimmed names; triggers sorted within each pair; pairs sorted
// by trigger list; errors sorted. Action order is kept. Idempotent.
GroundedRule canonicalize(const GroundedRule& rule);

bool rules_equivalent(const GroundedRule& a, const GroundedRule& b);

} // namespace awareauto
