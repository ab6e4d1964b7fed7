#pragma once

#include "awareauto/catalog.hpp"
#include "awareauto/llm.hpp"
#include "awareauto/prompts.hpp"
#include "awareauto/rule.hpp"

#include <string>

namespace awareauto {

/// Grounding output that is not valid JSON for the grounded-rule schema,
/// even after the repair round.
class MalformedOutputError : public Error {
public:
    MalformedOutputError(const std::string& message, std::string raw) : Error(message), raw_(std::move(raw)) {}
    const std::string& raw() const { return raw_; }

private:
    std::string raw_;
};

// Output format with the JSON schema, TA-pair constraints, layout with every
// interface (query return domains included), then the worked example last.
std::string build_grounding_prompt(const PromptSet& prompts, const DeviceCatalog& catalog);

// Pulls the outermost {...} out of model output (code fences, prose).
std::string extract_json_object(std::string_view raw);

// Adds the default voice trigger to a named rule when no TA-pair carries it:
// one extra pair per distinct action list, triggered by saying the name.
void add_default_name_trigger(GroundedRule& rule);

/// Stage two: asks the model to ground `rule`, post-processes the answer
/// (operation and name come from the NL rule, default name trigger) and
/// validates it against the catalog.
GroundedRule ground_rule(llm::Backend& backend, const std::string& prompt, const NLRule& rule,
                         const DeviceCatalog& catalog);

/// Checks every trigger against query interfaces and return domains, and every
/// action against operation interfaces and parameter domains. Failures become
/// GroundingError records; the rule is feasible iff none were found. Never
/// throws on model-invented content. Idempotent.
GroundedRule validate_grounded(const DeviceCatalog& catalog, const GroundedRule& rule);

// Infeasible rule carrying a single MALFORMED_OUTPUT error.
GroundedRule malformed_rule(const NLRule& rule, const std::string& message);

} // namespace awareauto
