#pragma once

#include "awareauto/catalog.hpp"
#include "awareauto/llm.hpp"
#include "awareauto/prompts.hpp"
#include "awareauto/rule.hpp"

#include <string>

namespace awareauto {

/// Model output that could not be turned into a rule, even after the repair
/// round. The raw text is kept so it can be shown to the user.
class UnparseableOutputError : public Error {
public:
    UnparseableOutputError(const std::string& message, std::string raw) : Error(message), raw_(std::move(raw)) {}
    const std::string& raw() const { return raw_; }

private:
    std::string raw_;
};

// Segments in order: output format (with the rule grammar), generation
// details, layout-only scenario, few-shot examples. Throws InvalidArgument
// when the example set is empty.
std::string build_reasoning_prompt(const PromptSet& prompts, const DeviceCatalog& catalog, const ContextSnapshot& snapshot);

std::string render_examples(const std::vector<FewShotExample>& examples);

// Message sent after a parse failure; the request that follows is a second,
// distinct completion.
std::string repair_message(const std::string& original, const std::string& raw_output, const std::string& problem,
                           std::string_view expected);

/// Stage one: asks the model for a rule-text document and parses it. One
/// repair round is attempted on a parse failure.
NLRule infer_rule(llm::Backend& backend, const std::string& prompt, const std::string& normalized_expression);

} // namespace awareauto
