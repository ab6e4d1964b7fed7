#pragma once

#include "awareauto/catalog.hpp"
#include "awareauto/llm.hpp"
#include "awareauto/normalizer.hpp"
#include "awareauto/prompts.hpp"
#include "awareauto/rule.hpp"

#include <memory>
#include <optional>
#include <string>

namespace awareauto {

/// Applies a MODIFY rule to the rule it changes. Triggers and groups are
/// replaced or added by id; a delta group without steps only rebinds the
/// triggers of the existing group. Triggers no group uses afterwards are
/// dropped. The result keeps the base name and has operation MODIFY.
/// Throws InvalidArgument when the merged rule is incomplete or the names
/// disagree.
NLRule merge_delta(const NLRule& base, const NLRule& delta);

struct PipelineResult {
    std::string normalized;
    std::optional<NLRule> nl_rule;          // as the model wrote it
    std::optional<NLRule> merged_rule;      // MODIFY applied to its base
    std::optional<GroundedRule> grounded;
    std::optional<std::string> error;       // reasoning or merge failure
    std::string raw_output;                 // unparseable model text, if any
};

/// Normalizer, reasoning, grounding and validation bound to one catalog,
/// prompt set and backend. Safe to share between threads when the backend is.
class Pipeline {
public:
    Pipeline(DeviceCatalog catalog, PromptSet prompts, std::shared_ptr<llm::Backend> backend);

    // Throws UnparseableOutputError and llm errors.
    NLRule reason(const std::string& normalized, const ContextSnapshot& snapshot) const;

    // DELETE needs no model call. Unusable model output becomes an infeasible
    // rule with MALFORMED_OUTPUT; transport errors propagate.
    GroundedRule ground(const NLRule& rule) const;

    // Full run. `base` is the rule a MODIFY expression refers to. Model and
    // merge failures are reported in the result; transport errors propagate.
    PipelineResult run(const UserExpression& expr, const ContextSnapshot& snapshot,
                       const std::optional<NLRule>& base = std::nullopt) const;

    const DeviceCatalog& catalog() const { return catalog_; }
    const PromptSet& prompts() const { return prompts_; }
    llm::Backend& backend() const { return *backend_; }

private:
    DeviceCatalog catalog_;
    PromptSet prompts_;
    std::shared_ptr<llm::Backend> backend_;
    std::string grounding_prompt_;
};

} // namespace awareauto
