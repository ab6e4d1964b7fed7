#include "awareauto/pipeline.hpp"

#include "awareauto/grounding.hpp"
#include "awareauto/reasoning.hpp"
#include "awareauto/rule_text.hpp"
#include "awareauto/text.hpp"

#include <algorithm>
#include <set>

namespace awareauto {

NLRule merge_delta(const NLRule& base, const NLRule& delta) {
    if (delta.name && base.name && !text::iequals(text::trim(*delta.name), text::trim(*base.name)))
        throw InvalidArgument("MODIFY names '" + *delta.name + "' but the rule being changed is '" + *base.name + "'");

    NLRule out = base;
    out.operation = RuleOperation::modify;
    if (!out.name) out.name = delta.name;

    for (const auto& t : delta.triggers) {
        auto it = std::find_if(out.triggers.begin(), out.triggers.end(), [&](const TriggerSpec& x) { return x.id == t.id; });
        if (it != out.triggers.end())
            *it = t;
        else
            out.triggers.push_back(t);
    }
    for (const auto& g : delta.groups) {
        auto it = std::find_if(out.groups.begin(), out.groups.end(), [&](const ActionGroup& x) { return x.id == g.id; });
        if (it == out.groups.end()) {
            if (g.steps.empty()) throw InvalidArgument("MODIFY adds group G" + std::to_string(g.id) + " without steps");
            out.groups.push_back(g);
        } else if (g.steps.empty()) {
            it->trigger_ids = g.trigger_ids;
        } else {
            *it = g;
        }
    }

    std::set<int> used;
    for (const auto& g : out.groups) used.insert(g.trigger_ids.begin(), g.trigger_ids.end());
    std::erase_if(out.triggers, [&](const TriggerSpec& t) { return !used.count(t.id); });
    std::sort(out.triggers.begin(), out.triggers.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    std::sort(out.groups.begin(), out.groups.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

    // The merged rule has to stand on its own.
    NLRule standalone = out;
    standalone.operation = RuleOperation::create;
    check_invariants(standalone);
    return out;
}

Pipeline::Pipeline(DeviceCatalog catalog, PromptSet prompts, std::shared_ptr<llm::Backend> backend)
    : catalog_(std::move(catalog)), prompts_(std::move(prompts)), backend_(std::move(backend)) {
    if (!backend_) throw InvalidArgument("pipeline needs a backend");
    grounding_prompt_ = build_grounding_prompt(prompts_, catalog_);
}

NLRule Pipeline::reason(const std::string& normalized, const ContextSnapshot& snapshot) const {
    return infer_rule(*backend_, build_reasoning_prompt(prompts_, catalog_, snapshot), normalized);
}

GroundedRule Pipeline::ground(const NLRule& rule) const {
    if (rule.operation == RuleOperation::remove) {
        GroundedRule g;
        g.operation = RuleOperation::remove;
        g.name = rule.name;
        g.feasible = true;
        return g;
    }
    try {
        return ground_rule(*backend_, grounding_prompt_, rule, catalog_);
    } catch (const MalformedOutputError& e) {
        return malformed_rule(rule, e.what());
    }
}

PipelineResult Pipeline::run(const UserExpression& expr, const ContextSnapshot& snapshot,
                             const std::optional<NLRule>& base) const {
    PipelineResult result;
    result.normalized = normalize_expression(expr, snapshot);
    try {
        // The model needs the current rule to write a MODIFY against its labels.
        auto message = result.normalized;
        if (base) message += "\n\nRule being discussed:\n" + serialize_rule_text(*base);
        result.nl_rule = reason(message, snapshot);
    } catch (const UnparseableOutputError& e) {
        result.error = e.what();
        result.raw_output = e.raw();
        return result;
    }

    const NLRule* to_ground = &*result.nl_rule;
    if (result.nl_rule->operation == RuleOperation::modify) {
        if (!base) {
            result.error = "MODIFY needs the rule it changes";
            return result;
        }
        try {
            result.merged_rule = merge_delta(*base, *result.nl_rule);
        } catch (const InvalidArgument& e) {
            result.error = e.what();
            return result;
        }
        to_ground = &*result.merged_rule;
    }
    result.grounded = ground(*to_ground);
    return result;
}

} // namespace awareauto
