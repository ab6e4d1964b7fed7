#include "awareauto/reasoning.hpp"

#include "awareauto/rule_text.hpp"

namespace awareauto {

std::string render_examples(const std::vector<FewShotExample>& examples) {
    std::string out;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        if (i) out += "\n\n";
        out += "Example " + std::to_string(i + 1) + "\nInput:\n" + examples[i].input + "\nOutput:\n" + examples[i].output;
    }
    return out;
}

std::string build_reasoning_prompt(const PromptSet& prompts, const DeviceCatalog& catalog, const ContextSnapshot& snapshot) {
    if (prompts.examples.empty()) throw InvalidArgument("the reasoning prompt needs at least one example");
    const auto format = fill_template(prompts.reasoning_format, {{"grammar", std::string(kRuleTextGrammar)}});
    return fill_template(prompts.reasoning_template,
                         {{"format", format},
                          {"details", prompts.reasoning_details},
                          {"scenario", render_scenario_text(catalog, snapshot, ScenarioDetail::layout_only)},
                          {"examples", render_examples(prompts.examples)}});
}

std::string repair_message(const std::string& original, const std::string& raw_output, const std::string& problem,
                           std::string_view expected) {
    return original + "\n\nYour previous answer could not be used (" + problem + ").\nPrevious answer:\n" + raw_output +
           "\n\nAnswer again using only " + std::string(expected) + ".";
}

NLRule infer_rule(llm::Backend& backend, const std::string& prompt, const std::string& normalized_expression) {
    llm::CompletionRequest request{prompt, normalized_expression};
    auto raw = backend.complete(request);
    try {
        return parse_rule_text(extract_rule_text(raw));
    } catch (const ParseError& first) {
        request.user_message = repair_message(normalized_expression, raw, first.what(), "the rule format");
        auto repaired = backend.complete(request);
        try {
            return parse_rule_text(extract_rule_text(repaired));
        } catch (const ParseError& second) {
            throw UnparseableOutputError(std::string("model output is not a valid rule after one repair attempt: ") +
                                             second.what(),
                                         repaired);
        }
    }
}

} // namespace awareauto
