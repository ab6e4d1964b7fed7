#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace awareauto {

struct FewShotExample {
    std::string input;   // normalized expression
    std::string output;  // rule-text document
};

/// Prompt material read from a template directory, so prompts can be edited
/// without rebuilding. Expected files:
///
///   reasoning_template.txt   {{format}} {{details}} {{scenario}} {{examples}}
///   reasoning_format.txt     may use {{grammar}}
///   reasoning_details.txt
///   reasoning_examples.json  [{"input": ..., "output": ...}, ...]
///   grounding_template.txt   {{format}} {{details}} {{scenario}} {{example}}
///   grounding_format.txt     may use {{schema}}
///   grounding_details.txt
///   grounding_example.txt
struct PromptSet {
    std::string reasoning_template;
    std::string reasoning_format;
    std::string reasoning_details;
    std::vector<FewShotExample> examples;
    std::string grounding_template;
    std::string grounding_format;
    std::string grounding_details;
    std::string grounding_example;

    static PromptSet load(const std::filesystem::path& dir);
};

// Replaces every `{{key}}`. Throws InvalidArgument when a key in `values` is
// missing from the template or a placeholder is left unfilled.
std::string fill_template(std::string_view tmpl, const std::map<std::string, std::string>& values);

// The rule-text grammar as shown to the model.
extern const std::string_view kRuleTextGrammar;
// The grounded-rule JSON schema as shown to the model.
extern const std::string_view kGroundedJsonSchema;

} // namespace awareauto
