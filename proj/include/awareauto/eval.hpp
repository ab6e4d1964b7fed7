#pragma once

#include "awareauto/catalog.hpp"
#include "awareauto/normalizer.hpp"
#include "awareauto/pipeline.hpp"
#include "awareauto/rule.hpp"

#include "json.hpp"

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace awareauto {

enum class Complexity {
    multi_parameter,
    dynamic_parameters,
    multimodal_parameters,
    fuzzy_expression,
    redundant_expressions,
    complex_branch,
    time_related_trigger,
    time_dependent_action,
    combination,
};

inline constexpr std::array kAllComplexities = {
    Complexity::multi_parameter,      Complexity::dynamic_parameters,    Complexity::multimodal_parameters,
    Complexity::fuzzy_expression,     Complexity::redundant_expressions, Complexity::complex_branch,
    Complexity::time_related_trigger, Complexity::time_dependent_action, Complexity::combination,
};

std::string_view to_string(Complexity c);     // "multi_parameter"
std::string_view table_label(Complexity c);   // "Multi-parameter"
Complexity parse_complexity(std::string_view text);

struct EvalCase {
    std::string id;
    Complexity complexity = Complexity::multi_parameter;
    UserExpression expression;
    ContextSnapshot snapshot;
    NLRule gold_nl;
    // The rule a MODIFY expression changes.
    std::optional<NLRule> base_nl;
    std::optional<GroundedRule> gold_grounded;
    std::optional<std::set<ErrorCode>> gold_infeasible_reason;
};

// Throws SchemaError naming the offending case field.
EvalCase eval_case_from_json(const nlohmann::json& doc, const std::string& pointer = "");
nlohmann::json to_json(const EvalCase& c);
std::vector<EvalCase> load_corpus(const nlohmann::json& doc);
std::vector<EvalCase> load_corpus_file(const std::string& path);

struct CaseScore {
    bool correctness = false;
    bool completeness = false;
    bool executability = false;
    bool env_conformance = false;
    bool success = false;

    friend bool operator==(const CaseScore&, const CaseScore&) = default;
};

// Same trigger/group structure up to renumbering: trigger modes and delays,
// which triggers each group waits for, the shape of each step list.
bool same_logic(const NLRule& gold, const NLRule& predicted);
// Every gold trigger and step has a counterpart with the same normalized text.
bool covers(const NLRule& gold, const NLRule& predicted);

// Total: never throws for well-formed cases.
CaseScore score_case(const EvalCase& c, const NLRule& predicted_nl, const GroundedRule& predicted_grounded,
                     const DeviceCatalog& catalog);

/// count/total as a percentage, rounded half up to a fixed number of decimals.
/// Integer arithmetic only, so 188/205 is "91.7" on every platform.
std::string format_rate(std::size_t count, std::size_t total, int decimals = 1);

struct Tally {
    std::size_t cases = 0;
    std::size_t correctness = 0;
    std::size_t completeness = 0;
    std::size_t executability = 0;
    std::size_t env_conformance = 0;
    std::size_t success = 0;

    void add(const CaseScore& s);
};

struct CaseResult {
    std::string id;
    Complexity complexity = Complexity::multi_parameter;
    CaseScore score;
    std::optional<std::string> failure;  // pipeline error, if any
};

struct EvalReport {
    std::vector<CaseResult> cases;  // ordered by id
    std::vector<std::pair<Complexity, Tally>> classes;  // classes with cases, enum order
    Tally overall;

    nlohmann::json to_json() const;
    std::string to_table() const;
};

EvalReport build_report(std::vector<CaseResult> results);

// Per-case failures count as all-false scores. `threads` 0 = hardware.
EvalReport run_corpus(const std::vector<EvalCase>& corpus, const Pipeline& pipeline, unsigned threads = 0);

} // namespace awareauto
