#pragma once

#include "awareauto/duration.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace awareauto {

enum class RuleOperation { create, modify, remove };

enum class TriggerMode { event, state };

std::string_view to_string(RuleOperation op);
std::string_view to_string(TriggerMode mode);
// Case-insensitive; accepts "create"/"modify"/"delete". Throws InvalidArgument.
RuleOperation parse_operation(std::string_view text);
TriggerMode parse_mode(std::string_view text);

// ---------------------------------------------------------------------------
// Reasoning-stage rule
// ---------------------------------------------------------------------------

/// Id 0 is reserved: `T0` names the implicit voice trigger of a named rule
/// and never appears in the TRIGGERS section.
inline constexpr int kNameTriggerId = 0;

struct TriggerSpec {
    int id = 1;
    std::string description;
    TriggerMode mode = TriggerMode::event;
    Duration delay;

    friend bool operator==(const TriggerSpec&, const TriggerSpec&) = default;
};

enum class StepKind { command, wait };

struct ActionStep {
    int id = 1;
    StepKind kind = StepKind::command;
    std::string text;  // command only
    Duration wait;     // wait only

    static ActionStep command(int id, std::string text) { return {id, StepKind::command, std::move(text), {}}; }
    static ActionStep pause(int id, Duration d) { return {id, StepKind::wait, {}, d}; }

    friend bool operator==(const ActionStep&, const ActionStep&) = default;
};

struct ActionGroup {
    int id = 1;
    std::vector<int> trigger_ids;
    std::vector<ActionStep> steps;

    friend bool operator==(const ActionGroup&, const ActionGroup&) = default;
};

struct NLRule {
    RuleOperation operation = RuleOperation::create;
    std::optional<std::string> name;
    std::vector<TriggerSpec> triggers;
    std::vector<ActionGroup> groups;

    const TriggerSpec* find_trigger(int id) const;
    const ActionGroup* find_group(int id) const;

    friend bool operator==(const NLRule&, const NLRule&) = default;
};

// Throws InvalidArgument on the first violated invariant. Returns warnings
// (currently: triggers no group refers to).
std::vector<std::string> check_invariants(const NLRule& rule);

// ---------------------------------------------------------------------------
// Grounding-stage rule
// ---------------------------------------------------------------------------

struct GroundedTrigger {
    std::string target;
    std::string interface;
    std::string condition;
    TriggerMode mode = TriggerMode::event;
    Duration delay;

    friend bool operator==(const GroundedTrigger&, const GroundedTrigger&) = default;
    friend auto operator<=>(const GroundedTrigger&, const GroundedTrigger&) = default;
};

inline constexpr std::string_view kTimerTarget = "timer";
inline constexpr std::string_view kTimerInterface = "wait";
inline constexpr std::string_view kVoiceTarget = "VoiceAssistant";
inline constexpr std::string_view kRuleNameInterface = "ruleName";

struct GroundedAction {
    std::string target;
    std::string interface;
    std::string parameter;

    bool is_timer() const { return target == kTimerTarget && interface == kTimerInterface; }

    friend bool operator==(const GroundedAction&, const GroundedAction&) = default;
    friend auto operator<=>(const GroundedAction&, const GroundedAction&) = default;
};

struct TAPair {
    std::vector<GroundedTrigger> triggers;
    std::vector<GroundedAction> actions;

    friend bool operator==(const TAPair&, const TAPair&) = default;
};

enum class ErrorCode {
    unknown_target,
    unknown_interface,
    bad_condition,
    bad_parameter,
    unsupported_capability,
    malformed_output,
};

std::string_view to_string(ErrorCode code);
ErrorCode parse_error_code(std::string_view text);

struct GroundingError {
    ErrorCode code = ErrorCode::malformed_output;
    std::optional<std::string> target;
    std::optional<std::string> interface;
    std::string message;

    friend bool operator==(const GroundingError&, const GroundingError&) = default;
};

struct GroundedRule {
    RuleOperation operation = RuleOperation::create;
    std::optional<std::string> name;
    bool feasible = false;
    std::vector<TAPair> ta_pairs;
    std::vector<GroundingError> errors;

    friend bool operator==(const GroundedRule&, const GroundedRule&) = default;
};

// The voice trigger a named rule owns by default.
GroundedTrigger name_trigger(std::string_view rule_name);
bool is_name_trigger(const GroundedTrigger& t);

} // namespace awareauto
