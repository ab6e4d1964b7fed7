#include "awareauto/rule.hpp"

#include "awareauto/error.hpp"
#include "awareauto/text.hpp"

#include <algorithm>
#include <set>

namespace awareauto {

std::string_view to_string(RuleOperation op) {
    switch (op) {
    case RuleOperation::create: return "create";
    case RuleOperation::modify: return "modify";
    case RuleOperation::remove: return "delete";
    }
    return "create";
}

std::string_view to_string(TriggerMode mode) { return mode == TriggerMode::event ? "event" : "state"; }

RuleOperation parse_operation(std::string_view s) {
    if (text::iequals(s, "create")) return RuleOperation::create;
    if (text::iequals(s, "modify")) return RuleOperation::modify;
    if (text::iequals(s, "delete")) return RuleOperation::remove;
    throw InvalidArgument("unknown operation '" + std::string(s) + "'");
}

TriggerMode parse_mode(std::string_view s) {
    if (text::iequals(s, "event")) return TriggerMode::event;
    if (text::iequals(s, "state")) return TriggerMode::state;
    throw InvalidArgument("unknown trigger mode '" + std::string(s) + "'");
}

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::unknown_target: return "UNKNOWN_TARGET";
    case ErrorCode::unknown_interface: return "UNKNOWN_INTERFACE";
    case ErrorCode::bad_condition: return "BAD_CONDITION";
    case ErrorCode::bad_parameter: return "BAD_PARAMETER";
    case ErrorCode::unsupported_capability: return "UNSUPPORTED_CAPABILITY";
    case ErrorCode::malformed_output: return "MALFORMED_OUTPUT";
    }
    return "MALFORMED_OUTPUT";
}

ErrorCode parse_error_code(std::string_view s) {
    for (auto code : {ErrorCode::unknown_target, ErrorCode::unknown_interface, ErrorCode::bad_condition,
                      ErrorCode::bad_parameter, ErrorCode::unsupported_capability, ErrorCode::malformed_output}) {
        if (text::iequals(s, to_string(code))) return code;
    }
    throw InvalidArgument("unknown error code '" + std::string(s) + "'");
}

const TriggerSpec* NLRule::find_trigger(int id) const {
    auto it = std::find_if(triggers.begin(), triggers.end(), [id](const TriggerSpec& t) { return t.id == id; });
    return it == triggers.end() ? nullptr : &*it;
}

const ActionGroup* NLRule::find_group(int id) const {
    auto it = std::find_if(groups.begin(), groups.end(), [id](const ActionGroup& g) { return g.id == id; });
    return it == groups.end() ? nullptr : &*it;
}

std::vector<std::string> check_invariants(const NLRule& rule) {
    auto fail = [](const std::string& msg) { throw InvalidArgument(msg); };

    if (rule.name && text::trim(*rule.name).empty()) fail("rule name is empty");
    if (rule.operation == RuleOperation::remove && !rule.name) fail("DELETE requires a rule name");
    if (rule.operation == RuleOperation::create && rule.groups.empty()) fail("CREATE requires at least one action group");

    std::set<int> trigger_ids;
    for (const auto& t : rule.triggers) {
        if (t.id <= 0) fail("trigger id T" + std::to_string(t.id) + " is reserved");
        if (!trigger_ids.insert(t.id).second) fail("duplicate trigger id T" + std::to_string(t.id));
        if (text::trim(t.description).empty()) fail("trigger T" + std::to_string(t.id) + " has no description");
        if (t.mode == TriggerMode::event && !t.delay.is_zero())
            fail("event trigger T" + std::to_string(t.id) + " cannot carry a delay");
    }

    // A MODIFY group without steps rebinds that group's triggers and keeps its
    // existing steps.
    const bool delta = rule.operation == RuleOperation::modify;
    std::set<int> group_ids;
    std::set<int> referenced;
    for (const auto& g : rule.groups) {
        const auto gid = "G" + std::to_string(g.id);
        if (g.id <= 0) fail("group id " + gid + " is invalid");
        if (!group_ids.insert(g.id).second) fail("duplicate group id " + gid);
        if (g.trigger_ids.empty()) fail("group " + gid + " has no triggers");
        for (int tid : g.trigger_ids) {
            if (tid == kNameTriggerId) {
                if (!rule.name) fail("group " + gid + " refers to T0 but the rule has no name");
                continue;
            }
            // Deltas may point at triggers that only exist in the rule being modified.
            if (!trigger_ids.count(tid) && !delta)
                fail("group " + gid + " refers to undefined trigger T" + std::to_string(tid));
            referenced.insert(tid);
        }
        if (g.steps.empty() && !delta) fail("group " + gid + " has no action steps");
        std::set<int> step_ids;
        for (const auto& s : g.steps) {
            if (!step_ids.insert(s.id).second) fail("duplicate step id A" + std::to_string(s.id) + " in " + gid);
            if (s.kind == StepKind::wait && s.wait.is_zero()) fail("WAIT step in " + gid + " must be positive");
            if (s.kind == StepKind::command && text::trim(s.text).empty()) fail("empty command step in " + gid);
        }
    }

    std::vector<std::string> warnings;
    for (const auto& t : rule.triggers)
        if (!referenced.count(t.id)) warnings.push_back("trigger T" + std::to_string(t.id) + " is not used by any group");
    return warnings;
}

GroundedTrigger name_trigger(std::string_view rule_name) {
    return {std::string(kVoiceTarget), std::string(kRuleNameInterface), std::string(rule_name), TriggerMode::event, {}};
}

bool is_name_trigger(const GroundedTrigger& t) {
    return text::iequals(t.target, kVoiceTarget) && text::iequals(t.interface, kRuleNameInterface) &&
           t.mode == TriggerMode::event;
}

} // namespace awareauto
