#include "awareauto/grounding.hpp"

#include "awareauto/condition.hpp"
#include "awareauto/grounded.hpp"
#include "awareauto/reasoning.hpp"
#include "awareauto/rule_text.hpp"
#include "awareauto/text.hpp"

#include <algorithm>

namespace awareauto {

std::string build_grounding_prompt(const PromptSet& prompts, const DeviceCatalog& catalog) {
    const auto format = fill_template(prompts.grounding_format, {{"schema", std::string(kGroundedJsonSchema)}});
    return fill_template(prompts.grounding_template,
                         {{"format", format},
                          {"details", prompts.grounding_details},
                          {"scenario", render_scenario_text(catalog, {}, ScenarioDetail::layout_and_interfaces)},
                          {"example", prompts.grounding_example}});
}

std::string extract_json_object(std::string_view raw) {
    auto open = raw.find('{');
    auto close = raw.rfind('}');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) return std::string(raw);
    return std::string(raw.substr(open, close - open + 1));
}

void add_default_name_trigger(GroundedRule& rule) {
    if (!rule.name || rule.ta_pairs.empty()) return;
    for (const auto& p : rule.ta_pairs)
        for (const auto& t : p.triggers)
            if (is_name_trigger(t) && text::iequals(text::trim(t.condition), text::trim(*rule.name))) return;

    std::vector<std::vector<GroundedAction>> distinct;
    for (const auto& p : rule.ta_pairs)
        if (std::find(distinct.begin(), distinct.end(), p.actions) == distinct.end()) distinct.push_back(p.actions);
    for (auto& actions : distinct) rule.ta_pairs.push_back({{name_trigger(*rule.name)}, std::move(actions)});
}

GroundedRule malformed_rule(const NLRule& rule, const std::string& message) {
    GroundedRule g;
    g.operation = rule.operation;
    g.name = rule.name;
    g.feasible = false;
    g.errors.push_back({ErrorCode::malformed_output, std::nullopt, std::nullopt, message});
    return g;
}

GroundedRule ground_rule(llm::Backend& backend, const std::string& prompt, const NLRule& rule,
                         const DeviceCatalog& catalog) {
    const auto message = serialize_rule_text(rule);
    llm::CompletionRequest request{prompt, message};
    auto raw = backend.complete(request);

    GroundedRule grounded;
    try {
        grounded = parse_grounded_json(extract_json_object(raw));
    } catch (const SchemaError& first) {
        request.user_message = repair_message(message, raw, first.what(), "one JSON object matching the schema");
        raw = backend.complete(request);
        try {
            grounded = parse_grounded_json(extract_json_object(raw));
        } catch (const SchemaError& second) {
            throw MalformedOutputError(std::string("grounding output is not valid rule JSON after one repair attempt: ") +
                                           second.what(),
                                       raw);
        }
    }

    // Stage one owns the operation and the name.
    grounded.operation = rule.operation;
    grounded.name = rule.name;
    add_default_name_trigger(grounded);
    return validate_grounded(catalog, grounded);
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

std::string list_interfaces(const Device& device, InterfaceKind kind) {
    std::string out;
    for (const auto& i : device.interfaces)
        if (i.kind == kind) out += (out.empty() ? "" : ", ") + i.name;
    return out.empty() ? "none" : out;
}

// Empty string when the condition fits the domain.
std::string condition_problem(const Domain& domain, const Condition& c) {
    if (c.operand.empty()) return "condition has no value";
    switch (domain.kind) {
    case Domain::Kind::enumeration:
        if (c.ordering()) return "ordering comparator used on enumerated values " + domain.describe();
        if (!domain.accepts(c.operand)) return "'" + c.operand + "' is not one of " + domain.describe();
        return {};
    case Domain::Kind::range: {
        if (!parse_number(c.operand)) return "'" + c.operand + "' is not a number in " + domain.describe();
        if (!c.ordering() && !domain.accepts(c.operand)) return "'" + c.operand + "' is outside " + domain.describe();
        return {};
    }
    case Domain::Kind::text:
        if (c.ordering() && !parse_number(c.operand)) return "ordering comparator needs a numeric value";
        return {};
    }
    return {};
}

class Validator {
public:
    explicit Validator(const DeviceCatalog& catalog) : catalog_(catalog) {}

    void check_trigger(const GroundedTrigger& t) {
        if (text::trim(t.target).empty() || text::trim(t.interface).empty()) {
            add(ErrorCode::malformed_output, {}, {}, "trigger is missing its target or interface");
            return;
        }
        if (t.mode == TriggerMode::event && !t.delay.is_zero())
            add(ErrorCode::malformed_output, t.target, t.interface, "event trigger " + display(t) + " cannot carry a delay");

        const auto found = lookup_interface(catalog_, t.target, t.interface, InterfaceKind::query);
        using S = InterfaceLookup::Status;
        switch (found.status) {
        case S::unknown_target:
            add(ErrorCode::unknown_target, t.target, std::nullopt, "no device or sensor named '" + t.target + "'");
            return;
        case S::unknown_interface:
            add(ErrorCode::unknown_interface, t.target, t.interface,
                t.target + " has no query interface '" + t.interface + "' (available: " +
                    list_interfaces(*found.device, InterfaceKind::query) + ")");
            return;
        case S::wrong_kind:
            add(ErrorCode::unknown_interface, t.target, t.interface,
                "'" + t.interface + "' on " + t.target + " is an operation and cannot be used as a trigger (queries: " +
                    list_interfaces(*found.device, InterfaceKind::query) + ")");
            return;
        case S::found: break;
        }
        if (auto problem = condition_problem(*found.interface->returns, parse_condition(t.condition)); !problem.empty())
            add(ErrorCode::bad_condition, t.target, t.interface, t.target + "." + t.interface + ": " + problem);
    }

    void check_action(const GroundedAction& a) {
        if (text::trim(a.target).empty() || text::trim(a.interface).empty()) {
            add(ErrorCode::malformed_output, {}, {}, "action is missing its target or interface");
            return;
        }
        if (text::iequals(a.target, kTimerTarget)) {
            if (!text::iequals(a.interface, kTimerInterface)) {
                add(ErrorCode::unknown_interface, a.target, a.interface, "the timer only supports 'wait'");
                return;
            }
            auto d = Duration::try_parse(text::trim(a.parameter));
            if (!d || d->is_zero())
                add(ErrorCode::bad_parameter, a.target, a.interface,
                    "timer wait needs a positive duration such as 10mins, got '" + a.parameter + "'");
            return;
        }
        if (auto macro = parse_nearest_macro(a.target)) {
            check_macro_action(a, *macro);
            return;
        }
        if (!a.target.empty() && a.target.front() == '@') {
            add(ErrorCode::unknown_target, a.target, std::nullopt, "unsupported dynamic target '" + a.target + "'");
            return;
        }

        const auto found = lookup_interface(catalog_, a.target, a.interface, InterfaceKind::operation);
        using S = InterfaceLookup::Status;
        switch (found.status) {
        case S::unknown_target:
            add(ErrorCode::unknown_target, a.target, std::nullopt, "no device named '" + a.target + "'");
            return;
        case S::unknown_interface:
        case S::wrong_kind:
            add(ErrorCode::unknown_interface, a.target, a.interface,
                a.target + " has no operation '" + a.interface + "' (available: " +
                    list_interfaces(*found.device, InterfaceKind::operation) + ")");
            return;
        case S::found: break;
        }
        check_parameter(a, *found.interface);
    }

    void add(ErrorCode code, std::optional<std::string> target, std::optional<std::string> interface, std::string message) {
        GroundingError e{code, std::move(target), std::move(interface), std::move(message)};
        if (std::find(errors.begin(), errors.end(), e) == errors.end()) errors.push_back(std::move(e));
    }

    std::vector<GroundingError> errors;

private:
    void check_parameter(const GroundedAction& a, const DeviceInterface& op) {
        const auto& domain = op.params.front().domain;
        if (!domain.accepts(a.parameter))
            add(ErrorCode::bad_parameter, a.target, a.interface,
                a.target + "." + a.interface + ": '" + a.parameter + "' is not in " + domain.describe());
    }

    void check_macro_action(const GroundedAction& a, const NearestMacro& macro) {
        const auto any = nearest_candidates(catalog_, macro);
        if (any.empty()) {
            add(ErrorCode::unknown_target, a.target, std::nullopt, "no device matches kind '" + macro.kind + "'");
            return;
        }
        const auto usable = nearest_candidates(catalog_, macro, a.interface);
        if (usable.empty()) {
            add(ErrorCode::unknown_interface, a.target, a.interface,
                "no '" + macro.kind + "' device supports operation '" + a.interface + "'");
            return;
        }
        for (const auto* d : usable) check_parameter({a.target, a.interface, a.parameter}, *d->find(a.interface, InterfaceKind::operation));
    }

    const DeviceCatalog& catalog_;
};

} // namespace

GroundedRule validate_grounded(const DeviceCatalog& catalog, const GroundedRule& rule) {
    GroundedRule out = rule;
    Validator v(catalog);
    // Earlier findings (including the model's own infeasibility reasons) stay.
    for (const auto& e : rule.errors) v.add(e.code, e.target, e.interface, e.message);

    for (std::size_t i = 0; i < rule.ta_pairs.size(); ++i) {
        const auto& p = rule.ta_pairs[i];
        if (p.triggers.empty()) v.add(ErrorCode::malformed_output, {}, {}, "TA-pair " + std::to_string(i + 1) + " has no triggers");
        if (p.actions.empty()) v.add(ErrorCode::malformed_output, {}, {}, "TA-pair " + std::to_string(i + 1) + " has no actions");
        for (const auto& t : p.triggers) v.check_trigger(t);
        for (const auto& a : p.actions) v.check_action(a);
    }
    if (rule.operation != RuleOperation::remove && rule.ta_pairs.empty() && v.errors.empty())
        v.add(ErrorCode::malformed_output, {}, {}, "the grounded rule has no TA-pairs");

    out.errors = std::move(v.errors);
    out.feasible = out.errors.empty();
    return out;
}

} // namespace awareauto
