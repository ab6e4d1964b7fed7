#include "awareauto/grounded.hpp"

#include "awareauto/error.hpp"
#include "awareauto/text.hpp"

#include <algorithm>
#include <set>

namespace awareauto {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string_view>& parts, std::size_t from, std::size_t to) {
    std::string out;
    for (std::size_t i = from; i < to; ++i) {
        if (i > from) out += '-';
        out += parts[i];
    }
    return out;
}

void require_piece(std::string_view piece, std::string_view what, std::string_view display) {
    if (text::trim(piece).empty())
        throw TupleError("malformed tuple '" + std::string(display) + "': empty " + std::string(what));
}

} // namespace

GroundedTrigger parse_trigger_tuple(std::string_view s) {
    const auto parts = text::split(s, '-');
    if (parts.size() < 4)
        throw TupleError("malformed tuple '" + std::string(s) + "': expected target-interface-condition-mode");
    GroundedTrigger t;
    require_piece(parts[0], "target", s);
    require_piece(parts[1], "interface", s);
    t.target = std::string(text::trim(parts[0]));
    t.interface = std::string(text::trim(parts[1]));
    t.condition = join(parts, 2, parts.size() - 1);
    require_piece(t.condition, "condition", s);

    auto mode = text::trim(parts.back());
    if (mode == "event") {
        t.mode = TriggerMode::event;
    } else if (mode == "state") {
        t.mode = TriggerMode::state;
    } else if (mode.substr(0, 6) == "state(" && mode.back() == ')') {
        t.mode = TriggerMode::state;
        auto d = Duration::try_parse(mode.substr(6, mode.size() - 7));
        if (!d) throw TupleError("malformed tuple '" + std::string(s) + "': bad delay");
        t.delay = *d;
    } else {
        throw TupleError("malformed tuple '" + std::string(s) + "': mode must be event, state or state(<duration>)");
    }
    return t;
}

GroundedAction parse_action_tuple(std::string_view s) {
    const auto parts = text::split(s, '-');
    if (parts.size() < 3)
        throw TupleError("malformed tuple '" + std::string(s) + "': expected target-interface-parameter");
    require_piece(parts[0], "target", s);
    require_piece(parts[1], "interface", s);
    GroundedAction a{std::string(text::trim(parts[0])), std::string(text::trim(parts[1])), join(parts, 2, parts.size())};
    require_piece(a.parameter, "parameter", s);
    return a;
}

std::string display(const GroundedTrigger& t) {
    std::string out = t.target + "-" + t.interface + "-" + t.condition + "-";
    if (t.mode == TriggerMode::event) return out + "event";
    if (t.delay.is_zero()) return out + "state";
    return out + "state(" + t.delay.str() + ")";
}

std::string display(const GroundedAction& a) { return a.target + "-" + a.interface + "-" + a.parameter; }

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

json to_json(const GroundedTrigger& t) {
    return {{"target", t.target}, {"interface", t.interface}, {"condition", t.condition},
            {"mode", to_string(t.mode)}, {"delay_s", t.delay.seconds()}};
}

json to_json(const GroundedAction& a) {
    return {{"target", a.target}, {"interface", a.interface}, {"parameter", a.parameter}};
}

json to_json(const GroundingError& e) {
    return {{"code", to_string(e.code)},
            {"target", e.target ? json(*e.target) : json(nullptr)},
            {"interface", e.interface ? json(*e.interface) : json(nullptr)},
            {"message", e.message}};
}

json to_json(const GroundedRule& rule) {
    json pairs = json::array();
    for (const auto& p : rule.ta_pairs) {
        json triggers = json::array();
        json actions = json::array();
        for (const auto& t : p.triggers) triggers.push_back(to_json(t));
        for (const auto& a : p.actions) actions.push_back(to_json(a));
        pairs.push_back({{"triggers", std::move(triggers)}, {"actions", std::move(actions)}});
    }
    json errors = json::array();
    for (const auto& e : rule.errors) errors.push_back(to_json(e));
    return {{"operation", to_string(rule.operation)},
            {"name", rule.name ? json(*rule.name) : json(nullptr)},
            {"feasible", rule.feasible},
            {"ta_pairs", std::move(pairs)},
            {"errors", std::move(errors)}};
}

namespace {

const json& member(const json& obj, const std::string& key, const std::string& ptr) {
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(ptr + "/" + key, "missing required field");
    return *it;
}

std::string string_field(const json& obj, const std::string& key, const std::string& ptr) {
    const auto& v = member(obj, key, ptr);
    if (v.is_string()) return v.get<std::string>();
    // Models sometimes emit numbers or booleans for conditions and parameters.
    if (v.is_number() || v.is_boolean()) return v.dump();
    throw SchemaError(ptr + "/" + key, "expected a string");
}

std::optional<std::string> optional_string(const json& obj, const std::string& key, const std::string& ptr) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw SchemaError(ptr + "/" + key, "expected a string or null");
    return it->get<std::string>();
}

const json& array_field(const json& obj, const std::string& key, const std::string& ptr) {
    const auto& v = member(obj, key, ptr);
    if (!v.is_array()) throw SchemaError(ptr + "/" + key, "expected an array");
    return v;
}

template <typename Fn>
auto wrap(const std::string& ptr, Fn&& fn) {
    try {
        return fn();
    } catch (const InvalidArgument& e) {
        throw SchemaError(ptr, e.what());
    }
}

} // namespace

GroundedRule grounded_from_json(const json& doc) {
    if (!doc.is_object()) throw SchemaError("", "expected a JSON object");
    GroundedRule rule;
    rule.operation = wrap("/operation", [&] { return parse_operation(string_field(doc, "operation", "")); });
    rule.name = optional_string(doc, "name", "");
    const auto& feasible = member(doc, "feasible", "");
    if (!feasible.is_boolean()) throw SchemaError("/feasible", "expected a boolean");
    rule.feasible = feasible.get<bool>();

    const auto& pairs = array_field(doc, "ta_pairs", "");
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto ptr = "/ta_pairs/" + std::to_string(i);
        if (!pairs[i].is_object()) throw SchemaError(ptr, "expected an object");
        TAPair pair;
        const auto& triggers = array_field(pairs[i], "triggers", ptr);
        for (std::size_t j = 0; j < triggers.size(); ++j) {
            const auto tptr = ptr + "/triggers/" + std::to_string(j);
            const auto& tj = triggers[j];
            if (!tj.is_object()) throw SchemaError(tptr, "expected an object");
            GroundedTrigger t;
            t.target = string_field(tj, "target", tptr);
            t.interface = string_field(tj, "interface", tptr);
            t.condition = string_field(tj, "condition", tptr);
            t.mode = wrap(tptr + "/mode", [&] { return parse_mode(string_field(tj, "mode", tptr)); });
            if (auto it = tj.find("delay_s"); it != tj.end() && !it->is_null()) {
                if (!it->is_number_integer() || it->get<long long>() < 0)
                    throw SchemaError(tptr + "/delay_s", "expected a non-negative integer");
                t.delay = Duration{it->get<long long>()};
            }
            pair.triggers.push_back(std::move(t));
        }
        const auto& actions = array_field(pairs[i], "actions", ptr);
        for (std::size_t j = 0; j < actions.size(); ++j) {
            const auto aptr = ptr + "/actions/" + std::to_string(j);
            if (!actions[j].is_object()) throw SchemaError(aptr, "expected an object");
            pair.actions.push_back({string_field(actions[j], "target", aptr), string_field(actions[j], "interface", aptr),
                                    string_field(actions[j], "parameter", aptr)});
        }
        rule.ta_pairs.push_back(std::move(pair));
    }

    if (auto it = doc.find("errors"); it != doc.end() && !it->is_null()) {
        if (!it->is_array()) throw SchemaError("/errors", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const auto ptr = "/errors/" + std::to_string(i);
            const auto& ej = (*it)[i];
            if (!ej.is_object()) throw SchemaError(ptr, "expected an object");
            GroundingError e;
            e.code = wrap(ptr + "/code", [&] { return parse_error_code(string_field(ej, "code", ptr)); });
            e.target = optional_string(ej, "target", ptr);
            e.interface = optional_string(ej, "interface", ptr);
            e.message = string_field(ej, "message", ptr);
            rule.errors.push_back(std::move(e));
        }
    }
    return rule;
}

GroundedRule parse_grounded_json(std::string_view s) {
    json doc = json::parse(s.begin(), s.end(), nullptr, false);
    if (doc.is_discarded()) throw SchemaError("", "not valid JSON");
    return grounded_from_json(doc);
}

std::string serialize_grounded_json(const GroundedRule& rule, int indent) { return to_json(rule).dump(indent); }

void check_invariants(const GroundedRule& rule) {
    auto fail = [](const std::string& msg) { throw InvalidArgument(msg); };
    if (rule.feasible) {
        if (!rule.errors.empty()) fail("feasible rule carries errors");
        if (rule.operation == RuleOperation::create && rule.ta_pairs.empty()) fail("feasible CREATE rule has no TA-pairs");
    } else if (rule.errors.empty()) {
        fail("infeasible rule must carry at least one error");
    }
    for (std::size_t i = 0; i < rule.ta_pairs.size(); ++i) {
        const auto& p = rule.ta_pairs[i];
        if (p.triggers.empty()) fail("TA-pair " + std::to_string(i) + " has no triggers");
        if (p.actions.empty()) fail("TA-pair " + std::to_string(i) + " has no actions");
        for (const auto& t : p.triggers)
            if (t.mode == TriggerMode::event && !t.delay.is_zero()) fail("event trigger with delay in TA-pair " + std::to_string(i));
    }
    for (const auto& e : rule.errors) {
        if (text::trim(e.message).empty()) fail("grounding error without message");
        const bool needs_target = e.code == ErrorCode::unknown_target || e.code == ErrorCode::unknown_interface ||
                                  e.code == ErrorCode::bad_condition || e.code == ErrorCode::bad_parameter;
        const bool needs_interface = e.code == ErrorCode::unknown_interface || e.code == ErrorCode::bad_condition ||
                                     e.code == ErrorCode::bad_parameter;
        if (needs_target && !e.target) fail(std::string(to_string(e.code)) + " requires a target");
        if (needs_interface && !e.interface) fail(std::string(to_string(e.code)) + " requires an interface");
    }
}

// ---------------------------------------------------------------------------
// Canonical form
// ---------------------------------------------------------------------------

namespace {

std::string fold(std::string_view s) { return text::lower(text::trim(s)); }

bool pair_less(const TAPair& a, const TAPair& b) {
    if (a.triggers != b.triggers) return a.triggers < b.triggers;
    return a.actions < b.actions;
}

} // namespace

GroundedRule canonicalize(const GroundedRule& rule) {
    GroundedRule out = rule;
    if (out.name) out.name = fold(*out.name);
    for (auto& p : out.ta_pairs) {
        for (auto& t : p.triggers) {
            t.target = fold(t.target);
            t.interface = fold(t.interface);
            t.condition = fold(t.condition);
        }
        for (auto& a : p.actions) {
            a.target = fold(a.target);
            a.interface = fold(a.interface);
            a.parameter = fold(a.parameter);
        }
        std::sort(p.triggers.begin(), p.triggers.end());
    }
    std::sort(out.ta_pairs.begin(), out.ta_pairs.end(), pair_less);
    for (auto& e : out.errors) {
        if (e.target) e.target = fold(*e.target);
        if (e.interface) e.interface = fold(*e.interface);
        e.message = std::string(text::trim(e.message));
    }
    std::sort(out.errors.begin(), out.errors.end(), [](const GroundingError& a, const GroundingError& b) {
        return std::tie(a.code, a.target, a.interface, a.message) < std::tie(b.code, b.target, b.interface, b.message);
    });
    return out;
}

bool rules_equivalent(const GroundedRule& a, const GroundedRule& b) {
    const auto ca = canonicalize(a);
    const auto cb = canonicalize(b);
    if (ca.operation != cb.operation || ca.name != cb.name || ca.feasible != cb.feasible) return false;
    if (!ca.feasible) {
        std::set<ErrorCode> codes_a, codes_b;
        for (const auto& e : ca.errors) codes_a.insert(e.code);
        for (const auto& e : cb.errors) codes_b.insert(e.code);
        if (codes_a != codes_b) return false;
    }
    return ca.ta_pairs == cb.ta_pairs;
}

} // namespace awareauto
