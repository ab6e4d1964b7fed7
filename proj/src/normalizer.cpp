#include "awareauto/normalizer.hpp"

#include "awareauto/error.hpp"
#include "awareauto/text.hpp"

namespace awareauto {

using nlohmann::json;

namespace {

std::optional<std::string> optional_field(const json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw SchemaError(std::string("/") + key, "expected a string or null");
    auto value = std::string(text::trim(it->get<std::string>()));
    if (value.empty()) return std::nullopt;
    return value;
}

bool present(const std::optional<std::string>& s) { return s && !text::trim(*s).empty(); }

// "sofa" -> "the sofa"; phrases that already carry a determiner stay as is.
std::string with_article(std::string_view place) {
    place = text::trim(place);
    for (std::string_view det : {"the ", "a ", "an ", "my ", "his ", "her ", "their "})
        if (text::starts_with_ci(place, det)) return std::string(place);
    return "the " + std::string(place);
}

} // namespace

UserExpression expression_from_json(const json& doc) {
    if (!doc.is_object()) throw SchemaError("", "expected a JSON object");
    UserExpression e;
    e.posture_activity = optional_field(doc, "posture_activity");
    e.position = optional_field(doc, "position");
    e.orientation = optional_field(doc, "orientation");
    e.gesture = optional_field(doc, "gesture");
    e.gesture_target = optional_field(doc, "gesture_target");
    auto speech = doc.find("speech");
    if (speech == doc.end()) throw SchemaError("/speech", "missing required field");
    if (!speech->is_string()) throw SchemaError("/speech", "expected a string");
    e.speech = speech->get<std::string>();
    if (text::trim(e.speech).empty()) throw SchemaError("/speech", "must not be empty");
    if (e.gesture_target && !e.gesture) throw SchemaError("/gesture_target", "requires a gesture");
    return e;
}

json to_json(const UserExpression& e) {
    auto opt = [](const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); };
    return {{"posture_activity", opt(e.posture_activity)}, {"position", opt(e.position)},
            {"orientation", opt(e.orientation)},           {"gesture", opt(e.gesture)},
            {"gesture_target", opt(e.gesture_target)},     {"speech", e.speech}};
}

std::string describe_expression(const UserExpression& e) {
    if (text::trim(e.speech).empty()) throw InvalidArgument("speech must not be empty");
    if (present(e.gesture_target) && !present(e.gesture)) throw InvalidArgument("gesture_target requires a gesture");

    std::vector<std::string> clauses;
    std::string stance;
    if (present(e.posture_activity)) stance = std::string(text::trim(*e.posture_activity));
    if (present(e.position)) stance += (stance.empty() ? "is on " : " on ") + with_article(*e.position);
    if (!stance.empty()) clauses.push_back(std::move(stance));
    if (present(e.orientation)) clauses.emplace_back(text::trim(*e.orientation));
    if (present(e.gesture)) {
        std::string g(text::trim(*e.gesture));
        if (present(e.gesture_target)) g += " towards " + std::string(text::trim(*e.gesture_target));
        clauses.push_back(std::move(g));
    }
    clauses.push_back("says, \"" + e.speech + "\"");

    std::string out = "The user ";
    if (clauses.size() == 1) return out + clauses[0];
    if (clauses.size() == 2) return out + clauses[0] + " and " + clauses[1];
    for (std::size_t i = 0; i + 1 < clauses.size(); ++i) out += clauses[i] + ", ";
    return out + "and " + clauses.back();
}

std::string render_context_block(const ContextSnapshot& s) {
    std::string out = "Context: time=" + s.time + " " + s.weekday + ", temperature=" + format_number(s.temperature) +
                      "C, humidity=" + format_number(s.humidity) + "%.";
    std::string states;
    for (const auto& [target, ifaces] : s.device_states)
        for (const auto& [iface, value] : ifaces) states += (states.empty() ? "" : "; ") + target + "." + iface + "=" + value;
    if (!states.empty()) out += "\nDevice states: " + states + ".";
    return out;
}

std::string normalize_expression(const UserExpression& expr, const ContextSnapshot& snapshot) {
    auto sentence = describe_expression(expr);
    return render_context_block(snapshot) + "\n" + sentence;
}

} // namespace awareauto
