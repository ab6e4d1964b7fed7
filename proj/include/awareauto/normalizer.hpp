#pragma once

#include "awareauto/catalog.hpp"

#include "json.hpp"

#include <optional>
#include <string>

namespace awareauto {

/// One multimodal user input. Positions and gesture targets arrive already
/// resolved to names (e.g. "sofa", "ceiling light").
struct UserExpression {
    std::optional<std::string> posture_activity;
    std::optional<std::string> position;
    std::optional<std::string> orientation;
    std::optional<std::string> gesture;
    std::optional<std::string> gesture_target;
    std::string speech;

    friend bool operator==(const UserExpression&, const UserExpression&) = default;
};

UserExpression expression_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const UserExpression& expr);

// "The user sits on the sofa, points towards ceiling light, and says, "..."".
// Throws InvalidArgument for empty speech or a gesture target without gesture.
std::string describe_expression(const UserExpression& expr);

// "Context: time=<HH:MM weekday>, temperature=<n>C, humidity=<n>%." plus an
// optional "Device states: target.interface=value; ..." line.
std::string render_context_block(const ContextSnapshot& snapshot);

// Context block followed by the expression sentence.
std::string normalize_expression(const UserExpression& expr, const ContextSnapshot& snapshot);

} // namespace awareauto
