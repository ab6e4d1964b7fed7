#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace awareauto {

enum class Comparator { eq, ne, lt, le, gt, ge };

/// A trigger condition: `on`, `=on`, `!=off`, `<20`, `>=26.5`. A bare literal
/// means equality. Ordering comparators only hold for numeric values;
/// equality falls back to case-insensitive text comparison.
struct Condition {
    Comparator op = Comparator::eq;
    std::string operand;
    bool bare = true;

    bool ordering() const { return op == Comparator::lt || op == Comparator::le || op == Comparator::gt || op == Comparator::ge; }
    bool holds(std::string_view value) const;
};

Condition parse_condition(std::string_view text);
std::optional<double> parse_number(std::string_view text);

} // namespace awareauto
