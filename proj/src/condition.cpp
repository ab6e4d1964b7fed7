#include "awareauto/condition.hpp"

#include "awareauto/text.hpp"

#include <charconv>

namespace awareauto {

std::optional<double> parse_number(std::string_view s) {
    s = text::trim(s);
    if (s.empty()) return std::nullopt;
    double value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

Condition parse_condition(std::string_view s) {
    s = text::trim(s);
    Condition c;
    struct Prefix {
        std::string_view token;
        Comparator op;
    };
    // Two-character operators first.
    static constexpr Prefix prefixes[] = {{"!=", Comparator::ne}, {"<=", Comparator::le}, {">=", Comparator::ge},
                                          {"=", Comparator::eq},  {"<", Comparator::lt},  {">", Comparator::gt}};
    for (const auto& p : prefixes) {
        if (s.substr(0, p.token.size()) == p.token) {
            c.op = p.op;
            c.bare = false;
            c.operand = std::string(text::trim(s.substr(p.token.size())));
            return c;
        }
    }
    c.operand = std::string(s);
    return c;
}

bool Condition::holds(std::string_view value) const {
    const auto lhs = parse_number(value);
    const auto rhs = parse_number(operand);
    if (lhs && rhs) {
        switch (op) {
        case Comparator::eq: return *lhs == *rhs;
        case Comparator::ne: return *lhs != *rhs;
        case Comparator::lt: return *lhs < *rhs;
        case Comparator::le: return *lhs <= *rhs;
        case Comparator::gt: return *lhs > *rhs;
        case Comparator::ge: return *lhs >= *rhs;
        }
    }
    switch (op) {
    case Comparator::eq: return text::iequals(text::trim(value), operand);
    case Comparator::ne: return !text::iequals(text::trim(value), operand);
    default: return false;
    }
}

} // namespace awareauto
