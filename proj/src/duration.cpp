#include "awareauto/duration.hpp"

#include "awareauto/error.hpp"

#include <charconv>

namespace awareauto {

std::string Duration::str() const {
    if (seconds_ == 0) return "0s";
    if (seconds_ % 3600 == 0) return std::to_string(seconds_ / 3600) + "h";
    if (seconds_ % 60 == 0) {
        const auto minutes = seconds_ / 60;
        return std::to_string(minutes) + (minutes == 1 ? "min" : "mins");
    }
    return std::to_string(seconds_) + "s";
}

std::optional<Duration> Duration::try_parse(std::string_view text) {
    std::size_t digits = 0;
    while (digits < text.size() && text[digits] >= '0' && text[digits] <= '9') ++digits;
    if (digits == 0 || digits > 12) return std::nullopt;

    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + digits, value);
    if (ec != std::errc{} || ptr != text.data() + digits) return std::nullopt;

    const auto unit = text.substr(digits);
    if (unit == "s") return Duration{value};
    if (unit == "min" || unit == "mins") return Duration{value * 60};
    if (unit == "h") return Duration{value * 3600};
    return std::nullopt;
}

Duration Duration::parse(std::string_view text) {
    if (auto d = try_parse(text)) return *d;
    throw InvalidArgument("invalid duration '" + std::string(text) + "' (expected <int><s|min|mins|h>)");
}

} // namespace awareauto
