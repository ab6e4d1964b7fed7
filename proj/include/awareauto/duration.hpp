#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace awareauto {

/// Whole-second time span. Surface forms are `<int><unit>` with unit one of
/// `s`, `min`, `mins`, `h`; the canonical rendering picks the largest unit that
/// divides evenly (600 -> "10mins", 60 -> "1min", 7200 -> "2h").
class Duration {
public:
    constexpr Duration() = default;
    constexpr explicit Duration(std::int64_t seconds) : seconds_(seconds < 0 ? 0 : seconds) {}

    static constexpr Duration zero() { return Duration{}; }

    constexpr std::int64_t seconds() const { return seconds_; }
    constexpr bool is_zero() const { return seconds_ == 0; }

    std::string str() const;

    // Returns nullopt for anything that is not exactly `<digits><unit>`.
    static std::optional<Duration> try_parse(std::string_view text);
    // Throws InvalidArgument.
    static Duration parse(std::string_view text);

    friend constexpr auto operator<=>(const Duration&, const Duration&) = default;

private:
    std::int64_t seconds_ = 0;
};

} // namespace awareauto
