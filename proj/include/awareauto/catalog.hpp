#pragma once

#include "json.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace awareauto {

/// Value domain of an interface parameter or query result.
struct Domain {
    enum class Kind { enumeration, range, text };

    Kind kind = Kind::text;
    std::vector<std::string> values;  // enumeration
    double min = 0;                   // range
    double max = 0;

    static Domain enumeration_of(std::vector<std::string> values) { return {Kind::enumeration, std::move(values), 0, 0}; }
    static Domain range_of(double lo, double hi) { return {Kind::range, {}, lo, hi}; }
    static Domain free_text() { return {}; }

    // Enumerations match case-insensitively; ranges need a number in [min, max].
    bool accepts(std::string_view value) const;
    // "{on, off}", "[0, 100]", "<text>"
    std::string describe() const;

    friend bool operator==(const Domain&, const Domain&) = default;
};

enum class InterfaceKind { query, operation };

std::string_view to_string(InterfaceKind kind);

struct InterfaceParam {
    std::string name;
    Domain domain;

    friend bool operator==(const InterfaceParam&, const InterfaceParam&) = default;
};

struct DeviceInterface {
    std::string name;
    InterfaceKind kind = InterfaceKind::query;
    std::vector<InterfaceParam> params;
    std::optional<Domain> returns;
    std::string description;

    friend bool operator==(const DeviceInterface&, const DeviceInterface&) = default;
};

struct Device {
    std::string target;
    std::string room;
    std::string position;
    std::vector<DeviceInterface> interfaces;

    const DeviceInterface* find(std::string_view name, InterfaceKind kind) const;

    friend bool operator==(const Device&, const Device&) = default;
};

struct DeviceCatalog {
    std::vector<std::string> rooms;
    std::vector<Device> devices;

    // Case-insensitive on the target name.
    const Device* find(std::string_view target) const;

    friend bool operator==(const DeviceCatalog&, const DeviceCatalog&) = default;
};

/// Environment state at the moment of an expression.
struct ContextSnapshot {
    std::string time = "00:00";  // HH:MM
    std::string weekday = "Monday";
    double temperature = 0;  // degrees C
    double humidity = 0;     // percent
    std::map<std::string, std::map<std::string, std::string>> device_states;

    friend bool operator==(const ContextSnapshot&, const ContextSnapshot&) = default;
};

// Throws SchemaError (JSON pointer + reason) or InvalidArgument for
// duplicate targets and unknown rooms.
DeviceCatalog load_catalog(const nlohmann::json& doc);
DeviceCatalog load_catalog_file(const std::string& path);
nlohmann::json save_catalog(const DeviceCatalog& catalog);

ContextSnapshot snapshot_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ContextSnapshot& snapshot);

struct InterfaceLookup {
    enum class Status { found, unknown_target, unknown_interface, wrong_kind };

    Status status = Status::unknown_target;
    const Device* device = nullptr;
    const DeviceInterface* interface = nullptr;

    explicit operator bool() const { return status == Status::found; }
};

InterfaceLookup lookup_interface(const DeviceCatalog& catalog, std::string_view target, std::string_view interface,
                                 InterfaceKind kind);

// ---------------------------------------------------------------------------
// Dynamic targets: an action target `@nearest(<device-kind>, user)` is chosen
// when the action runs, from the devices whose name contains <device-kind>
// and whose position mentions the user's current location.
// ---------------------------------------------------------------------------

struct NearestMacro {
    std::string kind;
    std::string anchor;  // only "user" is defined
};

std::optional<NearestMacro> parse_nearest_macro(std::string_view target);

// Devices matching the macro's kind, optionally restricted to those with the
// given operation interface. Catalog order.
std::vector<const Device*> nearest_candidates(const DeviceCatalog& catalog, const NearestMacro& macro,
                                              std::string_view operation = {});

// The query interface whose value is the user's location.
inline constexpr std::string_view kUserLocationInterface = "userLocation";

// First candidate whose position mentions `location`; nullptr when none does.
const Device* pick_nearest(const std::vector<const Device*>& candidates, std::string_view location);

enum class ScenarioDetail { layout_only, layout_and_interfaces };

std::string render_scenario_text(const DeviceCatalog& catalog, const ContextSnapshot& snapshot, ScenarioDetail detail);

// Shortest decimal rendering: 26 -> "26", 26.5 -> "26.5".
std::string format_number(double value);

} // namespace awareauto
