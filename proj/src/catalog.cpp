#include "awareauto/catalog.hpp"

#include "awareauto/condition.hpp"
#include "awareauto/error.hpp"
#include "awareauto/text.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace awareauto {

using nlohmann::json;

std::string format_number(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return ec == std::errc{} ? std::string(buf, ptr) : std::to_string(value);
}

bool Domain::accepts(std::string_view value) const {
    switch (kind) {
    case Kind::enumeration:
        for (const auto& v : values)
            if (text::iequals(v, text::trim(value))) return true;
        return false;
    case Kind::range: {
        auto n = parse_number(value);
        return n && *n >= min && *n <= max;
    }
    case Kind::text: return !text::trim(value).empty();
    }
    return false;
}

std::string Domain::describe() const {
    switch (kind) {
    case Kind::enumeration: {
        std::string out = "{";
        for (std::size_t i = 0; i < values.size(); ++i) out += (i ? ", " : "") + values[i];
        return out + "}";
    }
    case Kind::range: return "[" + format_number(min) + ", " + format_number(max) + "]";
    case Kind::text: return "<text>";
    }
    return "<text>";
}

std::string_view to_string(InterfaceKind kind) { return kind == InterfaceKind::query ? "query" : "operation"; }

const DeviceInterface* Device::find(std::string_view name, InterfaceKind kind) const {
    for (const auto& i : interfaces)
        if (i.kind == kind && text::iequals(i.name, name)) return &i;
    return nullptr;
}

const Device* DeviceCatalog::find(std::string_view target) const {
    for (const auto& d : devices)
        if (text::iequals(d.target, text::trim(target))) return &d;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Catalog JSON
// ---------------------------------------------------------------------------

namespace {

const json& require(const json& obj, const std::string& key, const std::string& ptr) {
    if (!obj.is_object()) throw SchemaError(ptr, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(ptr + "/" + key, "missing required field");
    return *it;
}

std::string require_string(const json& obj, const std::string& key, const std::string& ptr, bool non_empty = true) {
    const auto& v = require(obj, key, ptr);
    if (!v.is_string()) throw SchemaError(ptr + "/" + key, "expected a string");
    auto s = v.get<std::string>();
    if (non_empty && text::trim(s).empty()) throw SchemaError(ptr + "/" + key, "must not be empty");
    return s;
}

double require_number(const json& obj, const std::string& key, const std::string& ptr) {
    const auto& v = require(obj, key, ptr);
    if (!v.is_number()) throw SchemaError(ptr + "/" + key, "expected a number");
    return v.get<double>();
}

Domain domain_from_json(const json& j, const std::string& ptr) {
    const auto type = require_string(j, "type", ptr);
    if (type == "enum") {
        const auto& values = require(j, "values", ptr);
        if (!values.is_array() || values.empty()) throw SchemaError(ptr + "/values", "expected a non-empty array");
        Domain d = Domain::enumeration_of({});
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!values[i].is_string()) throw SchemaError(ptr + "/values/" + std::to_string(i), "expected a string");
            d.values.push_back(values[i].get<std::string>());
        }
        return d;
    }
    if (type == "range") {
        auto d = Domain::range_of(require_number(j, "min", ptr), require_number(j, "max", ptr));
        if (d.min > d.max) throw SchemaError(ptr, "min exceeds max");
        return d;
    }
    if (type == "text") return Domain::free_text();
    throw SchemaError(ptr + "/type", "expected enum, range or text");
}

json domain_to_json(const Domain& d) {
    switch (d.kind) {
    case Domain::Kind::enumeration: return {{"type", "enum"}, {"values", d.values}};
    case Domain::Kind::range: return {{"type", "range"}, {"min", d.min}, {"max", d.max}};
    case Domain::Kind::text: return {{"type", "text"}};
    }
    return {{"type", "text"}};
}

DeviceInterface interface_from_json(const json& j, const std::string& ptr) {
    DeviceInterface i;
    i.name = require_string(j, "name", ptr);
    if (i.name.find('-') != std::string::npos) throw SchemaError(ptr + "/name", "interface names may not contain '-'");
    const auto kind = require_string(j, "kind", ptr);
    if (kind == "query") i.kind = InterfaceKind::query;
    else if (kind == "operation") i.kind = InterfaceKind::operation;
    else throw SchemaError(ptr + "/kind", "expected query or operation");

    const auto& params = require(j, "params", ptr);
    if (!params.is_array()) throw SchemaError(ptr + "/params", "expected an array");
    for (std::size_t k = 0; k < params.size(); ++k) {
        const auto pptr = ptr + "/params/" + std::to_string(k);
        i.params.push_back({require_string(params[k], "name", pptr), domain_from_json(require(params[k], "domain", pptr), pptr + "/domain")});
    }
    const auto& returns = require(j, "returns", ptr);
    if (!returns.is_null()) i.returns = domain_from_json(returns, ptr + "/returns");
    i.description = require_string(j, "description", ptr);

    if (i.kind == InterfaceKind::query && !i.returns) throw SchemaError(ptr + "/returns", "query interfaces must declare returns");
    if (i.kind == InterfaceKind::operation && i.params.empty())
        throw SchemaError(ptr + "/params", "operation interfaces must declare parameters");
    return i;
}

} // namespace

DeviceCatalog load_catalog(const json& doc) {
    DeviceCatalog catalog;
    const auto& rooms = require(doc, "rooms", "");
    if (!rooms.is_array()) throw SchemaError("/rooms", "expected an array");
    for (std::size_t i = 0; i < rooms.size(); ++i) {
        if (!rooms[i].is_string()) throw SchemaError("/rooms/" + std::to_string(i), "expected a string");
        catalog.rooms.push_back(rooms[i].get<std::string>());
    }

    const auto& devices = require(doc, "devices", "");
    if (!devices.is_array()) throw SchemaError("/devices", "expected an array");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < devices.size(); ++i) {
        const auto ptr = "/devices/" + std::to_string(i);
        Device d;
        d.target = require_string(devices[i], "target", ptr);
        if (d.target.find('-') != std::string::npos) throw SchemaError(ptr + "/target", "targets may not contain '-'");
        if (!seen.insert(text::lower(d.target)).second)
            throw InvalidArgument("duplicate target '" + d.target + "' at " + ptr);
        d.room = require_string(devices[i], "room", ptr);
        bool room_known = false;
        for (const auto& r : catalog.rooms) room_known = room_known || r == d.room;
        if (!room_known) throw SchemaError(ptr + "/room", "unknown room '" + d.room + "'");
        d.position = require_string(devices[i], "position", ptr, false);
        const auto& interfaces = require(devices[i], "interfaces", ptr);
        if (!interfaces.is_array() || interfaces.empty()) throw SchemaError(ptr + "/interfaces", "expected a non-empty array");
        for (std::size_t k = 0; k < interfaces.size(); ++k)
            d.interfaces.push_back(interface_from_json(interfaces[k], ptr + "/interfaces/" + std::to_string(k)));
        catalog.devices.push_back(std::move(d));
    }
    return catalog;
}

DeviceCatalog load_catalog_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open catalog file '" + path + "'");
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw SchemaError("", "catalog file '" + path + "' is not valid JSON");
    return load_catalog(doc);
}

json save_catalog(const DeviceCatalog& catalog) {
    json devices = json::array();
    for (const auto& d : catalog.devices) {
        json interfaces = json::array();
        for (const auto& i : d.interfaces) {
            json params = json::array();
            for (const auto& p : i.params) params.push_back({{"name", p.name}, {"domain", domain_to_json(p.domain)}});
            interfaces.push_back({{"name", i.name},
                                  {"kind", to_string(i.kind)},
                                  {"params", std::move(params)},
                                  {"returns", i.returns ? domain_to_json(*i.returns) : json(nullptr)},
                                  {"description", i.description}});
        }
        devices.push_back({{"target", d.target}, {"room", d.room}, {"position", d.position}, {"interfaces", std::move(interfaces)}});
    }
    return {{"rooms", catalog.rooms}, {"devices", std::move(devices)}};
}

ContextSnapshot snapshot_from_json(const json& doc) {
    ContextSnapshot s;
    s.time = require_string(doc, "time", "");
    s.weekday = require_string(doc, "weekday", "");
    s.temperature = require_number(doc, "temperature", "");
    s.humidity = require_number(doc, "humidity", "");
    if (auto it = doc.find("device_states"); it != doc.end() && !it->is_null()) {
        if (!it->is_object()) throw SchemaError("/device_states", "expected an object");
        for (const auto& [target, states] : it->items()) {
            if (!states.is_object()) throw SchemaError("/device_states/" + target, "expected an object");
            for (const auto& [iface, value] : states.items()) {
                if (value.is_string()) s.device_states[target][iface] = value.get<std::string>();
                else if (value.is_number() || value.is_boolean()) s.device_states[target][iface] = value.dump();
                else throw SchemaError("/device_states/" + target + "/" + iface, "expected a scalar");
            }
        }
    }
    return s;
}

json to_json(const ContextSnapshot& s) {
    json states = json::object();
    for (const auto& [target, ifaces] : s.device_states)
        for (const auto& [iface, value] : ifaces) states[target][iface] = value;
    return {{"time", s.time}, {"weekday", s.weekday}, {"temperature", s.temperature}, {"humidity", s.humidity},
            {"device_states", std::move(states)}};
}

// ---------------------------------------------------------------------------

InterfaceLookup lookup_interface(const DeviceCatalog& catalog, std::string_view target, std::string_view interface,
                                 InterfaceKind kind) {
    InterfaceLookup result;
    result.device = catalog.find(target);
    if (!result.device) return result;
    result.interface = result.device->find(interface, kind);
    if (result.interface) {
        result.status = InterfaceLookup::Status::found;
        return result;
    }
    const auto other = kind == InterfaceKind::query ? InterfaceKind::operation : InterfaceKind::query;
    result.status = result.device->find(interface, other) ? InterfaceLookup::Status::wrong_kind
                                                          : InterfaceLookup::Status::unknown_interface;
    return result;
}

std::optional<NearestMacro> parse_nearest_macro(std::string_view target) {
    target = text::trim(target);
    constexpr std::string_view head = "@nearest(";
    if (!text::starts_with_ci(target, head) || target.back() != ')') return std::nullopt;
    auto args = text::split(target.substr(head.size(), target.size() - head.size() - 1), ',');
    if (args.size() != 2) return std::nullopt;
    NearestMacro m{text::lower(text::trim(args[0])), text::lower(text::trim(args[1]))};
    if (m.kind.empty() || m.anchor != "user") return std::nullopt;
    return m;
}

std::vector<const Device*> nearest_candidates(const DeviceCatalog& catalog, const NearestMacro& macro,
                                              std::string_view operation) {
    std::vector<const Device*> out;
    for (const auto& d : catalog.devices) {
        if (!text::contains_ci(d.target, macro.kind)) continue;
        if (!operation.empty() && !d.find(operation, InterfaceKind::operation)) continue;
        out.push_back(&d);
    }
    return out;
}

const Device* pick_nearest(const std::vector<const Device*>& candidates, std::string_view location) {
    location = text::trim(location);
    if (location.empty() || text::iequals(location, "none")) return nullptr;
    for (const auto* d : candidates)
        if (text::contains_ci(d->position, location)) return d;
    return nullptr;
}

std::string render_scenario_text(const DeviceCatalog& catalog, const ContextSnapshot& snapshot, ScenarioDetail detail) {
    std::ostringstream out;
    out << "Rooms: ";
    if (catalog.rooms.empty()) out << "(none)";
    for (std::size_t i = 0; i < catalog.rooms.size(); ++i) out << (i ? ", " : "") << catalog.rooms[i];
    out << "\nDevices:\n";
    for (const auto& d : catalog.devices) {
        out << "- " << d.target << " (" << d.room;
        if (!d.position.empty()) out << ", " << d.position;
        out << ")\n";
        if (detail == ScenarioDetail::layout_only) continue;

        const auto states = snapshot.device_states.find(d.target);
        for (auto kind : {InterfaceKind::query, InterfaceKind::operation}) {
            for (const auto& i : d.interfaces) {
                if (i.kind != kind) continue;
                out << "  " << (kind == InterfaceKind::query ? "query " : "operation ") << i.name;
                if (kind == InterfaceKind::query) {
                    out << " -> " << i.returns->describe();
                } else {
                    out << "(";
                    for (std::size_t k = 0; k < i.params.size(); ++k)
                        out << (k ? ", " : "") << i.params[k].name << ": " << i.params[k].domain.describe();
                    out << ")";
                }
                out << ": " << i.description;
                if (kind == InterfaceKind::query && states != snapshot.device_states.end()) {
                    if (auto v = states->second.find(i.name); v != states->second.end()) out << " (current: " << v->second << ")";
                }
                out << "\n";
            }
        }
    }
    return out.str();
}

} // namespace awareauto
