#include "random_scenarios.hpp"

#include "awareauto/grounded.hpp"

#include <algorithm>
#include <sstream>

namespace awareauto::testing {

namespace {

DeviceInterface q(std::string name, Domain d) { return {std::move(name), InterfaceKind::query, {}, std::move(d), "reads it"}; }
DeviceInterface op(std::string name, Domain d) {
    return {std::move(name), InterfaceKind::operation, {{"value", std::move(d)}}, std::nullopt, "sets it"};
}

struct Readable {
    std::string target, interface;
    Domain domain;
};

std::vector<Readable> readables(const DeviceCatalog& c) {
    std::vector<Readable> out;
    for (const auto& d : c.devices)
        for (const auto& i : d.interfaces)
            if (i.kind == InterfaceKind::query) out.push_back({d.target, i.name, *i.returns});
    return out;
}

std::vector<Readable> writables(const DeviceCatalog& c) {
    std::vector<Readable> out;
    for (const auto& d : c.devices)
        for (const auto& i : d.interfaces)
            if (i.kind == InterfaceKind::operation) out.push_back({d.target, i.name, i.params.front().domain});
    return out;
}

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

std::string value_in(std::mt19937_64& rng, const Domain& d) {
    if (d.kind == Domain::Kind::enumeration) return pick(rng, d.values);
    return std::to_string(uniform(rng, static_cast<int>(d.min), static_cast<int>(d.max)));
}

std::string condition_for(std::mt19937_64& rng, const Domain& d) {
    const int roll = uniform(rng, 0, 9);
    if (roll == 0) return "";
    if (d.kind == Domain::Kind::enumeration) return (roll <= 2 ? "!=" : "") + value_in(rng, d);
    static const std::vector<std::string> ops = {"", ">", ">=", "<", "<=", "!="};
    return pick(rng, ops) + value_in(rng, d);
}

} // namespace

DeviceCatalog oracle_catalog() {
    const auto on_off = Domain::enumeration_of({"on", "off"});
    DeviceCatalog c;
    c.rooms = {"room"};
    c.devices = {
        {"motion sensor", "room", "ceiling", {q("presence", Domain::enumeration_of({"yes", "no"})),
                                              q("zone", Domain::enumeration_of({"a", "b", "c"}))}},
        {"thermo", "room", "wall", {q("temp", Domain::range_of(0, 10))}},
        {"lamp", "room", "table", {q("switch", on_off), op("switch", on_off), q("level", Domain::range_of(0, 10)),
                                   op("level", Domain::range_of(0, 10))}},
        {"fan", "room", "floor", {q("switch", on_off), op("switch", on_off)}},
    };
    return c;
}

Scenario random_scenario(std::mt19937_64& rng, const ScenarioLimits& limits) {
    static const auto catalog = oracle_catalog();
    static const auto reads = readables(catalog);
    static const auto writes = writables(catalog);
    static const std::vector<std::int64_t> delays = {0, 0, 0, 1, 5, 30, 60, 120, 300, 600, 900};
    static const std::vector<std::int64_t> waits = {1, 2, 10, 60, 90, 300, 600, 900};

    Scenario s;
    s.horizon = std::uniform_int_distribution<std::int64_t>(30, limits.max_horizon)(rng);

    const int rules = uniform(rng, 1, limits.max_rules);
    for (int r = 0; r < rules; ++r) {
        GroundedRule rule;
        rule.feasible = true;
        const int pairs = uniform(rng, 1, limits.max_pairs);
        for (int p = 0; p < pairs; ++p) {
            TAPair pair;
            const int triggers = uniform(rng, 1, limits.max_triggers);
            for (int t = 0; t < triggers; ++t) {
                const auto& src = pick(rng, reads);
                GroundedTrigger trig{src.target, src.interface, condition_for(rng, src.domain), TriggerMode::state, {}};
                if (chance(rng, 0.35)) {
                    trig.mode = TriggerMode::event;
                } else {
                    auto d = pick(rng, delays);
                    trig.delay = Duration(std::min(d, limits.max_delay));
                }
                pair.triggers.push_back(std::move(trig));
            }
            const int steps = uniform(rng, 1, limits.max_steps);
            for (int a = 0; a < steps; ++a) {
                if (a > 0 && chance(rng, 0.35)) {
                    pair.actions.push_back({"timer", "wait", Duration(pick(rng, waits)).str()});
                } else {
                    const auto& dst = pick(rng, writes);
                    pair.actions.push_back({dst.target, dst.interface, value_in(rng, dst.domain)});
                }
            }
            rule.ta_pairs.push_back(std::move(pair));
        }
        s.rules.push_back(std::move(rule));
    }

    for (const auto& src : reads)
        if (chance(rng, 0.5)) s.initial[src.target][src.interface] = value_in(rng, src.domain);

    const int inputs = uniform(rng, 0, limits.max_inputs);
    std::vector<std::int64_t> times;
    for (int i = 0; i < inputs; ++i) {
        // Bursts at the same instant and inputs exactly on likely wake times
        // are where ordering bugs hide.
        if (!times.empty() && chance(rng, 0.2))
            times.push_back(times.back());
        else if (chance(rng, 0.2))
            times.push_back(std::min(s.horizon, pick(rng, delays) + pick(rng, waits)));
        else
            times.push_back(std::uniform_int_distribution<std::int64_t>(0, s.horizon)(rng));
    }
    std::stable_sort(times.begin(), times.end());
    for (auto at : times) {
        const auto& src = pick(rng, reads);
        s.inputs.push_back({at, src.target, src.interface, value_in(rng, src.domain),
                            chance(rng, 0.5) ? SimEvent::Kind::event : SimEvent::Kind::state});
    }
    return s;
}

std::string describe(const Scenario& s) {
    std::ostringstream out;
    out << "horizon " << s.horizon << "\n";
    for (const auto& [target, values] : s.initial)
        for (const auto& [interface, value] : values) out << "init " << target << "." << interface << "=" << value << "\n";
    for (std::size_t r = 0; r < s.rules.size(); ++r)
        for (std::size_t p = 0; p < s.rules[r].ta_pairs.size(); ++p) {
            out << "rule " << r << " pair " << p << ":";
            for (const auto& t : s.rules[r].ta_pairs[p].triggers) out << " [" << display(t) << "]";
            out << " ->";
            for (const auto& a : s.rules[r].ta_pairs[p].actions) out << " [" << display(a) << "]";
            out << "\n";
        }
    for (const auto& e : s.inputs)
        out << "t=" << e.at << " " << (e.kind == SimEvent::Kind::event ? "event " : "state ") << e.target << "."
            << e.interface << "=" << e.value << "\n";
    return out.str();
}

std::string describe(const ActionTrace& trace) {
    std::ostringstream out;
    for (const auto& e : trace)
        out << "t=" << e.at << " " << e.target << "." << e.interface << "=" << e.parameter << " (" << e.rule << "#"
            << e.pair << ")\n";
    return out.str();
}

} // namespace awareauto::testing
