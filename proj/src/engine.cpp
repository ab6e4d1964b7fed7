#include "awareauto/engine.hpp"

#include "awareauto/text.hpp"

#include <algorithm>
#include <tuple>

namespace awareauto {

void VirtualClock::advance_to(std::int64_t to) {
    if (to < now_) throw InvalidArgument("time " + std::to_string(to) + " is before now (" + std::to_string(now_) + ")");
    now_ = to;
}

Engine::Engine(DeviceCatalog catalog, std::map<std::string, std::map<std::string, std::string>> initial_states)
    : catalog_(std::move(catalog)) {
    for (auto& [target, values] : initial_states)
        for (auto& [interface, value] : values) store_[resolve_query(target, interface)] = std::move(value);
}

Engine::Key Engine::resolve_query(std::string_view target, std::string_view interface) const {
    const auto found = lookup_interface(catalog_, target, interface, InterfaceKind::query);
    if (!found) {
        if (!found.device) throw NotFound("unknown target '" + std::string(target) + "'");
        throw NotFound(found.device->target + " has no query interface '" + std::string(interface) + "'");
    }
    Key key{text::lower(found.device->target), text::lower(found.interface->name)};
    spelling_.try_emplace(key, found.device->target, found.interface->name);
    return key;
}

// ---------------------------------------------------------------------------
// Deployment
// ---------------------------------------------------------------------------

namespace {

// Rules may claim feasibility without having been validated.
void check_parameter(const DeviceInterface& op, const GroundedAction& a) {
    const auto& domain = op.params.front().domain;
    if (domain.accepts(a.parameter)) return;
    const auto message = a.target + "." + a.interface + ": '" + a.parameter + "' is not in " + domain.describe();
    throw DeploymentError(message, {{ErrorCode::bad_parameter, a.target, a.interface, message}});
}

} // namespace

std::string Engine::deploy(const GroundedRule& rule) {
    if (!rule.feasible)
        throw DeploymentError("rule is not feasible" + (rule.errors.empty() ? std::string() : ": " + rule.errors.front().message),
                              rule.errors);
    if (rule.ta_pairs.empty()) throw DeploymentError("rule has no TA-pairs");

    Deployed d;
    if (rule.name && !text::trim(*rule.name).empty()) {
        d.key = std::string(text::trim(*rule.name));
        if (lookup(d.key)) throw DeploymentError("a rule named '" + d.key + "' is already deployed");
    } else {
        do d.key = "rule-" + std::to_string(++generated_ids_);
        while (lookup(d.key));
    }
    d.seq = next_deploy_seq_++;
    d.rule = rule;

    for (const auto& p : rule.ta_pairs) {
        if (p.triggers.empty() || p.actions.empty()) throw DeploymentError("TA-pair without triggers or actions");
        PairState ps;
        for (const auto& t : p.triggers) {
            TriggerState ts;
            try {
                ts.key = resolve_query(t.target, t.interface);
            } catch (const NotFound& e) {
                throw DeploymentError(e.what());
            }
            ts.mode = t.mode;
            ts.delay = t.delay.seconds();
            ts.condition = std::string(text::trim(t.condition));
            ts.parsed = parse_condition(ts.condition);
            if (ts.mode == TriggerMode::event) ps.has_event = true;
            ps.triggers.push_back(std::move(ts));
        }
        for (const auto& a : p.actions) {
            if (text::iequals(a.target, kTimerTarget) && text::iequals(a.interface, kTimerInterface)) {
                if (!Duration::try_parse(text::trim(a.parameter))) throw DeploymentError("bad timer duration '" + a.parameter + "'");
            } else if (auto macro = parse_nearest_macro(a.target)) {
                const auto usable = nearest_candidates(catalog_, *macro, a.interface);
                if (usable.empty())
                    throw DeploymentError("no device for " + a.target + " supports '" + a.interface + "'");
                for (const auto* dev : usable) check_parameter(*dev->find(a.interface, InterfaceKind::operation), a);
            } else if (auto found = lookup_interface(catalog_, a.target, a.interface, InterfaceKind::operation)) {
                check_parameter(*found.interface, a);
            } else {
                throw DeploymentError("unknown operation " + a.target + "." + a.interface);
            }
        }
        d.pairs.push_back(std::move(ps));
    }

    const auto t = now();
    for (auto& ps : d.pairs) {
        for (auto& ts : ps.triggers)
            if (ts.mode == TriggerMode::state && condition_true(ts)) ts.since = t;
        ps.armed = !conjunction(ps, t);
    }
    rules_.push_back(std::move(d));
    return rules_.back().key;
}

void Engine::withdraw(std::string_view key) {
    auto it = std::find_if(rules_.begin(), rules_.end(), [&](const Deployed& d) { return text::iequals(d.key, key); });
    if (it == rules_.end()) throw NotFound("no deployed rule '" + std::string(key) + "'");
    rules_.erase(it);
}

std::vector<std::string> Engine::rule_keys() const {
    std::vector<std::string> out;
    for (const auto& d : rules_) out.push_back(d.key);
    return out;
}

Engine::Deployed* Engine::lookup(std::string_view key) {
    for (auto& d : rules_)
        if (text::iequals(d.key, key)) return &d;
    return nullptr;
}

const GroundedRule* Engine::find_rule(std::string_view key) const {
    for (const auto& d : rules_)
        if (text::iequals(d.key, key)) return &d.rule;
    return nullptr;
}

void Engine::set_pair_enabled(std::string_view key, std::size_t pair, bool enabled) {
    auto* d = lookup(key);
    if (!d) throw NotFound("no deployed rule '" + std::string(key) + "'");
    if (pair >= d->pairs.size()) throw NotFound("rule '" + d->key + "' has no TA-pair " + std::to_string(pair));
    auto& ps = d->pairs[pair];
    if (enabled && !ps.enabled) ps.armed = !conjunction(ps, now());
    ps.enabled = enabled;
}

// ---------------------------------------------------------------------------
// Satisfaction
// ---------------------------------------------------------------------------

bool Engine::condition_true(const TriggerState& trig) const {
    auto it = store_.find(trig.key);
    if (it == store_.end()) return false;
    return trig.condition.empty() || trig.parsed.holds(it->second);
}

bool Engine::matches(const TriggerState& trig, const std::pair<Key, std::string>& occurrence) const {
    return trig.key == occurrence.first && (trig.condition.empty() || trig.parsed.holds(occurrence.second));
}

bool Engine::satisfied(const TriggerState& trig, std::int64_t t) const {
    if (trig.mode == TriggerMode::event)
        return std::any_of(occurrences_.begin(), occurrences_.end(), [&](const auto& o) { return matches(trig, o); });
    return trig.since && t - *trig.since >= trig.delay;
}

bool Engine::conjunction(const PairState& pair, std::int64_t t) const {
    return std::all_of(pair.triggers.begin(), pair.triggers.end(), [&](const TriggerState& ts) { return satisfied(ts, t); });
}

void Engine::write_state(const Key& key, std::string value, std::int64_t t) {
    store_[key] = std::move(value);
    for (auto& d : rules_)
        for (auto& ps : d.pairs)
            for (auto& ts : ps.triggers) {
                if (ts.mode != TriggerMode::state || ts.key != key) continue;
                if (!condition_true(ts))
                    ts.since.reset();
                else if (!ts.since)
                    ts.since = t;
            }
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

void Engine::fire(Deployed& rule, std::size_t pair, std::int64_t t) {
    execute(rule, Run{pair, 0, t, next_run_seq_++}, t);
}

void Engine::execute(Deployed& rule, Run run, std::int64_t t) {
    const auto& actions = rule.rule.ta_pairs[run.pair].actions;
    while (run.step < actions.size()) {
        const auto& a = actions[run.step++];
        if (text::iequals(a.target, kTimerTarget) && text::iequals(a.interface, kTimerInterface)) {
            run.resume = t + Duration::parse(text::trim(a.parameter)).seconds();
            rule.runs.push_back(run);
            return;
        }
        const Device* device = nullptr;
        if (auto macro = parse_nearest_macro(a.target)) {
            std::string location;
            for (const auto& dev : catalog_.devices)
                if (dev.find(kUserLocationInterface, InterfaceKind::query)) {
                    if (auto v = state(dev.target, kUserLocationInterface)) location = *v;
                    break;
                }
            device = pick_nearest(nearest_candidates(catalog_, *macro, a.interface), location);
            if (!device) continue;  // nobody near a matching device
        } else {
            device = catalog_.find(a.target);
        }
        const auto* op = device->find(a.interface, InterfaceKind::operation);
        trace_.push_back({t, device->target, op->name, a.parameter, rule.key, run.pair});
        Key key{text::lower(device->target), text::lower(op->name)};
        spelling_.try_emplace(key, device->target, op->name);
        write_state(key, a.parameter, t);
    }
}

void Engine::cascade(std::int64_t t) {
    for (int pass = 0; pass < kMaxCascadePasses; ++pass) {
        bool fired = false;
        for (auto& d : rules_) {
            for (std::size_t i = 0; i < d.pairs.size(); ++i) {
                auto& ps = d.pairs[i];
                if (!ps.enabled || ps.has_event) continue;
                const bool conj = conjunction(ps, t);
                if (conj && ps.armed) {
                    ps.armed = false;
                    fire(d, i, t);
                    fired = true;
                } else if (!conj) {
                    ps.armed = true;
                }
            }
        }
        if (!fired) break;
    }
}

void Engine::prepare(std::int64_t t) {
    struct Due {
        std::uint64_t deploy_seq;
        std::size_t pair, step;
        std::uint64_t run_seq;
        Run run;
    };
    std::vector<Due> due;
    for (auto& d : rules_) {
        auto split = std::stable_partition(d.runs.begin(), d.runs.end(), [&](const Run& r) { return r.resume != t; });
        for (auto it = split; it != d.runs.end(); ++it) due.push_back({d.seq, it->pair, it->step, it->seq, *it});
        d.runs.erase(split, d.runs.end());
    }
    std::sort(due.begin(), due.end(), [](const Due& a, const Due& b) {
        return std::tie(a.deploy_seq, a.pair, a.step, a.run_seq) < std::tie(b.deploy_seq, b.pair, b.step, b.run_seq);
    });
    for (const auto& item : due) {
        auto it = std::find_if(rules_.begin(), rules_.end(), [&](const Deployed& d) { return d.seq == item.deploy_seq; });
        execute(*it, item.run, t);
    }
    cascade(t);
    prepared_ = t;
}

void Engine::move_to(std::int64_t t) {
    if (t > clock_.now()) {
        clock_.advance_to(t);
        occurrences_.clear();
    }
    if (prepared_ < t) prepare(t);
}

std::optional<std::int64_t> Engine::next_wake() const {
    std::optional<std::int64_t> best;
    auto consider = [&](std::int64_t t) {
        if (t > prepared_ && (!best || t < *best)) best = t;
    };
    for (const auto& d : rules_) {
        for (const auto& r : d.runs) consider(r.resume);
        for (const auto& ps : d.pairs) {
            if (!ps.enabled || ps.has_event) continue;
            for (const auto& ts : ps.triggers)
                if (ts.mode == TriggerMode::state && ts.since && ts.delay > 0) consider(*ts.since + ts.delay);
        }
    }
    return best;
}

ActionTrace Engine::advance(std::int64_t to) {
    if (to < now()) throw InvalidArgument("cannot advance to " + std::to_string(to) + ": now is " + std::to_string(now()));
    const auto start = trace_.size();
    if (prepared_ < now()) prepare(now());
    while (auto wake = next_wake()) {
        if (*wake > to) break;
        move_to(*wake);
    }
    move_to(to);
    return ActionTrace(trace_.begin() + static_cast<std::ptrdiff_t>(start), trace_.end());
}

void Engine::apply_input(const SimEvent& event) {
    const auto key = resolve_query(event.target, event.interface);
    const auto t = now();
    write_state(key, event.value, t);
    if (event.kind == SimEvent::Kind::event) {
        occurrences_.emplace_back(key, event.value);
        const auto& occurrence = occurrences_.back();
        for (auto& d : rules_) {
            for (std::size_t i = 0; i < d.pairs.size(); ++i) {
                auto& ps = d.pairs[i];
                if (!ps.enabled || !ps.has_event) continue;
                const bool hit = std::any_of(ps.triggers.begin(), ps.triggers.end(), [&](const TriggerState& ts) {
                    return ts.mode == TriggerMode::event && matches(ts, occurrence);
                });
                if (hit && conjunction(ps, t)) fire(d, i, t);
            }
        }
    }
    cascade(t);
}

ActionTrace Engine::inject(const SimEvent& event) {
    if (event.at < now())
        throw InvalidArgument("event at " + std::to_string(event.at) + " is before now (" + std::to_string(now()) + ")");
    resolve_query(event.target, event.interface);
    const auto start = trace_.size();
    advance(event.at);
    apply_input(event);
    return ActionTrace(trace_.begin() + static_cast<std::ptrdiff_t>(start), trace_.end());
}

ActionTrace Engine::set_state(std::string_view target, std::string_view interface, std::string value, std::int64_t at) {
    return inject(SimEvent{at, std::string(target), std::string(interface), std::move(value), SimEvent::Kind::state});
}

std::map<std::string, std::map<std::string, std::string>> Engine::states() const {
    std::map<std::string, std::map<std::string, std::string>> out;
    for (const auto& [key, value] : store_) {
        auto it = spelling_.find(key);
        const auto& [target, interface] = it != spelling_.end() ? it->second : key;
        out[target][interface] = value;
    }
    return out;
}

std::optional<std::string> Engine::state(std::string_view target, std::string_view interface) const {
    auto it = store_.find(Key{text::lower(text::trim(target)), text::lower(text::trim(interface))});
    if (it == store_.end()) return std::nullopt;
    return it->second;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

nlohmann::json to_json(const TraceEntry& e) {
    return {{"at", e.at}, {"target", e.target}, {"interface", e.interface},
            {"parameter", e.parameter}, {"rule", e.rule}, {"pair", e.pair}};
}

namespace {

const nlohmann::json& field(const nlohmann::json& doc, const std::string& base, const char* name) {
    if (!doc.contains(name)) throw SchemaError(base + "/" + name, "missing field");
    return doc.at(name);
}

std::string string_field(const nlohmann::json& doc, const std::string& base, const char* name) {
    const auto& v = field(doc, base, name);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number() || v.is_boolean()) return v.dump();
    throw SchemaError(base + "/" + name, "expected a string");
}

std::int64_t time_field(const nlohmann::json& doc, const std::string& base) {
    const auto& v = field(doc, base, "at");
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
        throw SchemaError(base + "/at", "expected a non-negative integer number of seconds");
    return v.get<std::int64_t>();
}

SimEvent event_at(const nlohmann::json& doc, const std::string& base) {
    if (!doc.is_object()) throw SchemaError(base.empty() ? "/" : base, "expected an object");
    SimEvent e;
    e.at = time_field(doc, base);
    e.target = string_field(doc, base, "target");
    e.interface = string_field(doc, base, "interface");
    e.value = string_field(doc, base, "value");
    if (doc.contains("kind")) {
        const auto kind = string_field(doc, base, "kind");
        if (text::iequals(kind, "event"))
            e.kind = SimEvent::Kind::event;
        else if (text::iequals(kind, "state"))
            e.kind = SimEvent::Kind::state;
        else
            throw SchemaError(base + "/kind", "expected \"event\" or \"state\"");
    }
    return e;
}

} // namespace

TraceEntry trace_entry_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw SchemaError("/", "expected an object");
    TraceEntry e;
    e.at = time_field(doc, "");
    e.target = string_field(doc, "", "target");
    e.interface = string_field(doc, "", "interface");
    e.parameter = string_field(doc, "", "parameter");
    e.rule = string_field(doc, "", "rule");
    const auto& pair = field(doc, "", "pair");
    if (!pair.is_number_unsigned()) throw SchemaError("/pair", "expected a non-negative integer");
    e.pair = pair.get<std::size_t>();
    return e;
}

std::string trace_to_jsonl(const ActionTrace& trace) {
    std::string out;
    for (const auto& e : trace) out += to_json(e).dump() + "\n";
    return out;
}

nlohmann::json to_json(const SimEvent& e) {
    nlohmann::json doc{{"at", e.at}, {"target", e.target}, {"interface", e.interface}, {"value", e.value}};
    if (e.kind == SimEvent::Kind::state) doc["kind"] = "state";
    return doc;
}

SimEvent sim_event_from_json(const nlohmann::json& doc) { return event_at(doc, ""); }

std::vector<SimEvent> load_event_script(const nlohmann::json& doc) {
    if (!doc.is_array()) throw SchemaError("/", "an event script is a JSON array");
    std::vector<SimEvent> out;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto base = "/" + std::to_string(i);
        out.push_back(event_at(doc[i], base));
        if (i && out[i].at < out[i - 1].at) throw SchemaError(base + "/at", "events must be in time order");
    }
    return out;
}

} // namespace awareauto
