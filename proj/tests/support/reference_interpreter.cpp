#include "reference_interpreter.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <optional>
#include <tuple>

namespace awareauto::testing {

namespace {

std::string fold(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::optional<double> number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return std::nullopt;
    return v;
}

// Written from the condition grammar: optional comparator prefix, then the
// operand; ordering needs two numbers; equality is numeric when both sides
// are numbers, otherwise case-insensitive.
bool holds(const std::string& condition, const std::string& value) {
    std::string op, operand = condition;
    for (const char* candidate : {">=", "<=", "!=", ">", "<", "="})
        if (condition.rfind(candidate, 0) == 0) {
            op = candidate;
            operand = condition.substr(op.size());
            break;
        }
    while (!operand.empty() && operand.front() == ' ') operand.erase(operand.begin());
    auto a = number(value), b = number(operand);
    if (op == ">" || op == ">=" || op == "<" || op == "<=") {
        if (!a || !b) return false;
        if (op == ">") return *a > *b;
        if (op == ">=") return *a >= *b;
        if (op == "<") return *a < *b;
        return *a <= *b;
    }
    bool eq = (a && b) ? *a == *b : fold(value) == fold(operand);
    return op == "!=" ? !eq : eq;
}

struct Write {
    std::int64_t at;
    std::string value;
};

using Key = std::pair<std::string, std::string>;

struct Run {
    std::size_t rule, pair, step;
    std::int64_t resume;
    std::uint64_t seq;
};

struct World {
    const DeviceCatalog& catalog;
    const std::vector<GroundedRule>& rules;
    std::map<Key, std::vector<Write>> history;
    std::vector<std::pair<Key, std::string>> occurrences;  // this tick
    std::vector<std::vector<bool>> last_conj;               // all-state pairs
    std::vector<Run> runs;
    std::uint64_t seq = 0;
    ActionTrace trace;

    Key key(const std::string& target, const std::string& interface) const { return {fold(target), fold(interface)}; }

    bool cond_true(const GroundedTrigger& t, const std::string& value) const {
        return t.condition.empty() || holds(t.condition, value);
    }

    // Start of the current uninterrupted stretch in which the condition has
    // been true, by replaying every write to the key.
    std::optional<std::int64_t> true_since(const GroundedTrigger& t) const {
        auto it = history.find(key(t.target, t.interface));
        if (it == history.end()) return std::nullopt;
        std::optional<std::int64_t> since;
        for (const auto& w : it->second) {
            if (!cond_true(t, w.value))
                since.reset();
            else if (!since)
                since = w.at;
        }
        return since;
    }

    bool satisfied(const GroundedTrigger& t, std::int64_t now) const {
        if (t.mode == TriggerMode::event) {
            const auto k = key(t.target, t.interface);
            for (const auto& [ok, v] : occurrences)
                if (ok == k && cond_true(t, v)) return true;
            return false;
        }
        auto since = true_since(t);
        return since && now - *since >= t.delay.seconds();
    }

    bool conj(const TAPair& p, std::int64_t now) const {
        for (const auto& t : p.triggers)
            if (!satisfied(t, now)) return false;
        return true;
    }

    static bool all_state(const TAPair& p) {
        return std::none_of(p.triggers.begin(), p.triggers.end(), [](const auto& t) { return t.mode == TriggerMode::event; });
    }

    std::string rule_key(std::size_t i) const {
        if (rules[i].name) return *rules[i].name;
        std::size_t unnamed = 0;
        for (std::size_t k = 0; k <= i; ++k) unnamed += rules[k].name ? 0 : 1;
        return "rule-" + std::to_string(unnamed);
    }

    void run_steps(Run r, std::int64_t now) {
        const auto& actions = rules[r.rule].ta_pairs[r.pair].actions;
        for (; r.step < actions.size(); ++r.step) {
            const auto& a = actions[r.step];
            if (a.target == "timer" && a.interface == "wait") {
                r.resume = now + Duration::parse(a.parameter).seconds();
                ++r.step;
                runs.push_back(r);
                return;
            }
            const Device* d = catalog.find(a.target);
            trace.push_back({now, d->target, d->find(a.interface, InterfaceKind::operation)->name, a.parameter,
                             rule_key(r.rule), r.pair});
            history[key(a.target, a.interface)].push_back({now, a.parameter});
        }
    }

    void settle(std::int64_t now) {
        for (int pass = 0; pass < Engine::kMaxCascadePasses; ++pass) {
            bool any = false;
            for (std::size_t i = 0; i < rules.size(); ++i)
                for (std::size_t j = 0; j < rules[i].ta_pairs.size(); ++j) {
                    const auto& p = rules[i].ta_pairs[j];
                    if (!all_state(p)) continue;
                    const bool c = conj(p, now);
                    if (c && !last_conj[i][j]) {
                        last_conj[i][j] = true;
                        run_steps({i, j, 0, now, seq++}, now);
                        any = true;
                    } else if (!c) {
                        last_conj[i][j] = false;
                    }
                }
            if (!any) break;
        }
    }

    void input(const SimEvent& e, std::int64_t now) {
        const auto k = key(e.target, e.interface);
        history[k].push_back({now, e.value});
        if (e.kind == SimEvent::Kind::event) {
            occurrences.emplace_back(k, e.value);
            for (std::size_t i = 0; i < rules.size(); ++i)
                for (std::size_t j = 0; j < rules[i].ta_pairs.size(); ++j) {
                    const auto& p = rules[i].ta_pairs[j];
                    bool hit = false;
                    for (const auto& t : p.triggers)
                        if (t.mode == TriggerMode::event && key(t.target, t.interface) == k && cond_true(t, e.value)) hit = true;
                    if (hit && conj(p, now)) run_steps({i, j, 0, now, seq++}, now);
                }
        }
        settle(now);
    }
};

} // namespace

ActionTrace reference_run(const DeviceCatalog& catalog, const std::vector<GroundedRule>& rules,
                          const std::map<std::string, std::map<std::string, std::string>>& initial,
                          const std::vector<SimEvent>& inputs, std::int64_t horizon) {
    World w{catalog, rules, {}, {}, {}, {}, 0, {}};
    for (const auto& [target, values] : initial)
        for (const auto& [interface, value] : values) w.history[w.key(target, interface)].push_back({0, value});
    for (const auto& r : rules) {
        std::vector<bool> row;
        for (const auto& p : r.ta_pairs) row.push_back(w.conj(p, 0));
        w.last_conj.push_back(row);
    }

    std::size_t next = 0;
    for (std::int64_t now = 0; now <= horizon; ++now) {
        w.occurrences.clear();
        std::vector<Run> due;
        std::erase_if(w.runs, [&](const Run& r) {
            if (r.resume != now) return false;
            due.push_back(r);
            return true;
        });
        std::sort(due.begin(), due.end(), [](const Run& a, const Run& b) {
            return std::tie(a.rule, a.pair, a.step, a.seq) < std::tie(b.rule, b.pair, b.step, b.seq);
        });
        for (const auto& r : due) w.run_steps(r, now);
        w.settle(now);
        while (next < inputs.size() && inputs[next].at == now) w.input(inputs[next++], now);
    }
    return w.trace;
}

ActionTrace engine_run(const DeviceCatalog& catalog, const std::vector<GroundedRule>& rules,
                       const std::map<std::string, std::map<std::string, std::string>>& initial,
                       const std::vector<SimEvent>& inputs, std::int64_t horizon) {
    Engine engine(catalog, initial);
    for (const auto& r : rules) engine.deploy(r);
    for (const auto& e : inputs) engine.inject(e);
    engine.advance(horizon);
    return engine.trace();
}

} // namespace awareauto::testing
