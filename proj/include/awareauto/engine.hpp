#pragma once

#include "awareauto/catalog.hpp"
#include "awareauto/condition.hpp"
#include "awareauto/error.hpp"
#include "awareauto/rule.hpp"

#include "json.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace awareauto {

/// Virtual seconds since the simulation started.
class VirtualClock {
public:
    std::int64_t now() const { return now_; }
    // Throws InvalidArgument when `to` lies in the past.
    void advance_to(std::int64_t to);

private:
    std::int64_t now_ = 0;
};

/// Something the environment reports. Events are also occurrences for event
/// triggers; `state` inputs only change the stored value.
struct SimEvent {
    enum class Kind { event, state };

    std::int64_t at = 0;
    std::string target;
    std::string interface;
    std::string value;
    Kind kind = Kind::event;

    friend bool operator==(const SimEvent&, const SimEvent&) = default;
};

struct TraceEntry {
    std::int64_t at = 0;
    std::string target;
    std::string interface;
    std::string parameter;
    std::string rule;
    std::size_t pair = 0;

    friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

using ActionTrace = std::vector<TraceEntry>;

class DeploymentError : public Error {
public:
    DeploymentError(const std::string& message, std::vector<GroundingError> errors = {})
        : Error(message), errors_(std::move(errors)) {}
    const std::vector<GroundingError>& errors() const { return errors_; }

private:
    std::vector<GroundingError> errors_;
};

/// Executes deployed TA-pairs against a simulated home in virtual time.
///
/// Per instant t the engine first resumes WAITing action runs that are due,
/// ordered by (deployment, pair, step, run), then fires all-state pairs whose
/// conjunction became satisfied, then handles the inputs stamped t in the
/// order they arrive. Device commands write the state store immediately and
/// may satisfy further all-state pairs in the same instant; such cascades stop
/// after kMaxCascadePasses passes.
///
/// Not thread-safe; callers serialize access.
class Engine {
public:
    static constexpr int kMaxCascadePasses = 8;

    explicit Engine(DeviceCatalog catalog, std::map<std::string, std::map<std::string, std::string>> initial_states = {});

    std::int64_t now() const { return clock_.now(); }

    // Returns the key the rule is stored under: its name, or "rule-<n>".
    // Throws DeploymentError for infeasible rules, catalog mismatches and
    // duplicate names.
    std::string deploy(const GroundedRule& rule);
    // Drops the rule and every pending step of it. Throws NotFound.
    void withdraw(std::string_view key);

    std::vector<std::string> rule_keys() const;
    const GroundedRule* find_rule(std::string_view key) const;
    void set_pair_enabled(std::string_view key, std::size_t pair, bool enabled);

    // Both throw InvalidArgument for inputs in the past and NotFound for
    // targets or query interfaces the catalog does not have. The returned
    // delta includes anything that came due before the input.
    ActionTrace inject(const SimEvent& event);
    ActionTrace set_state(std::string_view target, std::string_view interface, std::string value, std::int64_t at);
    ActionTrace advance(std::int64_t to);

    // Next instant with pending work (a WAIT ending, a state hold maturing).
    std::optional<std::int64_t> next_wake() const;

    const ActionTrace& trace() const { return trace_; }
    // target -> interface -> value, catalog spelling.
    std::map<std::string, std::map<std::string, std::string>> states() const;
    std::optional<std::string> state(std::string_view target, std::string_view interface) const;

    const DeviceCatalog& catalog() const { return catalog_; }

private:
    using Key = std::pair<std::string, std::string>;  // lower-cased target, interface

    struct TriggerState {
        Key key;
        TriggerMode mode;
        std::int64_t delay = 0;
        std::string condition;  // empty: any value
        Condition parsed;
        std::optional<std::int64_t> since;
    };

    struct PairState {
        std::vector<TriggerState> triggers;
        bool has_event = false;
        bool enabled = true;
        bool armed = false;
    };

    struct Run {
        std::size_t pair;
        std::size_t step;
        std::int64_t resume;
        std::uint64_t seq;
    };

    struct Deployed {
        std::string key;
        std::uint64_t seq;
        GroundedRule rule;
        std::vector<PairState> pairs;
        std::vector<Run> runs;
    };

    void prepare(std::int64_t t);
    void move_to(std::int64_t t);
    void cascade(std::int64_t t);
    void apply_input(const SimEvent& event);
    void write_state(const Key& key, std::string value, std::int64_t t);
    bool condition_true(const TriggerState& trig) const;
    bool matches(const TriggerState& trig, const std::pair<Key, std::string>& occurrence) const;
    bool satisfied(const TriggerState& trig, std::int64_t t) const;
    bool conjunction(const PairState& pair, std::int64_t t) const;
    void fire(Deployed& rule, std::size_t pair, std::int64_t t);
    void execute(Deployed& rule, Run run, std::int64_t t);
    Deployed* lookup(std::string_view key);
    Key resolve_query(std::string_view target, std::string_view interface) const;

    DeviceCatalog catalog_;
    VirtualClock clock_;
    std::int64_t prepared_ = -1;
    std::map<Key, std::string> store_;
    mutable std::map<Key, std::pair<std::string, std::string>> spelling_;  // display names
    std::vector<std::pair<Key, std::string>> occurrences_;  // at clock_.now()
    std::vector<Deployed> rules_;
    std::uint64_t next_deploy_seq_ = 0;
    std::uint64_t next_run_seq_ = 0;
    std::uint64_t generated_ids_ = 0;
    ActionTrace trace_;
};

nlohmann::json to_json(const TraceEntry& entry);
TraceEntry trace_entry_from_json(const nlohmann::json& doc);
// One compact JSON object per line.
std::string trace_to_jsonl(const ActionTrace& trace);

nlohmann::json to_json(const SimEvent& event);
SimEvent sim_event_from_json(const nlohmann::json& doc);
// A scenario script: JSON array of SimEvent with non-decreasing `at`; equal
// times keep array order.
std::vector<SimEvent> load_event_script(const nlohmann::json& doc);

} // namespace awareauto
