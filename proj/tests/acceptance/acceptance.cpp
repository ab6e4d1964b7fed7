// Prints one PASS/FAIL line per acceptance criterion; exits non-zero if any fail.

#include "awareauto/engine.hpp"
#include "awareauto/eval.hpp"
#include "awareauto/grounded.hpp"
#include "awareauto/grounding.hpp"
#include "awareauto/rule_text.hpp"
#include "awareauto/service.hpp"

#include "random_scenarios.hpp"
#include "reference_interpreter.hpp"
#include "test_support.hpp"

#include "httplib.h"

#include <chrono>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

using namespace awareauto;
using namespace awareauto::testing;
using nlohmann::json;

namespace {

struct Verdict {
    bool ok = true;
    std::vector<std::string> notes;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            notes.push_back(what);
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::shared_ptr<llm::Backend> fixtures() { return std::make_shared<llm::ScriptedBackend>(data_dir() / "fixtures"); }

std::vector<EvalCase> corpus() { return load_corpus_file((data_dir() / "corpus" / "bundled.json").string()); }

const EvalCase* find_case(const std::vector<EvalCase>& cases, const std::string& id) {
    for (const auto& c : cases)
        if (c.id == id) return &c;
    return nullptr;
}

Verdict bundled_corpus() {
    Verdict v;
    const auto cases = corpus();
    v.require(cases.size() >= 27, "fewer than 27 cases");
    std::map<Complexity, int> per_class;
    for (const auto& c : cases) ++per_class[c.complexity];
    for (auto k : kAllComplexities)
        v.require(per_class[k] >= 3, std::string("class ") + std::string(to_string(k)) + " has fewer than 3 cases");

    // The worked examples.
    auto has_trigger = [&](const char* tuple) {
        for (const auto& c : cases)
            if (c.gold_grounded)
                for (const auto& p : c.gold_grounded->ta_pairs)
                    for (const auto& t : p.triggers)
                        if (display(t) == tuple) return true;
        return false;
    };
    const auto* sofa = find_case(cases, "mm-01-sofa-point");
    v.require(sofa && sofa->expression.position == "sofa" && sofa->expression.gesture_target, "sofa/pointing example missing");
    v.require(has_trigger("ActivitySensor-isThereUserActivity-false-state(10mins)"), "state(10mins) example missing");
    const auto* ac = find_case(cases, "td-01-cool-down");
    bool ac_ok = false;
    if (ac && ac->gold_grounded)
        for (const auto& p : ac->gold_grounded->ta_pairs)
            if (p.actions.size() == 3 && display(p.actions[1]) == "timer-wait-10mins") ac_ok = true;
    v.require(ac_ok, "AC timer example missing");
    const auto* branch = find_case(cases, "cb-01-tv-rain");
    v.require(branch && branch->gold_nl.groups.size() == 2, "branch example missing");
    const auto* correction = find_case(cases, "rd-04-sleep-correction");
    v.require(correction && correction->gold_nl.operation == RuleOperation::modify && correction->base_nl,
              "sleep-mode correction missing");

    Pipeline pipeline(bundled_catalog(), bundled_prompts(), fixtures());
    const auto start = std::chrono::steady_clock::now();
    const auto first = run_corpus(cases, pipeline);
    const auto elapsed = seconds_since(start);
    const auto second = run_corpus(cases, pipeline, 1);
    const auto doc = first.to_json();
    v.require(doc.contains("overall"), "no overall row");
    for (const auto& row : doc["classes"])
        for (const auto& [k, rate] : row["rates"].items())
            v.require(rate == "100.0", row["class"].get<std::string>() + " " + k + " = " + rate.get<std::string>());
    if (doc.contains("overall"))
        for (const auto& [k, rate] : doc["overall"]["rates"].items())
            v.require(rate == "100.0", "overall " + k + " = " + rate.get<std::string>());
    v.require(doc == second.to_json(), "second run differs");
    v.require(elapsed < 30.0, "took " + std::to_string(elapsed) + " s");
    return v;
}

Verdict metric_arithmetic() {
    Verdict v;
    auto check = [&](std::size_t n, std::size_t d, int decimals, const std::string& want) {
        const auto got = format_rate(n, d, decimals);
        v.require(got == want, std::to_string(n) + "/" + std::to_string(d) + " gave " + got + ", want " + want);
    };
    check(188, 205, 1, "91.7");
    check(45, 50, 1, "90.0");
    check(6, 10, 1, "60.0");
    check(198, 205, 2, "96.59");

    // Through a synthetic report as well.
    std::vector<CaseResult> results;
    for (int i = 0; i < 205; ++i) {
        CaseResult r;
        r.id = "c" + std::to_string(1000 + i);
        if (i < 188) r.score = {true, true, true, true, true};
        results.push_back(r);
    }
    v.require(build_report(results).to_json()["overall"]["rates"]["success"] == "91.7", "report overall != 91.7");
    return v;
}

Verdict engine_oracle() {
    Verdict v;
    const auto catalog = oracle_catalog();
    std::mt19937_64 rng(20240611);
    ScenarioLimits limits;
    limits.max_triggers = 3;
    limits.max_steps = 4;
    limits.max_horizon = 3600;
    const auto start = std::chrono::steady_clock::now();
    int divergences = 0;
    const int instances = 1000;
    for (int i = 0; i < instances; ++i) {
        auto s = random_scenario(rng, limits);
        if (reference_run(catalog, s.rules, s.initial, s.inputs, s.horizon) !=
            engine_run(catalog, s.rules, s.initial, s.inputs, s.horizon))
            ++divergences;
    }
    const auto elapsed = seconds_since(start);
    v.require(divergences == 0, std::to_string(divergences) + " of " + std::to_string(instances) + " instances diverge");
    v.require(elapsed < 60.0, "took " + std::to_string(elapsed) + " s");
    return v;
}

Verdict grounding_defense() {
    Verdict v;
    const auto& catalog = bundled_catalog();
    auto rule = make_rule({make_pair({"environment sensor-UserEnter-bedroom-event"}, {"bedroom light-switch-on"})});
    const auto checked = validate_grounded(catalog, rule);
    v.require(!checked.feasible, "UserEnter rule is feasible");
    bool unknown = false;
    for (const auto& e : checked.errors)
        if (e.code == ErrorCode::unknown_interface && !e.message.empty()) unknown = true;
    v.require(unknown, "no UNKNOWN_INTERFACE with a reason");

    Engine engine(catalog);
    bool rejected = false;
    try {
        engine.deploy(checked);
    } catch (const DeploymentError&) {
        rejected = true;
    }
    v.require(rejected && engine.rule_keys().empty(), "infeasible rule deployed");

    const auto suite = json::parse(read_text(test_data_dir() / "hallucinations.json"));
    int caught = 0;
    for (const auto& c : suite) {
        const auto tuple = c["tuple"].get<std::string>();
        GroundedRule r = c["kind"] == "trigger"
                             ? make_rule({{{parse_trigger_tuple(tuple)}, {parse_action_tuple("TV-switch-on")}}})
                             : make_rule({{{parse_trigger_tuple("TV-switch-on-event")}, {parse_action_tuple(tuple)}}});
        const auto out = validate_grounded(catalog, r);
        const auto want = parse_error_code(c["code"].get<std::string>());
        bool hit = !out.feasible;
        bool code = false;
        for (const auto& e : out.errors) code = code || e.code == want;
        if (hit && code) ++caught;
        else v.notes.push_back("missed " + c["id"].get<std::string>());
    }
    v.require(suite.size() == 10, "suite has " + std::to_string(suite.size()) + " cases");
    v.require(caught == static_cast<int>(suite.size()), std::to_string(caught) + " caught");
    return v;
}

Verdict round_trips() {
    Verdict v;
    int checked = 0;
    for (const auto& c : corpus()) {
        const auto doc = serialize_rule_text(c.gold_nl);
        v.require(parse_rule_text(doc) == c.gold_nl, c.id + ": rule text");
        if (c.gold_grounded) {
            v.require(parse_grounded_json(serialize_grounded_json(*c.gold_grounded)) == *c.gold_grounded, c.id + ": JSON");
            for (const auto& p : c.gold_grounded->ta_pairs) {
                for (const auto& t : p.triggers) v.require(parse_trigger_tuple(display(t)) == t, c.id + ": " + display(t));
                for (const auto& a : p.actions) v.require(parse_action_tuple(display(a)) == a, c.id + ": " + display(a));
            }
        }
        ++checked;
    }
    v.require(checked >= 27, "only " + std::to_string(checked) + " gold artifacts");
    for (const char* s : {"TV-switch-on-event", "ActivitySensor-isThereUserActivity-false-state(10mins)"})
        v.require(display(parse_trigger_tuple(s)) == s, s);
    v.require(display(parse_action_tuple("timer-wait-10mins")) == "timer-wait-10mins", "timer-wait-10mins");
    return v;
}

Verdict session_flow() {
    Verdict v;
    const auto flow = json::parse(read_text(data_dir() / "sessions" / "night_light.json"));
    auto pipeline = std::make_shared<const Pipeline>(bundled_catalog(), bundled_prompts(), fixtures());
    Service service(pipeline, Engine(bundled_catalog()));
    httplib::Server server;
    mount_routes(server, service);
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread listener([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    httplib::Client client("127.0.0.1", port);

    auto post = [&](const std::string& path, const json& body) -> std::pair<int, json> {
        auto r = client.Post(path, body.dump(), "application/json");
        if (!r) return {0, json()};
        return {r->status, json::parse(r->body)};
    };
    auto [sc, created] = post("/sessions", json::object());
    const std::string id = sc == 201 ? created["id"].get<std::string>() : "";
    v.require(sc == 201, "POST /sessions gave " + std::to_string(sc));
    std::vector<std::string> kinds;
    for (const auto& round : flow["rounds"]) {
        const bool edit = round["kind"] == "edit";
        auto [code, reply] = post("/sessions/" + id + (edit ? "/edit" : "/expression"), round["body"]);
        v.require(code == 200, "round gave " + std::to_string(code));
        if (code != 200) break;
        kinds.push_back(reply["kind"]);
        v.require(reply["feasible"] == round["expect"]["feasible"], "round " + std::to_string(kinds.size()) + " feasibility");
    }
    v.require(kinds == std::vector<std::string>{"expression", "modification_expression", "direct_edit"}, "round kinds");
    auto [cc, confirmed] = post("/sessions/" + id + "/confirm", json::object());
    v.require(cc == 200, "confirm gave " + std::to_string(cc));
    if (cc == 200) v.require(confirmed["round"] == 3, "round count " + confirmed["round"].dump());
    const auto rules = service.list_rules()["rules"];
    v.require(rules.size() == 1, "deployed " + std::to_string(rules.size()) + " rules");
    if (rules.size() == 1) {
        const auto g = grounded_from_json(rules[0]["grounded_rule"]);
        v.require(g.feasible, "deployed rule infeasible");
        v.require(rules_equivalent(g, grounded_from_json(flow["expected_rule"])), "deployed rule differs from expected");
    }
    server.stop();
    listener.join();
    return v;
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, Verdict (*)()>> criteria = {
        {"bundled corpus scores 100.0 in every column, deterministically, under 30 s", bundled_corpus},
        {"metric arithmetic 188/205=91.7, 45/50=90.0, 6/10=60.0, 198/205=96.59", metric_arithmetic},
        {"engine matches the 1-second interpreter on 1000 random instances under 60 s", engine_oracle},
        {"grounding defense: UserEnter rejected, hallucination suite fully caught", grounding_defense},
        {"rule text, grounded JSON and tuple displays round-trip", round_trips},
        {"session flow: expression, modification, edit, confirm deploys with round 3", session_flow},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v.ok = false;
            v.notes.push_back(std::string("exception: ") + e.what());
        }
        std::cout << (v.ok ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first;
        if (!v.ok) {
            std::cout << " [";
            for (std::size_t k = 0; k < v.notes.size() && k < 5; ++k) std::cout << (k ? "; " : "") << v.notes[k];
            std::cout << "]";
            ++failed;
        }
        std::cout << "\n";
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria pass\n";
    return failed ? 1 : 0;
}
