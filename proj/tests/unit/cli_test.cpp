#include "awareauto/eval.hpp"
#include "awareauto/grounded.hpp"

#include "test_support.hpp"

#include "doctest.h"

#include <fstream>
#include <sys/wait.h>

using namespace awareauto;
using awareauto::testing::TempDir;
using nlohmann::json;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

std::string quote(const std::string& s) {
    std::string q = "'";
    for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

Outcome cli(const std::vector<std::string>& args) {
    static TempDir scratch;
    static int n = 0;
    const auto out = scratch.path() / ("out" + std::to_string(n) + ".txt");
    const auto err = scratch.path() / ("err" + std::to_string(n++) + ".txt");
    std::string cmd = quote(AWAREAUTO_CLI);
    for (const auto& a : args) cmd += " " + quote(a);
    cmd += " >" + quote(out.string()) + " 2>" + quote(err.string());
    const int status = std::system(cmd.c_str());
    Outcome o;
    o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    o.out = testing::read_text(out);
    o.err = testing::read_text(err);
    return o;
}

std::string write(const TempDir& dir, const std::string& name, const std::string& content) {
    const auto path = dir.path() / name;
    std::ofstream(path) << content;
    return path.string();
}

std::string fixtures() { return (testing::data_dir() / "fixtures").string(); }

} // namespace

TEST_CASE("eval on the bundled corpus") {
    auto o = cli({"eval", "--backend", "scripted", "--fixtures", fixtures(), "--format", "json"});
    CAPTURE(o.err);
    REQUIRE(o.code == 0);
    auto doc = json::parse(o.out);
    CHECK(doc["overall"]["rates"]["success"] == "100.0");
    auto table = cli({"--format", "table", "eval", "--fixtures", fixtures()});
    REQUIRE(table.code == 0);
    CHECK(table.out.find("Overall(") != std::string::npos);
    CHECK(table.out.find("100.0") != std::string::npos);
}

TEST_CASE("pipeline command") {
    TempDir dir;
    auto corpus = load_corpus_file((testing::data_dir() / "corpus" / "bundled.json").string());
    const auto& c = corpus.front();
    json input{{"expression", to_json(c.expression)}, {"snapshot", to_json(c.snapshot)}};
    auto ok = cli({"pipeline", write(dir, "in.json", input.dump()), "--fixtures", fixtures()});
    CAPTURE(ok.err);
    REQUIRE(ok.code == 0);
    auto out = json::parse(ok.out);
    CHECK(rules_equivalent(grounded_from_json(out["grounded_rule"]), *c.gold_grounded));

    SUBCASE("malformed expression names the field") {
        auto bad = cli({"pipeline", write(dir, "bad.json", R"({"expression": {"speech": 42}})")});
        CHECK(bad.code == 1);
        CHECK(bad.err.find("/speech") != std::string::npos);
    }
    SUBCASE("not JSON") {
        CHECK(cli({"pipeline", write(dir, "bad.json", "{oops")}).code == 1);
    }
    SUBCASE("missing file") {
        CHECK(cli({"pipeline", (dir.path() / "nothing.json").string()}).code == 1);
    }
    SUBCASE("no fixture for this expression") {
        auto miss = cli({"pipeline", write(dir, "new.json", R"({"speech": "Something nobody recorded."})"), "--fixtures",
                         fixtures()});
        CHECK(miss.code == 2);
        CHECK(miss.err.find(".txt") != std::string::npos);
    }
}

TEST_CASE("simulate the AC timer rule") {
    TempDir dir;
    const auto rule = write(dir, "rule.json", R"({"operation": "create", "name": "cool down", "feasible": true,
      "ta_pairs": [{"triggers": [{"target": "VoiceAssistant", "interface": "ruleName", "condition": "cool down", "mode": "event", "delay_s": 0}],
                    "actions": [{"target": "air conditioner", "interface": "switch", "parameter": "on"},
                                {"target": "timer", "interface": "wait", "parameter": "10mins"},
                                {"target": "air conditioner", "interface": "switch", "parameter": "off"}]}],
      "errors": []})");
    const auto events = write(dir, "events.json",
                              R"([{"at": 30, "target": "VoiceAssistant", "interface": "ruleName", "value": "cool down"}])");
    auto o = cli({"simulate", "--rules", rule, "--events", events});
    CAPTURE(o.err);
    REQUIRE(o.code == 0);
    std::vector<json> lines;
    std::istringstream in(o.out);
    for (std::string line; std::getline(in, line);) lines.push_back(json::parse(line));
    REQUIRE(lines.size() == 2);
    CHECK(lines[0]["at"] == 30);
    CHECK(lines[0]["parameter"] == "on");
    CHECK(lines[1]["at"] == 630);
    CHECK(lines[1]["parameter"] == "off");

    auto until = cli({"simulate", "--rules", rule, "--events", events, "--until", "100"});
    REQUIRE(until.code == 0);
    CHECK(std::count(until.out.begin(), until.out.end(), '\n') == 1);

    const auto infeasible = write(dir, "bad.json", R"({"operation": "create", "name": null, "feasible": true,
      "ta_pairs": [{"triggers": [{"target": "environment sensor", "interface": "UserEnter", "condition": "bedroom", "mode": "event", "delay_s": 0}],
                    "actions": [{"target": "bedroom light", "interface": "switch", "parameter": "on"}]}], "errors": []})");
    CHECK(cli({"simulate", "--rules", infeasible}).code == 1);
}

TEST_CASE("usage errors exit 1") {
    CHECK(cli({}).code == 1);
    CHECK(cli({"frobnicate"}).code == 1);
    CHECK(cli({"eval", "--format", "yaml"}).code == 1);
    CHECK(cli({"eval", "--backend", "magic"}).code == 1);
    CHECK(cli({"--help"}).code == 0);
}
