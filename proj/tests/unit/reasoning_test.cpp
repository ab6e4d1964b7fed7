#include "awareauto/reasoning.hpp"

#include "test_support.hpp"

#include "doctest.h"

using namespace awareauto;
using awareauto::testing::FakeBackend;

namespace {

const char* kCoolDown = "OPERATION: CREATE\nNAME: cool down\nTRIGGERS:\nACTIONS:\n  G1 WHEN T0:\n"
                        "    A1 | turn on the air conditioner\n    A2 | WAIT 10mins\n    A3 | turn off the air conditioner\n";

} // namespace

TEST_CASE("a well-formed answer takes one call") {
    auto backend = FakeBackend::queue({std::string("Here you go:\n```\n") + kCoolDown + "```"});
    auto rule = infer_rule(*backend, "SYSTEM", "The user says, \"Cool the room for ten minutes.\"");
    CHECK(rule.name == "cool down");
    REQUIRE(rule.groups.size() == 1);
    const auto& steps = rule.groups[0].steps;
    REQUIRE(steps.size() == 3);
    CHECK(steps[0].text == "turn on the air conditioner");
    CHECK(steps[1].kind == StepKind::wait);
    CHECK(steps[1].wait.seconds() == 600);
    CHECK(steps[2].text == "turn off the air conditioner");
    REQUIRE(backend->requests().size() == 1);
    CHECK(backend->requests()[0].system_prompt == "SYSTEM");
}

TEST_CASE("one repair round, then a distinct second request") {
    auto backend = FakeBackend::queue({"I think the user wants cooling.", kCoolDown});
    auto rule = infer_rule(*backend, "SYSTEM", "EXPR");
    CHECK(rule.name == "cool down");
    const auto reqs = backend->requests();
    REQUIRE(reqs.size() == 2);
    CHECK(reqs[0].user_message == "EXPR");
    CHECK(reqs[1].user_message != reqs[0].user_message);
    CHECK(reqs[1].user_message.find("I think the user wants cooling.") != std::string::npos);
    CHECK(reqs[1].system_prompt == "SYSTEM");
}

TEST_CASE("still unparseable after repair") {
    auto backend = FakeBackend::queue({"nope", "still nope"});
    try {
        infer_rule(*backend, "SYSTEM", "EXPR");
        FAIL("expected UnparseableOutputError");
    } catch (const UnparseableOutputError& e) {
        CHECK(e.raw() == "still nope");
    }
    CHECK(backend->requests().size() == 2);
}

TEST_CASE("repair message keeps the original expression") {
    auto m = repair_message("EXPR", "RAW", "line 1: bad", "the rule format");
    CHECK(m.rfind("EXPR", 0) == 0);
    CHECK(m.find("RAW") != std::string::npos);
    CHECK(m.find("line 1: bad") != std::string::npos);
}
