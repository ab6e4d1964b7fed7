#include "awareauto/error.hpp"
#include "awareauto/pipeline.hpp"
#include "awareauto/rule_text.hpp"

#include "doctest.h"

using namespace awareauto;

namespace {

NLRule night_light() {
    return parse_rule_text("OPERATION: CREATE\nNAME: night light\nTRIGGERS:\n  T1 | EVENT | the user gets into bed\n"
                           "  T2 | STATE | it is after 22:00\nACTIONS:\n  G1 WHEN T1,T2:\n    A1 | dim the bedroom light to 10\n");
}

} // namespace

TEST_CASE("a trigger replaced by id") {
    auto delta = parse_rule_text("OPERATION: MODIFY\nNAME: night light\nTRIGGERS:\n  T2 | STATE | it is after 23:00\nACTIONS:\n");
    auto m = merge_delta(night_light(), delta);
    CHECK(m.operation == RuleOperation::modify);
    CHECK(m.name == "night light");
    REQUIRE(m.triggers.size() == 2);
    CHECK(m.triggers[1].description == "it is after 23:00");
    CHECK(m.groups == night_light().groups);
}

TEST_CASE("a step-less group only rebinds triggers, and unused triggers go") {
    auto delta = parse_rule_text("OPERATION: MODIFY\nNAME: NONE\nTRIGGERS:\nACTIONS:\n  G1 WHEN T1:\n");
    auto m = merge_delta(night_light(), delta);
    REQUIRE(m.triggers.size() == 1);
    CHECK(m.triggers[0].id == 1);
    CHECK(m.groups[0].trigger_ids == std::vector<int>{1});
    CHECK(m.groups[0].steps == night_light().groups[0].steps);
}

TEST_CASE("groups are replaced or appended") {
    auto delta = parse_rule_text("OPERATION: MODIFY\nNAME: NONE\nTRIGGERS:\n  T3 | EVENT | the user says good morning\n"
                                 "ACTIONS:\n  G2 WHEN T3:\n    A1 | open the bedroom curtains\n");
    auto m = merge_delta(night_light(), delta);
    REQUIRE(m.groups.size() == 2);
    CHECK(m.triggers.size() == 3);
    CHECK(m.groups[1].steps[0].text == "open the bedroom curtains");

    auto replace = parse_rule_text("OPERATION: MODIFY\nNAME: NONE\nTRIGGERS:\nACTIONS:\n  G1 WHEN T1,T2:\n    A1 | turn off the bedroom light\n");
    CHECK(merge_delta(night_light(), replace).groups[0].steps[0].text == "turn off the bedroom light");
}

TEST_CASE("merge errors") {
    auto other = parse_rule_text("OPERATION: MODIFY\nNAME: movie mode\nTRIGGERS:\nACTIONS:\n  G1 WHEN T1:\n");
    CHECK_THROWS_AS(merge_delta(night_light(), other), InvalidArgument);
    auto new_empty = parse_rule_text("OPERATION: MODIFY\nNAME: NONE\nTRIGGERS:\nACTIONS:\n  G5 WHEN T1:\n");
    CHECK_THROWS_AS(merge_delta(night_light(), new_empty), InvalidArgument);
    // G1 would wait for a trigger nobody declares.
    auto dangling = parse_rule_text("OPERATION: MODIFY\nNAME: NONE\nTRIGGERS:\nACTIONS:\n  G1 WHEN T7:\n");
    CHECK_THROWS_AS(merge_delta(night_light(), dangling), InvalidArgument);
}

TEST_CASE("an empty delta changes nothing but the operation") {
    auto delta = parse_rule_text("OPERATION: MODIFY\nNAME: night light\nTRIGGERS:\nACTIONS:\n");
    auto m = merge_delta(night_light(), delta);
    m.operation = RuleOperation::create;
    CHECK(m == night_light());
}
