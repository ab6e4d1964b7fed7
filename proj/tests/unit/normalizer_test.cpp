#include "awareauto/error.hpp"
#include "awareauto/normalizer.hpp"

#include "doctest.h"

using namespace awareauto;
using nlohmann::json;

namespace {

std::size_t count(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
    return n;
}

} // namespace

TEST_CASE("the sofa sentence") {
    UserExpression e;
    e.posture_activity = "sits";
    e.position = "sofa";
    e.gesture = "points";
    e.gesture_target = "ceiling light";
    e.speech = "Turn on this light when I sit here.";
    CHECK(describe_expression(e) ==
          R"(The user sits on the sofa, points towards ceiling light, and says, "Turn on this light when I sit here.")");
}

TEST_CASE("speech only") {
    UserExpression e;
    e.speech = "Turn off everything.";
    CHECK(describe_expression(e) == R"(The user says, "Turn off everything.")");
}

TEST_CASE("two clauses join with and") {
    UserExpression e;
    e.posture_activity = "lies";
    e.position = "bed";
    e.speech = "Lights off.";
    CHECK(describe_expression(e) == R"(The user lies on the bed and says, "Lights off.")");
    e.posture_activity.reset();
    CHECK(describe_expression(e) == R"(The user is on the bed and says, "Lights off.")");
    e.position = "my desk";
    CHECK(describe_expression(e) == R"(The user is on my desk and says, "Lights off.")");
}

TEST_CASE("orientation goes after position and before the gesture") {
    UserExpression e;
    e.posture_activity = "sits";
    e.position = "sofa";
    e.orientation = "faces the TV";
    e.gesture = "snaps fingers";
    e.speech = "Now.";
    CHECK(describe_expression(e) == R"(The user sits on the sofa, faces the TV, snaps fingers, and says, "Now.")");
}

TEST_CASE("every presence subset renders cleanly") {
    for (int mask = 0; mask < 32; ++mask) {
        UserExpression e;
        if (mask & 1) e.posture_activity = "sits";
        if (mask & 2) e.position = "sofa";
        if (mask & 4) e.orientation = "faces the window";
        if (mask & 8) e.gesture = "waves";
        if ((mask & 16) && (mask & 8)) e.gesture_target = "TV";
        e.speech = "Do it, please.";
        const auto s = describe_expression(e);
        CAPTURE(s);
        CHECK(s.rfind("The user ", 0) == 0);
        CHECK(count(s, "says,") == 1);
        CHECK(s.size() >= e.speech.size() + 2);
        CHECK(s.substr(s.size() - e.speech.size() - 2) == "\"" + e.speech + "\"");
        for (const char* bad : {",,", ", ,", "  ", " ,", "and and", "on the the"}) CHECK(s.find(bad) == std::string::npos);
        const int clauses = 1 + ((mask & 3) != 0) + ((mask & 4) != 0) + ((mask & 8) != 0);
        if (clauses == 2) CHECK(s.find(" and says,") != std::string::npos);
        if (clauses == 2) CHECK(s.find(", and says,") == std::string::npos);
        if (clauses >= 3) CHECK(s.find(", and says,") != std::string::npos);
        if (!(mask & 2)) CHECK(s.find(" on ") == std::string::npos);
        if (!(mask & 16) || !(mask & 8)) CHECK(s.find("towards") == std::string::npos);
    }
}

TEST_CASE("context block") {
    ContextSnapshot s;
    s.time = "19:30";
    s.weekday = "Friday";
    s.temperature = 26.5;
    s.humidity = 40;
    CHECK(render_context_block(s) == "Context: time=19:30 Friday, temperature=26.5C, humidity=40%.");
    s.device_states["TV"]["switch"] = "on";
    s.device_states["ceiling light"]["brightness"] = "80";
    CHECK(render_context_block(s) ==
          "Context: time=19:30 Friday, temperature=26.5C, humidity=40%.\nDevice states: TV.switch=on; ceiling light.brightness=80.");

    UserExpression e;
    e.speech = "Hi.";
    CHECK(normalize_expression(e, s) == render_context_block(s) + "\nThe user says, \"Hi.\"");
}

TEST_CASE("invalid expressions") {
    UserExpression e;
    e.speech = "   ";
    CHECK_THROWS_AS(describe_expression(e), InvalidArgument);
    e.speech = "ok";
    e.gesture_target = "TV";
    CHECK_THROWS_AS(describe_expression(e), InvalidArgument);

    CHECK_THROWS_AS(expression_from_json(json::parse(R"({"posture_activity":"sits"})")), SchemaError);
    CHECK_THROWS_AS(expression_from_json(json::parse(R"({"speech":""})")), SchemaError);
    CHECK_THROWS_AS(expression_from_json(json::parse(R"({"speech":"x","gesture_target":"TV"})")), SchemaError);
    try {
        expression_from_json(json::parse(R"({"speech": 5})"));
        FAIL("expected SchemaError");
    } catch (const SchemaError& err) {
        CHECK(err.pointer() == "/speech");
    }
}

TEST_CASE("expression JSON round-trip") {
    auto e = expression_from_json(json::parse(R"({"speech":"x","gesture":"points","gesture_target":"TV","position":null})"));
    CHECK(e.gesture == "points");
    CHECK_FALSE(e.position);
    CHECK(expression_from_json(to_json(e)) == e);
}
