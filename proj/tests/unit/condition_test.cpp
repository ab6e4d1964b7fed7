#include "awareauto/condition.hpp"

#include "doctest.h"

using namespace awareauto;

TEST_CASE("bare literal means case-insensitive equality") {
    auto c = parse_condition("on");
    CHECK(c.bare);
    CHECK(c.op == Comparator::eq);
    CHECK(c.holds("on"));
    CHECK(c.holds("ON"));
    CHECK_FALSE(c.holds("off"));
}

TEST_CASE("comparator prefixes") {
    CHECK(parse_condition("!=off").op == Comparator::ne);
    CHECK(parse_condition("<=3").op == Comparator::le);
    CHECK(parse_condition(">=26.5").op == Comparator::ge);
    CHECK(parse_condition("<20").op == Comparator::lt);
    CHECK(parse_condition(">28").op == Comparator::gt);
    CHECK(parse_condition("=on").op == Comparator::eq);
    CHECK(parse_condition("> 28").operand == "28");
}

TEST_CASE("ordering holds only between numbers") {
    auto hot = parse_condition(">28");
    CHECK(hot.holds("29"));
    CHECK(hot.holds("28.5"));
    CHECK_FALSE(hot.holds("28"));
    CHECK_FALSE(hot.holds("warm"));
    CHECK(parse_condition(">=19").holds("19"));
    CHECK(parse_condition("<=3").holds("-1"));
}

TEST_CASE("numeric equality ignores formatting") {
    CHECK(parse_condition("26").holds("26.0"));
    CHECK(parse_condition("!=26").holds("25"));
    CHECK_FALSE(parse_condition("!=26").holds("26"));
}

TEST_CASE("text with spaces and times stays literal") {
    CHECK(parse_condition("watching TV").holds("Watching TV"));
    CHECK(parse_condition("19:00").holds("19:00"));
    CHECK_FALSE(parse_condition("19:00").holds("19:01"));
    CHECK(parse_condition("!=none").holds("sofa"));
}

TEST_CASE("parse_number accepts only whole numbers or decimals") {
    CHECK(parse_number("12") == 12.0);
    CHECK(parse_number(" -3.5 ") == -3.5);
    CHECK_FALSE(parse_number("12a"));
    CHECK_FALSE(parse_number(""));
}
