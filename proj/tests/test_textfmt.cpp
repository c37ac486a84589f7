#include "sepsikit/textfmt.hpp"

#include <doctest.h>

#include <cmath>

using namespace sepsikit;

TEST_CASE("values render in the measurement style") {
    CHECK(textfmt::value(49.0) == "49.0");
    CHECK(textfmt::value(1095.0) == "1095.0");
    CHECK(textfmt::value(310.0) == "310.0");
    CHECK(textfmt::value(166.0 / 3.0) == "55.333");
    CHECK(textfmt::value(203.0 / 3.0) == "67.667");
    CHECK(textfmt::value(0.4) == "0.4");
    CHECK(textfmt::value(1.8) == "1.8");
    CHECK(textfmt::value(62.8) == "62.8");
    CHECK(textfmt::value(0.5) == "0.5");
    CHECK(textfmt::value(-0.0001) == "0.0");
}

TEST_CASE("vasopressor slots print a bare zero") {
    CHECK(textfmt::rate(0.0) == "0");
    CHECK(textfmt::rate(0.05) == "0.05");
    CHECK(textfmt::rate(16.0) == "16.0");
}

TEST_CASE("times keep two decimals") {
    CHECK(textfmt::time_point(-22.37) == "-22.37");
    CHECK(textfmt::time_point(-22.0) == "-22.00");
    CHECK(textfmt::time_point(3.5) == "3.50");
}

TEST_CASE("parse_number accepts full tokens only") {
    CHECK(textfmt::parse_number("49.0") == 49.0);
    CHECK(textfmt::parse_number("-22.37") == -22.37);
    CHECK(textfmt::parse_number("+3") == 3.0);
    CHECK_FALSE(textfmt::parse_number("49.0x").has_value());
    CHECK_FALSE(textfmt::parse_number("").has_value());
    CHECK_FALSE(textfmt::parse_number("nan").has_value());
    CHECK_FALSE(textfmt::parse_number("inf").has_value());
}

TEST_CASE("format then parse stays on the 3-decimal grid") {
    for (double v : {0.01, 0.21, 55.333333333, 1094.9999999999998, 499.99999999999994, 12.125}) {
        auto parsed = textfmt::parse_number(textfmt::value(v));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == doctest::Approx(textfmt::round3(v)).epsilon(1e-12));
    }
    CHECK(textfmt::round3(499.99999999999994) == 500.0);
}
