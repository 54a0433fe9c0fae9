#include <doctest.h>

#include <cmath>

#include "succession/errors.hpp"
#include "succession/rational.hpp"

using succession::Rational;

TEST_CASE("rational arithmetic stays canonical") {
    const Rational a(531442, 590500);
    CHECK(a.to_fraction_string() == "265721/295250");
    CHECK(a == Rational(265721, 295250));

    const Rational b(1, 3);
    CHECK((a * b) * 3 == a);
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
    CHECK(Rational(1) - Rational(1, 1000001) == Rational(1000000, 1000001));
    CHECK(-Rational(1, 2) < Rational(0));
}

TEST_CASE("rational parsing accepts fractions and decimal literals") {
    CHECK(Rational::parse("9/10") == Rational(9, 10));
    CHECK(Rational::parse("0.9") == Rational(9, 10));
    CHECK(Rational::parse("-0.25") == Rational(-1, 4));
    CHECK(Rational::parse("3") == Rational(3));
    CHECK(Rational::parse("1.5e-3") == Rational(3, 2000));
    CHECK(Rational::parse("2e2") == Rational(200));
    CHECK(!Rational::try_parse("").has_value());
    CHECK(!Rational::try_parse("1/0").has_value());
    CHECK(!Rational::try_parse("x").has_value());
    CHECK(!Rational::try_parse("1.2.3").has_value());
    CHECK_THROWS_AS((void)Rational::parse("nope"), succession::ParseError);
}

TEST_CASE("rational powers") {
    CHECK(Rational(1, 2).pow(10) == Rational(1, 1024));
    CHECK(Rational(9, 10).pow(6) == Rational(531441, 1000000));
    CHECK(Rational(0).pow(0) == Rational(1));
    CHECK(Rational(0).pow(5) == Rational(0));
}

TEST_CASE("to_double rounds to nearest") {
    CHECK(Rational(1, 2).to_double() == 0.5);
    CHECK(Rational(9, 10).to_double() == 0.9);
    CHECK(Rational(1, 3).to_double() == doctest::Approx(1.0 / 3.0).epsilon(1e-16));
    const double big = Rational(1826214, 1826215).to_double();
    CHECK(big == doctest::Approx(0.99999945241935).epsilon(1e-13));
}

TEST_CASE("decimal rendering uses round-half-even on the exact value") {
    CHECK(Rational(1826214, 1826215).to_decimal_string(8) == "0.99999945");
    CHECK(Rational(1000, 1001).to_decimal_string(8) == "0.99900100");
    CHECK(Rational(1, 2).to_decimal_string(8) == "0.50000000");

    // Exact ties go to the even last digit.
    CHECK(Rational(1, 8).to_decimal_string(2) == "0.12");   // 0.125 -> 2 is even
    CHECK(Rational(3, 8).to_decimal_string(2) == "0.38");   // 0.375 -> 7 rounds up to 8
    CHECK(Rational(1, 2).to_decimal_string(0) == "0");      // 0.5 -> 0 is even
    CHECK(Rational(3, 2).to_decimal_string(0) == "2");      // 1.5 -> 2 is even
    CHECK(Rational(5, 2).to_decimal_string(0) == "2");      // 2.5 -> 2 is even

    // Carries propagate into the integer part.
    CHECK(Rational(999, 1000).to_decimal_string(2) == "1.00");
    CHECK(Rational(-1, 8).to_decimal_string(2) == "-0.12");
    CHECK(Rational(265721, 295250).to_decimal_string(7) == "0.8999865");
}
