#include "hofer/exact.hpp"

#include <doctest.h>

#include <cmath>

using namespace hofer;

TEST_CASE("decimal and fraction literals parse exactly") {
    CHECK(parse_rational("0.1") == Rational(1, 10));
    CHECK(parse_rational("-3/4") == Rational(-3, 4));
    CHECK(parse_rational("1e-3") == Rational(1, 1000));
    CHECK(parse_rational("2.5E2") == Rational(250));
    CHECK(parse_rational("7") == Rational(7));
    CHECK_THROWS(parse_rational("1/0"));
    CHECK_THROWS(parse_rational("abc"));
}

TEST_CASE("doubles convert without rounding") {
    CHECK(rational_from_double(0.5) == Rational(1, 2));
    CHECK(rational_from_double(0.1) != Rational(1, 10));
    CHECK(to_double(rational_from_double(0.1)) == 0.1);
}

TEST_CASE("floor, ceil, fractional part and circle norm") {
    CHECK(floor_of(Rational(-1, 3)) == -1);
    CHECK(ceil_of(Rational(-1, 3)) == 0);
    CHECK(frac_of(Rational(-1, 3)) == Rational(2, 3));
    CHECK(circle_norm(Rational(7, 10)) == Rational(3, 10));
    CHECK(circle_norm(Rational(5, 2)) == Rational(1, 2));
    CHECK(bit_length(BigInt(0)) == 0);
    CHECK(bit_length(BigInt(255)) == 8);
    CHECK(bit_length(BigInt(256)) == 9);
}

TEST_CASE("exp enclosure brackets e") {
    auto iv = exp_enclosure(Rational(1), 80);
    CHECK(iv.lo <= iv.hi);
    CHECK(to_double(iv.lo) <= std::exp(1.0) + 1e-15);
    CHECK(to_double(iv.hi) >= std::exp(1.0) - 1e-15);
    CHECK(to_double(iv.hi - iv.lo) < 1e-20);
}

TEST_CASE("comparison with exp is exact") {
    CHECK(compare_with_exp(Rational(1), Rational(0)) == 0);
    CHECK(compare_with_exp(Rational(2718281828, 1000000000), Rational(1)) < 0);
    CHECK(compare_with_exp(Rational(2718281829, 1000000000), Rational(1)) > 0);
    CHECK(compare_with_exp(Rational(1, 1000), Rational(-7)) > 0);  // e^-7 ~ 9.1e-4
    CHECK(compare_with_exp(Rational(1, 1100), Rational(-7)) < 0);
}

TEST_CASE("ceil of exp") {
    CHECK(ceil_exp(Rational(1)) == 3);
    CHECK(ceil_exp(Rational(2)) == 8);     // e^2 = 7.389
    CHECK(ceil_exp(Rational(34)) == BigInt("583461742527455"));
}

TEST_CASE("log2 of exp brackets") {
    for (int x : {1, 5, 100, 12345}) {
        auto lo = floor_log2_exp_lower(Rational(x));
        auto hi = ceil_log2_exp_upper(Rational(x));
        double v = x / std::log(2.0);
        CHECK(static_cast<double>(lo) <= v);
        CHECK(static_cast<double>(hi) >= v);
        CHECK(hi - lo <= 2);
    }
}
