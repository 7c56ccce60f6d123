#include "hofer/continued_fraction.hpp"

#include <doctest.h>

using namespace hofer;

namespace {

std::vector<BigInt> fibonacci(int n) {
    std::vector<BigInt> f{0, 1};
    while (static_cast<int>(f.size()) < n) f.push_back(f[f.size() - 1] + f[f.size() - 2]);
    return f;
}

}  // namespace

TEST_CASE("golden mean convergents are Fibonacci ratios") {
    auto cs = golden_mean().convergents(31);
    auto f = fibonacci(40);
    REQUIRE(cs.size() == 31);
    for (std::size_t n = 0; n <= 30; ++n) {
        CHECK(cs[n].p == f[n]);
        CHECK(cs[n].q == f[n + 1]);
    }
}

TEST_CASE("best approximation bound holds exactly along golden convergents") {
    auto cf = golden_mean();
    auto cs = cf.convergents(32);
    auto iv = cf.bracket(256);
    for (std::size_t n = 0; n + 1 < cs.size(); ++n) {
        Rational bound(BigInt(1), cs[n + 1].q);
        Rational a = cs[n].q * iv.lo - cs[n].p, b = cs[n].q * iv.hi - cs[n].p;
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        CHECK(a < bound);
        CHECK(b < bound);
    }
}

TEST_CASE("convergent determinant law") {
    CHECK(convergent_law_holds(golden_mean().convergents(40)));
    CHECK(convergent_law_holds(sqrt_two().convergents(40)));
    std::vector<Convergent> broken{{0, 1}, {1, 1}, {1, 3}};
    CHECK_FALSE(convergent_law_holds(broken));
}

TEST_CASE("rational expansion terminates and round trips") {
    auto cf = cf_expand(Rational(415, 93));
    CHECK(cf.is_rational());
    CHECK(cf.prefix() == std::vector<BigInt>{4, 2, 6, 7});
    CHECK(cf.value() == Rational(415, 93));
}

TEST_CASE("quadratic irrationals expand periodically") {
    auto s2 = cf_expand(QuadraticIrrational{0, 2, 1});
    CHECK(s2.is_periodic());
    CHECK(s2.quotient(0) == 1);
    CHECK(s2.quotient(1) == 2);
    CHECK(s2.quotient(9) == 2);
    auto s7 = cf_expand(QuadraticIrrational{0, 7, 1});  // [2; 1, 1, 1, 4]
    CHECK(s7.quotient(0) == 2);
    CHECK(s7.period() == std::vector<BigInt>{1, 1, 1, 4});
    CHECK(s7.to_double() == doctest::Approx(2.6457513110645906));
}

TEST_CASE("bracket width shrinks to the requested precision") {
    auto iv = sqrt_two().bracket(200);
    CHECK(iv.lo < iv.hi);
    CHECK(iv.hi - iv.lo <= Rational(BigInt(1), BigInt(1) << 200));
    CHECK(iv.lo * iv.lo < 2);
    CHECK(iv.hi * iv.hi > 2);
}

TEST_CASE("tail-bound expansions are irrational with a known prefix") {
    auto cf = ContinuedFraction::with_tail_bound({0, 2, 8}, Rational(34));
    CHECK_FALSE(cf.is_rational());
    CHECK(cf.has_tail_bound());
    CHECK(cf.available() == 3);
    auto cs = cf.convergents(10);
    CHECK(cs.size() == 3);
    CHECK(cs.back().q == 17);
}
