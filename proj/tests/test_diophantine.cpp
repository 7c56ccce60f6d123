#include "hofer/diophantine.hpp"

#include <doctest.h>

#include <memory>

using namespace hofer;

namespace {

TorusComponent golden() { return TorusComponent::irrational(std::make_shared<const ContinuedFraction>(golden_mean())); }

}  // namespace

TEST_CASE("rational torus norms are exact") {
    auto d = torus_norm(TorusComponent::rational(Rational(7, 10)));
    CHECK(d.exact);
    CHECK(d.lower == Rational(3, 10));
    CHECK(torus_norm(TorusComponent::rational(Rational(3))).upper == 0);
}

TEST_CASE("scaled irrational components keep exact multipliers") {
    auto g = golden();
    auto g8 = g.scaled(BigInt(8));
    CHECK(g8.multiplier() == 8);
    auto d = torus_norm(g8);
    CHECK(to_double(d.lower) == doctest::Approx(0.05572809000084122).epsilon(1e-12));
    CHECK(d.lower <= d.upper);
    CHECK_FALSE(g.negated().is_rational());
}

TEST_CASE("golden mean has no exponential-rate witnesses") {
    auto cert = exp_liouville_witnesses(golden_mean(), Rational(1), BigInt(10000));
    CHECK(cert.witnesses.empty());
    CHECK(cert.scan_complete);
    CHECK(verify_certificate(cert, golden()));
}

TEST_CASE("constructed expansion follows the coefficient schedule") {
    auto built = construct_exp_liouville(CSchedule::parse("c_n=n"), {0, 2}, 4);
    REQUIRE(built.stages.size() == 3);
    CHECK(built.stages[0].q == 2);
    CHECK(built.stages[1].q == 17);
    CHECK(built.stages[2].q == BigInt("9918849622966737"));
    CHECK(built.stages[2].next_symbolic);
    CHECK(built.infeasible.has_value());
    CHECK(built.cf.has_tail_bound());
    CHECK(built.cf.quotient(2) == 8);
    CHECK(built.cf.quotient(3) == BigInt("583461742527455"));
}

TEST_CASE("constructed expansion carries verified witnesses") {
    auto built = construct_exp_liouville(CSchedule::parse("c_n=n"), {0, 2}, 4);
    auto alpha = TorusComponent::irrational(std::make_shared<const ContinuedFraction>(built.cf));
    auto cert = exp_liouville_witnesses(built.cf, Rational(1), BigInt(10000));
    REQUIRE(cert.witnesses.size() >= 1);
    CHECK(cert.witnesses.front().k == 2);
    CHECK(verify_certificate(cert, alpha));
}

TEST_CASE("schedule parser") {
    auto s = CSchedule::parse("c_n=n");
    CHECK(s.at(3) == 3);
    CHECK(s.unbounded());
    auto t = CSchedule::parse("c_n=1/2");
    CHECK(t.at(10) == Rational(1, 2));
    CHECK_FALSE(t.unbounded());
    CHECK_THROWS(CSchedule::parse("nonsense"));
}

TEST_CASE("equidistribution density of the golden rotation") {
    auto d = equidistribution_density({golden()}, Rational(1, 10), 100000);
    CHECK(d.n == 100000);
    CHECK(d.density() == doctest::Approx(0.2).epsilon(0.05));
    CHECK(d.resolved_exactly < 100);  // only near-boundary j need big arithmetic
}

TEST_CASE("rational rotation returns periodically") {
    auto d = equidistribution_density({TorusComponent::rational(Rational(1, 3))}, Rational(1, 100), 999);
    CHECK(d.count == 333);
}

TEST_CASE("Ostrowski digits reconstruct N") {
    auto cf = golden_mean();
    for (std::uint64_t N : {1u, 7u, 100u, 12345u}) {
        auto digits = ostrowski_digits(cf, BigInt(N));
        auto cs = cf.convergents(digits.size() + 1);
        BigInt sum = 0;
        for (std::size_t i = 0; i < digits.size(); ++i) sum += digits[i] * cs[i].q;
        CHECK(sum == N);
    }
    CHECK(ostrowski_discrepancy_bound(cf, 100000) < 0.01);
}

TEST_CASE("rational detection within tolerance") {
    RationalInterval x{Rational(333, 1000), Rational(334, 1000)};
    auto r = is_rational_within(x, BigInt(10), Rational(1, 100));
    REQUIRE(r.has_value());
    CHECK(*r == Rational(1, 3));
    CHECK_FALSE(is_rational_within(x, BigInt(2), Rational(1, 1000)).has_value());
}
