#include "hofer/errors.hpp"
#include "hofer/experiments.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

using namespace hofer;

namespace {

TorusComponent golden() { return TorusComponent::irrational(std::make_shared<const ContinuedFraction>(golden_mean())); }

}  // namespace

TEST_CASE("portable uniform draws are reproducible") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    Rng c(1);
    CHECK(c.uniform() == doctest::Approx(static_cast<double>(std::mt19937_64(1)() >> 11) * 0x1.0p-53));
}

TEST_CASE("empty harness") {
    HarnessConfig cfg;
    cfg.count = 0;
    auto rep = inequality_harness(cfg, inequality_constants(0.1, 1.0, 1.0), 1.0);
    CHECK(rep.samples.empty());
    CHECK(rep.violations == 0);
}

TEST_CASE("small annulus harness has no violations and full witness rate") {
    HarnessConfig cfg;
    cfg.count = 12;
    cfg.grid = {{16, 16}, 0};
    auto k = inequality_constants(0.1, 1.0, std::sqrt(1.25));
    auto rep = inequality_harness(cfg, k, 1.0);
    CHECK(rep.samples.size() == 12);
    CHECK(rep.violations == 0);
    CHECK(rep.witnesses_found == rep.sub_delta);
    auto again = inequality_harness(cfg, k, 1.0);
    CHECK(again.samples[5].description == rep.samples[5].description);
    CHECK(again.samples[5].holder.c0.raw == rep.samples[5].holder.c0.raw);
}

TEST_CASE("rigidity of a golden rotation uses exact distances") {
    RigidityConfig rc;
    rc.alpha = golden();
    for (int q : {1, 2, 3, 5, 8, 13, 21, 34, 55, 89}) rc.iterates.push_back(q);
    rc.grid = {{16, 16}, 0};
    auto rep = rigidity_scan(rc);
    REQUIRE(rep.rows.size() == 10);
    for (const auto& r : rep.rows) {
        CHECK(r.c0.lower <= r.torus_dist.approx());
        CHECK(r.c0.upper >= to_double(r.torus_dist.lower));
        CHECK(r.holder_ok);
    }
    CHECK(rep.c0_strictly_decreasing);
}

TEST_CASE("rigidity stays below Lipschitz envelope for a shear conjugator") {
    RigidityConfig rc;
    rc.alpha = golden();
    rc.h = MapExpr::shear(ManifoldKind::Annulus, 1.0);
    for (int q : {3, 8, 21, 55, 144}) rc.iterates.push_back(q);
    rc.grid = {{16, 16}, 0};
    auto rep = rigidity_scan(rc);
    const double lip = (1 + std::sqrt(5.0)) / 2;
    for (const auto& r : rep.rows) CHECK(r.c0.lower <= (1 + lip) * r.torus_dist.approx());
}

TEST_CASE("exponential chain is decided exactly") {
    auto built = construct_exp_liouville(CSchedule::parse("c_n=n"), {0, 2}, 3);
    auto a = TorusComponent::irrational(std::make_shared<const ContinuedFraction>(built.cf));
    const auto& st = built.stages[1];  // q = 17, c = 2
    auto d = torus_norm(a.scaled(st.q));
    CHECK(exp_chain_holds(d, 1.0, 1.0, 1, st.c, st.q));
    auto g = torus_norm(golden().scaled(BigInt(89)));
    CHECK_FALSE(exp_chain_holds(g, 1.0, 1.0, 1, Rational(1), BigInt(89)));
}

TEST_CASE("recurrence: golden rotation and a ball") {
    Manifold m = Manifold::annulus();
    RecurrenceSet A;
    A.radius = 0.1;
    auto rep = recurrence_experiment({golden()}, A, 100000, default_action(m), m);
    CHECK(rep.e_lower == doctest::Approx(0.01 * std::numbers::pi));
    CHECK(rep.C2 == doctest::Approx(0.5));
    CHECK(rep.threshold == doctest::Approx(0.005 * std::numbers::pi));
    CHECK(rep.density == doctest::Approx(0.0314).epsilon(0.02));
    CHECK(rep.passed);
}

TEST_CASE("recurrence: rational rotations return periodically") {
    Manifold m = Manifold::annulus();
    RecurrenceSet A;
    A.radius = 0.1;
    auto rep = recurrence_experiment({TorusComponent::rational(Rational(1, 3))}, A, 3000, default_action(m), m);
    CHECK(rep.density >= 1.0 / 3 - 1e-12);
    CHECK(rep.passed);
}

TEST_CASE("recurrence: Lagrangian circle") {
    Manifold m = Manifold::annulus();
    RecurrenceSet L;
    L.kind = RecurrenceSet::Kind::LagrangianCircle;
    auto rep = recurrence_experiment({golden()}, L, 1000, default_action(m), m);
    CHECK(rep.density == 1.0);
    CHECK(rep.passed);
}

TEST_CASE("random quadratic irrationals are periodic and in the unit interval") {
    Rng rng(5);
    for (int i = 0; i < 10; ++i) {
        auto a = random_quadratic(rng);
        CHECK_FALSE(a.is_rational());
        double v = a.to_double();
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("entropy slopes") {
    auto rot = entropy_slope(MapExpr::rotation(ManifoldKind::Annulus, Rational(1, 7)), Manifold::annulus(), 16, {{8, 8}, 0});
    CHECK(rot.slope == 0.0);
    CHECK(rot.bound == 0.0);
    auto cat = entropy_slope(MapExpr::linear({2, 1, 1, 1}), Manifold::plane(), 40, {{4, 4}, 0});
    CHECK(cat.slope == doctest::Approx(std::log((3 + std::sqrt(5.0)) / 2)).epsilon(0.02));
    CHECK(cat.bound == doctest::Approx(2 * cat.slope));
    CHECK_THROWS(entropy_slope(MapExpr::linear({2, 1, 1, 1}), Manifold::plane(), 4, {{4, 4}, 0}));
}

TEST_CASE("Hofer bound converges along convergents") {
    auto cs = golden_mean().convergents(20);
    std::vector<TorusVector> seq;
    for (std::size_t i = 1; i < cs.size(); ++i) seq.push_back({TorusComponent::rational(Rational(cs[i].p, cs[i].q))});
    Manifold m = Manifold::annulus();
    const TorusComponent g = golden();  // components compare by expansion identity
    auto rows = hofer_convergence_diagnostic(seq, {g}, {1}, default_action(m), m);
    REQUIRE(rows.size() == seq.size());
    for (const auto& r : rows) CHECK(r.ok);
    CHECK(rows.back().diff < rows.front().diff);
    auto flat = hofer_convergence_diagnostic({{g}, {g}}, {g}, {1, 5}, default_action(m), m);
    for (const auto& r : flat) CHECK(r.diff == 0.0);
}
