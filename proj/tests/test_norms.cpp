#include "hofer/errors.hpp"
#include "hofer/norms.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

using namespace hofer;

namespace {

const PlateauProfile kProfile{{0.1, 0.3, 0.7, 0.9}};
constexpr double kPi = std::numbers::pi;

MapExpr id(ManifoldKind m) { return MapExpr::identity(m); }

}  // namespace

TEST_CASE("C0 distance of an annulus rotation") {
    Manifold m = Manifold::annulus();
    auto e = c0_distance(MapExpr::rotation(m.kind, Rational(1, 4)), id(m.kind), m, {{64, 64}, 0});
    CHECK(e.raw == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(e.lower <= 0.25);
    CHECK(e.upper >= 0.25);
    CHECK(e.margin() < 1e-9);
}

TEST_CASE("C0 distance of a sphere rotation") {
    Manifold m = Manifold::sphere();
    auto e = c0_distance(MapExpr::rotation(m.kind, Rational(1, 10)), id(m.kind), m, {{64, 64}, 0});
    CHECK(e.lower <= 0.2 * kPi);
    CHECK(e.upper >= 0.2 * kPi);
    CHECK(std::fabs(e.raw - 0.2 * kPi) < 1e-3);
}

TEST_CASE("C0 bounds are symmetric and vanish on equal maps") {
    Manifold m = Manifold::annulus();
    MapExpr s = MapExpr::shear(m.kind, 0.3);
    auto self = c0_distance(s, s, m, {{16, 16}, 0});
    CHECK(self.lower == 0);
    auto a = c0_distance(s, id(m.kind), m, {{16, 16}, 0});
    auto b = c0_distance(id(m.kind), s, m, {{16, 16}, 0});
    CHECK(a.raw == b.raw);
    CHECK(a.raw == doctest::Approx(0.3));
}

TEST_CASE("derivative norm of the unit shear is the golden ratio") {
    Manifold m = Manifold::annulus();
    auto e = derivative_norm(MapExpr::twist(m.kind, {0.0, 1.0}), m, {{16, 16}, 1});
    CHECK(std::fabs(e.lower - (1 + std::sqrt(5.0)) / 2) < 1e-6);
    CHECK(e.upper >= e.lower);
    CHECK(e.levels.size() == 2);
}

TEST_CASE("derivative norm is at least one for area-preserving maps") {
    Manifold m = Manifold::annulus();
    MapExpr w = MapExpr::flow(HamiltonianSpec::autonomous(m.kind, {HamiltonianTerm::wave(0.1, 2, 0.0, kProfile)}), 1.0,
                              {1e-2, 1e-13, 80, FlowMethod::Auto});
    auto e = derivative_norm(w, m, {{12, 12}, 1});
    CHECK(e.lower >= 1.0);
    CHECK(e.upper <= lipschitz_bound(w, m) + 1e-12);
    CHECK(symplecticity_defect(w, m, {{12, 12}, 0}) < 1e-9);
}

TEST_CASE("C1 gap of a map with itself is zero") {
    Manifold m = Manifold::annulus();
    MapExpr s = MapExpr::shear(m.kind, 0.3);
    CHECK(c1_gap(s, s, m, {{8, 8}, 0}) == 0.0);
    CHECK(c1_gap(s, id(m.kind), m, {{8, 8}, 0}) == doctest::Approx(0.3));
}

TEST_CASE("rotation Hofer bound") {
    Manifold m = Manifold::annulus();
    auto b = hofer_rotation_bound(torus_vector({Rational(1, 4)}), default_action(m), m);
    CHECK(b.tight == doctest::Approx(0.25));
    CHECK(b.tight_upper_exact == Rational(1, 4));
    CHECK(b.mu_sup == doctest::Approx(1.0));
    Manifold s = Manifold::sphere();
    auto bs = hofer_rotation_bound(torus_vector({Rational(1, 10)}), default_action(s), s);
    CHECK(bs.tight == doctest::Approx(0.1 * 4 * kPi));
    CHECK_THROWS(default_action(Manifold::plane()));
}

TEST_CASE("gamma is the oscillation for C2-small autonomous flows") {
    Manifold m = Manifold::plane(0, 0, 3);
    auto h2 = HamiltonianSpec::autonomous(m.kind, {HamiltonianTerm::bump({0, 0}, 2.0, 0.02)});
    auto g = gamma_exact_small(h2, m, {{64, 64}, 0});
    CHECK(g.exact);
    CHECK(g.value == doctest::Approx(0.02));
    CHECK(g.hessian_sup <= 0.1);
    // the same peak on a unit disc is too curved for the default threshold
    auto h1 = HamiltonianSpec::autonomous(m.kind, {HamiltonianTerm::bump({0, 0}, 1.0, 0.02)});
    auto g1 = gamma_exact_small(h1, m, {{64, 64}, 0});
    CHECK_FALSE(g1.exact);
    CHECK(g1.hessian_sup == doctest::Approx(0.16).epsilon(0.02));
    CHECK(g1.value == doctest::Approx(0.02));
}

TEST_CASE("displacement energy bounds bracket and displace") {
    Manifold m = Manifold::annulus();
    Point c = Point::annulus(0.5, 0.5);
    auto d = displacement_energy_bounds(c, 0.05, m);
    CHECK(d.lower == doctest::Approx(kPi * 0.0025));
    CHECK(d.upper >= d.lower);
    CHECK(d.shift > 2 * 0.05);
    MapExpr f = MapExpr::flow(d.displacing, 1.0, {1e-2, 1e-13, 80, FlowMethod::Auto});
    auto w = nondisplacement_witness(f, c, 0.05, m, {{6, 12}, 0});
    CHECK_FALSE(w.witness.has_value());
    Manifold s = Manifold::sphere();
    auto ds = displacement_energy_bounds(Point::sphere_polar(kPi / 2, 0), 0.1, s);
    CHECK(ds.lower == doctest::Approx(2 * kPi * (1 - std::cos(0.1))));
    CHECK(ds.upper >= ds.lower);
    CHECK_THROWS(displacement_energy_bounds(Point::sphere({0, 0, 1}), 0.1, s));
}

TEST_CASE("the identity never displaces a ball") {
    for (Manifold m : {Manifold::annulus(), Manifold::plane(), Manifold::sphere()}) {
        Point c = m.kind == ManifoldKind::Sphere ? Point::sphere_polar(1.0, 0.2)
                  : m.kind == ManifoldKind::Plane ? Point::plane(0.1, 0.1)
                                                  : Point::annulus(0.3, 0.5);
        auto w = nondisplacement_witness(id(m.kind), c, 0.05, m, {{4, 8}, 0});
        REQUIRE(w.witness.has_value());
        CHECK(distance(*w.witness, c) <= 0.05);
    }
}

TEST_CASE("Holder check on a small rotation") {
    Manifold m = Manifold::annulus();
    auto r = check_holder_inequality(MapExpr::rotation(m.kind, Rational(1, 100)), 0.01, 1.0, m, {{32, 32}, 0});
    CHECK_FALSE(r.violation);
    CHECK(r.rhs == doctest::Approx(0.1));
    CHECK(r.slack_ratio == doctest::Approx(10.0).epsilon(1e-6));
    auto bad = check_holder_inequality(MapExpr::rotation(m.kind, Rational(1, 4)), 1e-4, 1.0, m, {{32, 32}, 0});
    CHECK(bad.violation);  // understated gamma must be caught
}
