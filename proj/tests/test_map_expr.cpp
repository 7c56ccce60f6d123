#include "hofer/errors.hpp"
#include "hofer/map_expr.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

using namespace hofer;

namespace {

const PlateauProfile kProfile{{0.1, 0.3, 0.7, 0.9}};

MapExpr wave_flow(int q, double a, double phase = 0.3) {
    return MapExpr::flow(HamiltonianSpec::autonomous(ManifoldKind::Annulus, {HamiltonianTerm::wave(a, q, phase, kProfile)}),
                         1.0, {1e-2, 1e-13, 80, FlowMethod::Auto});
}

TorusVector golden() {
    return {TorusComponent::irrational(std::make_shared<const ContinuedFraction>(golden_mean()))};
}

// Central differences in the chart coordinates of a flat manifold.
Mat2 fd_jacobian(const MapExpr& f, const Point& p, double h) {
    auto at = [&](double dx, double dy) {
        Point q = p;
        q.x[0] += dx;
        q.x[1] += dy;
        return evaluate(f, q).x;
    };
    auto unwrap = [&](double d) { return p.manifold == ManifoldKind::Annulus ? d - std::round(d) : d; };
    Vec3 xp = at(h, 0), xm = at(-h, 0), yp = at(0, h), ym = at(0, -h);
    return {unwrap(xp[0] - xm[0]) / (2 * h), unwrap(yp[0] - ym[0]) / (2 * h), (xp[1] - xm[1]) / (2 * h),
            (yp[1] - ym[1]) / (2 * h)};
}

}  // namespace

TEST_CASE("composition applies the last map first") {
    MapExpr s = MapExpr::shear(ManifoldKind::Annulus, 1.0);
    MapExpr r = MapExpr::rotation(ManifoldKind::Annulus, Rational(1, 4));
    Point p = Point::annulus(0.1, 0.5);
    Point q = evaluate(MapExpr::compose({s, r}), p);  // shear after rotation
    CHECK(q.x[0] == doctest::Approx(0.85));
    Point q2 = evaluate(MapExpr::compose({r, s}), p);
    CHECK(q2.x[0] == doctest::Approx(0.85));
}

TEST_CASE("factory normalisations") {
    auto A = ManifoldKind::Annulus;
    MapExpr r = MapExpr::rotation(A, Rational(1, 3));
    CHECK(MapExpr::inverse(r).kind() == MapExpr::Kind::Rotation);
    CHECK(MapExpr::iterate(r, 5).kind() == MapExpr::Kind::Rotation);
    CHECK(MapExpr::iterate(r, 0).kind() == MapExpr::Kind::Identity);
    MapExpr w = wave_flow(2, 0.05);
    CHECK(MapExpr::inverse(MapExpr::inverse(w)).canonical() == w.canonical());
    CHECK(MapExpr::compose({MapExpr::identity(A), w}).canonical() == w.canonical());
    CHECK(MapExpr::iterate(MapExpr::iterate(w, 3), 4).node().count == 12);
    CHECK(MapExpr::iterate(w, 1).canonical() == w.canonical());
}

TEST_CASE("iterates of conjugated rotations stay conjugated rotations") {
    MapExpr h = wave_flow(3, 0.04);
    MapExpr phi = MapExpr::conjugate(h, MapExpr::rotation(ManifoldKind::Annulus, golden()));
    auto cr = as_conjugated_rotation(MapExpr::iterate(phi, 1000000));
    REQUIRE(cr.has_value());
    CHECK(cr->beta.multiplier() == 1000000);
    auto inv = as_conjugated_rotation(MapExpr::inverse(phi));
    REQUIRE(inv.has_value());
    CHECK(inv->beta.multiplier() == -1);
    CHECK_FALSE(as_conjugated_rotation(h).has_value());
}

TEST_CASE("manifold restrictions") {
    CHECK_THROWS(MapExpr::rotation(ManifoldKind::Plane, Rational(1, 2)));
    CHECK_THROWS(MapExpr::twist(ManifoldKind::Sphere, {0.0, 1.0}));
    CHECK_THROWS(MapExpr::linear({2, 0, 0, 1}));
    CHECK_NOTHROW(MapExpr::linear({2, 1, 1, 1}));
}

TEST_CASE("canonical strings separate different maps") {
    auto A = ManifoldKind::Annulus;
    CHECK(MapExpr::rotation(A, Rational(1, 3)).canonical() != MapExpr::rotation(A, Rational(1, 4)).canonical());
    CHECK(wave_flow(2, 0.05).canonical() != wave_flow(2, 0.0500001).canonical());
    CHECK(MapExpr::rotation(A, Rational(1, 3)).canonical() == MapExpr::rotation(A, Rational(4, 3)).canonical());
}

TEST_CASE("map followed by its inverse is the identity") {
    MapExpr f = MapExpr::compose({wave_flow(2, 0.05), MapExpr::shear(ManifoldKind::Annulus, 0.7), wave_flow(1, 0.03)});
    MapExpr g = MapExpr::compose({MapExpr::inverse(f), f});
    for (double th : {0.0, 0.3, 0.77})
        for (double I : {0.05, 0.5, 0.93}) {
            Point p = Point::annulus(th, I);
            Point q = evaluate(g, p);
            CHECK(distance(p, q) < 1e-10);
        }
}

TEST_CASE("analytic Jacobians agree with finite differences") {
    MapExpr f = MapExpr::compose({wave_flow(2, 0.05), MapExpr::twist(ManifoldKind::Annulus, {0.0, 0.3, 0.2})});
    for (double th : {0.1, 0.45, 0.8})
        for (double I : {0.2, 0.5, 0.75}) {
            Point p = Point::annulus(th, I);
            Mat2 J = jacobian(f, p), F = fd_jacobian(f, p, 1e-6);
            CHECK(J.a == doctest::Approx(F.a).epsilon(1e-6));
            CHECK(J.b == doctest::Approx(F.b).epsilon(1e-6));
            CHECK(J.c == doctest::Approx(F.c).epsilon(1e-6));
            CHECK(J.d == doctest::Approx(F.d).epsilon(1e-6));
            CHECK(J.det() == doctest::Approx(1.0).epsilon(1e-9));
        }
    MapExpr b = MapExpr::flow(HamiltonianSpec::autonomous(ManifoldKind::Plane, {HamiltonianTerm::bump({0.1, 0}, 1.0, 0.3)}),
                              1.0, {1e-2, 1e-13, 80, FlowMethod::Auto});
    Point p = Point::plane(0.3, 0.2);
    Mat2 J = jacobian(b, p), F = fd_jacobian(b, p, 1e-6);
    CHECK(J.a == doctest::Approx(F.a).epsilon(1e-6));
    CHECK(J.d == doctest::Approx(F.d).epsilon(1e-6));
}

TEST_CASE("sphere rotation and Jacobian") {
    MapExpr r = MapExpr::rotation(ManifoldKind::Sphere, Rational(1, 4));
    Point q = evaluate(r, Point::sphere({1, 0, 0}));
    CHECK(q.x[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(q.x[1] == doctest::Approx(1.0));
    Mat2 J = jacobian(r, Point::sphere_polar(1.0, 0.3));
    CHECK(J.det() == doctest::Approx(1.0));
    CHECK(J.max_singular() == doctest::Approx(1.0));
}

TEST_CASE("structural Lipschitz bounds") {
    Manifold m = Manifold::annulus();
    CHECK(lipschitz_bound(MapExpr::rotation(m.kind, Rational(1, 5)), m) == 1.0);
    CHECK(lipschitz_bound(MapExpr::shear(m.kind, 1.0), m) == doctest::Approx((1 + std::sqrt(5.0)) / 2));
    MapExpr w = wave_flow(2, 0.05);
    double L = lipschitz_bound(w, m);
    CHECK(L >= 1.0);
    CHECK(lipschitz_bound(MapExpr::iterate(w, 3), m) == doctest::Approx(L * L * L));
    CHECK(lipschitz_bound(MapExpr::inverse(w), m) == L);
    CHECK(numerical_noise(w) > 0);
    CHECK(rotation_speed(ManifoldKind::Sphere) == doctest::Approx(2 * std::numbers::pi));
}

TEST_CASE("iterate cap") {
    MapExpr w = wave_flow(2, 0.05);
    CHECK_THROWS(evaluate(MapExpr::iterate(w, 100000000), Point::annulus(0.1, 0.5)));
}
