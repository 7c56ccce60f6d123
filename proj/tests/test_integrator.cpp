#include "hofer/errors.hpp"
#include "hofer/map_expr.hpp"
#include "hofer/norms.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace hofer;

namespace {

const PlateauProfile kProfile{{0.1, 0.3, 0.7, 0.9}};

struct Family {
    const char* name;
    Manifold m;
    HamiltonianSpec h;
};

std::vector<Family> families() {
    auto A = ManifoldKind::Annulus, P = ManifoldKind::Plane, S = ManifoldKind::Sphere;
    HamiltonianSpec td;
    td.manifold = A;
    td.segments = {{0.5, {HamiltonianTerm::wave(0.05, 2, 0.1, kProfile)}},
                   {0.5, {HamiltonianTerm::action(0.02), HamiltonianTerm::wave(0.03, 1, 0.4, kProfile)}}};
    return {
        {"annulus action+wave", Manifold::annulus(),
         HamiltonianSpec::autonomous(A, {HamiltonianTerm::action(0.03), HamiltonianTerm::wave(0.06, 3, 0.2, kProfile)})},
        {"annulus cutoff", Manifold::annulus(),
         HamiltonianSpec::autonomous(A, {HamiltonianTerm::cutoff_linear(0.2, 0.5, kProfile)})},
        {"annulus time-dependent", Manifold::annulus(), td},
        {"plane bump", Manifold::plane(0, 0, 2), HamiltonianSpec::autonomous(P, {HamiltonianTerm::bump({0.2, -0.1}, 1.0, 0.08)})},
        {"plane quadratic", Manifold::plane(), HamiltonianSpec::autonomous(P, {HamiltonianTerm::quadratic(0.4)})},
        {"plane cutoff", Manifold::plane(0, 0, 1),
         HamiltonianSpec::autonomous(P, {HamiltonianTerm::cutoff_linear(0.3, 0.0, PlateauProfile{{-0.9, -0.5, 0.5, 0.9}},
                                                                         PlateauProfile{{-0.9, -0.5, 0.5, 0.9}})})},
        {"sphere height", Manifold::sphere(), HamiltonianSpec::autonomous(S, {HamiltonianTerm::sphere_height(0.1)})},
        {"sphere cutoff", Manifold::sphere(),
         HamiltonianSpec::autonomous(S, {HamiltonianTerm::cutoff_linear(0.1, 0.0, PlateauProfile{{-0.8, -0.4, 0.4, 0.8}})})},
    };
}

}  // namespace

TEST_CASE("implicit midpoint preserves area at step 1e-3 for every family") {
    for (const auto& fam : families()) {
        CAPTURE(fam.name);
        MapExpr f = MapExpr::flow(fam.h, 1.0, {1e-3, 1e-13, 80, FlowMethod::Midpoint});
        CHECK(symplecticity_defect(f, fam.m, {{8, 8}, 0}) <= 1e-8);
    }
}

TEST_CASE("midpoint converges at second order") {
    for (const auto& fam : families()) {
        CAPTURE(fam.name);
        if (fam.m.kind == ManifoldKind::Sphere && fam.h.segments[0].terms[0].kind == TermKind::SphereHeight) continue;
        Point p = fam.m.kind == ManifoldKind::Sphere ? Point::sphere_polar(1.2, 0.4)
                  : fam.m.kind == ManifoldKind::Plane ? Point::plane(0.25, -0.15)
                                                      : Point::annulus(0.3, 0.45);
        auto run = [&](double h) { return integrate_flow(fam.h, 1.0, {h, 1e-14, 100, FlowMethod::Midpoint}, p, false).p; };
        Point ref = run(1e-4);
        double e1 = distance(run(0.04), ref), e2 = distance(run(0.02), ref);
        if (e1 < 1e-12) continue;  // exact for this family
        CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
    }
}

TEST_CASE("closed forms match the midpoint rule for momentum-only Hamiltonians") {
    auto h = HamiltonianSpec::autonomous(ManifoldKind::Annulus, {HamiltonianTerm::cutoff_linear(0.2, 0.5, kProfile)});
    Point p = Point::annulus(0.3, 0.4);
    auto a = integrate_flow(h, 1.0, {1e-2, 1e-13, 80, FlowMethod::Auto}, p, true);
    auto b = integrate_flow(h, 1.0, {1e-2, 1e-13, 80, FlowMethod::Midpoint}, p, true);
    CHECK(distance(a.p, b.p) < 1e-12);
    auto s = HamiltonianSpec::autonomous(ManifoldKind::Sphere, {HamiltonianTerm::sphere_height(0.25)});
    auto q = integrate_flow(s, 1.0, {1e-2, 1e-13, 80, FlowMethod::Auto}, Point::sphere({1, 0, 0}), false);
    CHECK(q.p.x[1] == doctest::Approx(1.0));
}

TEST_CASE("negative time inverts the flow") {
    auto fam = families()[2];
    Point p = Point::annulus(0.6, 0.35);
    IntegratorParams ip{1e-3, 1e-14, 80, FlowMethod::Midpoint};
    auto fwd = integrate_flow(fam.h, 1.0, ip, p, false);
    auto back = integrate_flow(fam.h, -1.0, ip, fwd.p, false);
    CHECK(distance(back.p, p) < 1e-10);
}

TEST_CASE("integrator parameters are validated") {
    CHECK_THROWS((IntegratorParams{0.0, 1e-12, 60, FlowMethod::Auto}.validate()));
    CHECK_THROWS((IntegratorParams{1e-3, 1e-9, 60, FlowMethod::Auto}.validate()));
    CHECK_THROWS((IntegratorParams{1e-3, 1e-12, 1, FlowMethod::Auto}.validate()));
}

TEST_CASE("plane-only terms are refused on the annulus") {
    CHECK_THROWS(HamiltonianSpec::autonomous(ManifoldKind::Annulus, {HamiltonianTerm::quadratic(1.0)}));
}

TEST_CASE("a starved fixed-point solve reports an integration error") {
    auto h = HamiltonianSpec::autonomous(ManifoldKind::Annulus, {HamiltonianTerm::wave(0.5, 4, 0.0, kProfile)});
    CHECK_THROWS_AS(integrate_flow(h, 1.0, {0.5, 1e-14, 2, FlowMethod::Midpoint}, Point::annulus(0.1, 0.5), false),
                    IntegrationError);
}
