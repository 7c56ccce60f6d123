#include "hofer/errors.hpp"
#include "hofer/grid.hpp"
#include "hofer/phase_space.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace hofer;

TEST_CASE("inequality constants for a unit chart") {
    auto k = inequality_constants(1.0, 1.0, 0.0);
    CHECK(k.delta == doctest::Approx(std::numbers::pi / 4));
    CHECK(k.C_proof == doctest::Approx(8.0 / std::sqrt(std::numbers::pi)));
    CHECK(k.C == k.C_proof);
    CHECK_THROWS(inequality_constants(0.0, 1.0, 1.0));
    CHECK_THROWS(inequality_constants(1.0, 0.5, 1.0));
}

TEST_CASE("plane identity chart gives epsilon 1 and L 1") {
    Manifold m = Manifold::plane();
    Atlas a;
    a.manifold = m.kind;
    a.charts.push_back(DarbouxChart::plane_box({0, 0}, 1.0, 2.0));
    auto k = atlas_constants(a, m, make_grid(m, GridSpec::square(17)).points, 128, 65);
    CHECK(k.epsilon == 1.0);
    CHECK(k.L == 1.0);
    CHECK(k.constants.delta == doctest::Approx(std::numbers::pi / 4));
    CHECK(k.constants.C == doctest::Approx(8.0 / std::sqrt(std::numbers::pi)));
}

TEST_CASE("default atlases cover their manifolds") {
    for (Manifold m : {Manifold::annulus(), Manifold::sphere(), Manifold::plane()}) {
        auto k = atlas_constants(Atlas::default_for(m), m, make_grid(m, GridSpec::square(33)).points, 128, 65);
        CHECK(k.epsilon > 0);
        CHECK(k.L >= 1.0);
        CHECK(k.constants.C >= k.constants.C_proof);
    }
}

TEST_CASE("uncovered samples are rejected") {
    Manifold m = Manifold::annulus();
    Atlas a;
    a.manifold = m.kind;
    a.charts.push_back(DarbouxChart::annulus_strip(0.0, 0.15, 0.85, 0.05, 0.95));
    CHECK_THROWS_AS(atlas_constants(a, m, make_grid(m, GridSpec::square(16)).points), ConfigError);
}

TEST_CASE("distances") {
    CHECK(distance(Point::annulus(0.95, 0.5), Point::annulus(0.05, 0.5)) == doctest::Approx(0.1));
    CHECK(distance(Point::plane(0, 0), Point::plane(3, 4)) == doctest::Approx(5.0));
    CHECK(distance(Point::sphere({0, 0, 1}), Point::sphere({1, 0, 0})) == doctest::Approx(std::numbers::pi / 2));
    CHECK_THROWS(distance(Point::plane(0, 0), Point::annulus(0, 0)));
}

TEST_CASE("sphere frames are orthonormal and positively oriented") {
    for (double th : {0.01, 0.7, 1.5, 2.9, 3.13})
        for (double ph : {0.0, 1.0, 4.0}) {
            Point p = Point::sphere_polar(th, ph);
            auto f = sphere_frame(p.x);
            CHECK(dot(f[0], f[1]) == doctest::Approx(0.0).epsilon(1e-14));
            CHECK(norm(f[0]) == doctest::Approx(1.0));
            CHECK(dot(f[0], p.x) == doctest::Approx(0.0).epsilon(1e-14));
            CHECK(dot(cross(f[0], f[1]), p.x) == doctest::Approx(1.0));
        }
}

TEST_CASE("charts are Darboux and invertible") {
    for (Manifold m : {Manifold::annulus(), Manifold::sphere(), Manifold::plane()}) {
        for (const auto& ch : Atlas::default_for(m).charts) {
            for (const auto& u : ch.chart_samples_Kprime(9)) {
                CHECK(std::fabs(ch.area_defect(u)) < 1e-9);
                Point p = ch.from_chart(u);
                Vec2 v = ch.to_chart(p);
                CHECK(v[0] == doctest::Approx(u[0]).epsilon(1e-9));
                CHECK(v[1] == doctest::Approx(u[1]).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("grids nest across refinement levels") {
    for (Manifold m : {Manifold::annulus(), Manifold::sphere(), Manifold::plane()}) {
        SampleGrid g = make_grid(m, {{8, 8}, 2});
        CHECK(g.finest == 2);
        REQUIRE(g.mesh.size() == 3);
        CHECK(g.mesh[2] < g.mesh[1]);
        CHECK(g.mesh[1] < g.mesh[0]);
        std::size_t coarse = 0;
        for (int l : g.level) coarse += l == 0;
        CHECK(coarse == make_grid(m, {{8, 8}, 0}).points.size());
    }
}
