#include "hofer/errors.hpp"
#include "hofer/serialization.hpp"

#include <doctest.h>

using namespace hofer;
using namespace hofer::io;

TEST_CASE("unknown keys are rejected everywhere") {
    CHECK_THROWS_AS(grid_of(Json{{"counts", {8, 8}}, {"refinement", 1}}), ConfigError);
    CHECK_THROWS_AS(integrator_of(Json{{"steps", 0.01}}), ConfigError);
    CHECK_THROWS_AS(term_of(Json{{"kind", "action"}, {"coef", 1}, {"extra", 2}}), ConfigError);
    CHECK_THROWS_AS(map_of(Json{{"op", "shear"}, {"s", 1}, {"t", 1}}, ManifoldKind::Annulus, {}), ConfigError);
    CHECK_THROWS_AS(conjugator_of(Json{{"frequency", 2}, {"amp", 0.1}}), ConfigError);
    CHECK_THROWS_AS(alpha_of(Json{{"quadratic", {{"P", 0}, {"D", 5}, {"Q", 2}, {"R", 1}}}}), ConfigError);
}

TEST_CASE("rationals from JSON numbers use their decimal spelling") {
    CHECK(rational_of(Json(0.1), "x") == Rational(1, 10));
    CHECK(rational_of(Json("3/8"), "x") == Rational(3, 8));
    CHECK(rational_of(Json(5), "x") == Rational(5));
    CHECK_THROWS_AS(rational_of(Json(true), "x"), ConfigError);
}

TEST_CASE("grid flag") {
    GridSpec g = parse_grid_flag("48x32");
    CHECK(g.counts == std::vector<int>{48, 32});
    CHECK_THROWS_AS(parse_grid_flag("48"), ConfigError);
    CHECK_THROWS_AS(parse_grid_flag("ax3"), ConfigError);
}

TEST_CASE("alpha descriptors") {
    CHECK(alpha_of(Json("golden")).value.to_double() == doctest::Approx(0.6180339887498949));
    CHECK(alpha_of(Json("sqrt2")).value.to_double() == doctest::Approx(0.41421356237309503));
    CHECK(alpha_of(Json{{"rational", "5/4"}}).value.offset() == Rational(1, 4));
    CHECK(alpha_of(Json{{"quadratic", {{"P", -1}, {"D", 5}, {"Q", 2}}}}).value.to_double() ==
          doctest::Approx(0.6180339887498949));
    CHECK(alpha_of(Json{{"quotients", {0, 2, 3}}}).value.offset() == Rational(3, 7));
    CHECK(alpha_of(Json{{"periodic", {{"prefix", {0}}, {"period", {2}}}}}).value.to_double() ==
          doctest::Approx(0.41421356237309503));
    auto c = alpha_of(Json{{"construct", {{"schedule", "c_n=n"}, {"stages", 3}}}});
    REQUIRE(c.constructed.has_value());
    CHECK(c.constructed->stages.size() == 3);
}

TEST_CASE("map descriptions build the expected expressions") {
    IntegratorParams ip{1e-2, 1e-12, 60, FlowMethod::Auto};
    Json j = {{"op", "conjugate"},
              {"by", {{"op", "conjugator"}, {"frequency", 2}, {"kappa", 0.5}}},
              {"map", {{"op", "rotation"}, {"alpha", "golden"}}}};
    MapExpr f = map_of(j, ManifoldKind::Annulus, ip);
    CHECK(as_conjugated_rotation(f).has_value());
    MapExpr lin = map_of(Json{{"op", "linear"}, {"matrix", {{2, 1}, {1, 1}}}}, ManifoldKind::Plane, ip);
    CHECK(lin.kind() == MapExpr::Kind::Linear);
    CHECK_THROWS(map_of(Json{{"op", "linear"}, {"matrix", {{2, 1}, {1, 1}}}}, ManifoldKind::Annulus, ip));
    CHECK_THROWS(map_of(Json{{"op", "warp"}}, ManifoldKind::Annulus, ip));
}

TEST_CASE("maps survive a JSON round trip") {
    IntegratorParams ip{1e-2, 1e-12, 60, FlowMethod::Auto};
    Json j = {{"op", "compose"},
              {"maps",
               {{{"op", "flow"},
                 {"hamiltonian",
                  {{"terms", {{{"kind", "action"}, {"coef", 0.02}}, {{"kind", "wave"}, {"amplitude", 0.03}, {"frequency", 2}}}}}}},
                {{"op", "twist"}, {"coeffs", {0.0, 0.5, 0.25}}},
                {{"op", "iterate"}, {"map", {{"op", "shear"}, {"s", 0.1}}}, {"n", 3}},
                {{"op", "rotation"}, {"alpha", "1/5"}}}}};
    MapExpr f = map_of(j, ManifoldKind::Annulus, ip);
    MapExpr g = map_of(to_json(f), ManifoldKind::Annulus, ip);
    CHECK(f.canonical() == g.canonical());
}

TEST_CASE("schedules") {
    Json s = {{"stages", {{{"alpha", "1/2"}, {"conjugator", {{"frequency", 2}, {"kappa", 0.5}}}, {"tol", 0.5}},
                          {{"conjugator", {{"frequency", 0}, {"kappa", 0.5}}}, {"tol", 0.25}}}}};
    AKSchedule sch = schedule_of(s, {});
    CHECK(sch.stages.size() == 2);
    CHECK(sch.stages[0].alpha == Rational(1, 2));
    CHECK_FALSE(sch.stages[1].alpha.has_value());
    CHECK_THROWS(schedule_of(Json{{"stages", {{{"tol", 0.5}}}}}, {}));
}

TEST_CASE("config hash is stable and key-order independent") {
    Json a = Json::parse(R"({"seed": 7, "grid": {"counts": [8, 8]}})");
    Json b = Json::parse(R"({"grid": {"counts": [8, 8]}, "seed": 7})");
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a) != config_hash(Json::parse(R"({"seed": 8, "grid": {"counts": [8, 8]}})")));
    CHECK(hex64(0xabcULL) == "0000000000000abc");
    CHECK(hex64(config_hash(Json::object())).size() == 16);
}

TEST_CASE("number formatting round trips") {
    CHECK(num(0.1) == "0.10000000000000001");
    CHECK(std::stod(num(1.0 / 3)) == 1.0 / 3);
    CHECK(num(INFINITY) == "inf");
    CHECK(num(-INFINITY) == "-inf");
    CHECK(num(NAN) == "nan");
}

TEST_CASE("CSV metadata, quoting and row width") {
    CsvTable t;
    t.meta("config_hash", "00ff");
    t.header({"a", "b"});
    t.row({"1", "x,y"});
    t.row({"2", "say \"hi\""});
    CHECK(t.str() == "# config_hash: 00ff\na,b\n1,\"x,y\"\n2,\"say \"\"hi\"\"\"\n");
    CHECK_THROWS(t.row({"only one"}));
}
