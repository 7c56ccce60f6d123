#include "hofer/cli.hpp"

#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hofer;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("hofer_cli_test_" + name);
    fs::remove_all(p);
    return p;
}

fs::path write_config(const std::string& name, const std::string& body) {
    fs::path p = fs::temp_directory_path() / ("hofer_cli_cfg_" + name + ".json");
    std::ofstream(p) << body;
    return p;
}

const std::string kConfigs = std::string(HOFERLAB_SOURCE_DIR) + "/configs/";

}  // namespace

TEST_CASE("constants on the plane identity chart") {
    auto out = scratch("constants");
    CHECK(cli::run({"constants", "--config", kConfigs + "constants_plane.json", "--out", out.string()}) == 0);
    std::string csv = slurp(out / "constants.csv");
    CHECK(csv.find("# config_hash: ") != std::string::npos);
    CHECK(csv.find("# mesh: ") != std::string::npos);
    CHECK(csv.find("# tolerance_policy: ") != std::string::npos);
    auto j = nlohmann::json::parse(slurp(out / "constants_summary.json"));
    CHECK(j["epsilon"].get<double>() == 1.0);
    CHECK(j["L"].get<double>() == 1.0);
    CHECK(j["delta"].get<double>() == doctest::Approx(0.7853981633974483));
    CHECK(j["C"].get<double>() == doctest::Approx(4.51351666838205));
    CHECK(j["pass"].get<bool>());
}

TEST_CASE("diophantine construction with a certificate check") {
    auto out = scratch("dioph");
    CHECK(cli::run({"diophantine", "--construct", "c_n=n", "--stages", "4", "--check", "c=1", "--out", out.string()}) == 0);
    auto j = nlohmann::json::parse(slurp(out / "diophantine_summary.json"));
    REQUIRE(j["certificates"].size() == 1);
    CHECK(j["certificates"][0]["witnesses"].size() >= 1);
    CHECK(j["certificates"][0]["verified"].get<bool>());
}

TEST_CASE("small verify-inequality run passes") {
    auto out = scratch("verify");
    CHECK(cli::run({"verify-inequality", "--count", "5", "--seed", "7", "--grid", "12x12", "--out", out.string()}) == 0);
    auto j = nlohmann::json::parse(slurp(out / "verify-inequality_summary.json"));
    CHECK(j["violations"].get<int>() == 0);
    CHECK(j["count"].get<int>() == 5);
}

TEST_CASE("configuration errors exit with 1") {
    auto out = scratch("errors");
    CHECK(cli::run({"constants", "--config", "/nonexistent/config.json", "--out", out.string()}) == 1);
    auto bad_key = write_config("bad_key", R"({"grid": {"counts": [8, 8]}, "colour": "blue"})");
    CHECK(cli::run({"constants", "--config", bad_key.string(), "--out", out.string()}) == 1);
    auto nested = write_config("nested", R"({"entropy": {"n_max": 16, "slope": 1}})");
    CHECK(cli::run({"entropy", "--config", nested.string(), "--out", out.string()}) == 1);
    auto bad_json = write_config("bad_json", "{not json");
    CHECK(cli::run({"constants", "--config", bad_json.string(), "--out", out.string()}) == 1);
    CHECK(cli::run({"constants", "--tol", "1e-6", "--out", out.string()}) == 1);
    CHECK(cli::run({"frobnicate"}) == 1);
    CHECK(cli::run({"constants", "--threads", "0"}) == 1);
}

TEST_CASE("failed invariants exit with 2") {
    auto out = scratch("violation");
    auto cfg = write_config("violation", R"({"manifold": "plane", "grid": {"counts": [4, 4]},
        "entropy": {"map": {"op": "linear", "matrix": [[2, 1], [1, 1]]}, "n_max": 16, "max_slope": 0.01}})");
    CHECK(cli::run({"entropy", "--config", cfg.string(), "--out", out.string()}) == 2);
    auto j = nlohmann::json::parse(slurp(out / "entropy_summary.json"));
    CHECK_FALSE(j["pass"].get<bool>());
}

TEST_CASE("output directory falls back to the environment") {
    auto out = scratch("envdir");
    ::setenv("HOFERLAB_OUT", out.string().c_str(), 1);
    CHECK(cli::run({"constants"}) == 0);
    ::unsetenv("HOFERLAB_OUT");
    CHECK(fs::exists(out / "constants.csv"));
}

TEST_CASE("thread count does not change CSV bytes") {
    auto a = scratch("threads1"), b = scratch("threads4");
    auto cfg = kConfigs + "ak_build.json";
    CHECK(cli::run({"recurrence", "--config", kConfigs + "recurrence.json", "--threads", "1", "--out", a.string()}) == 0);
    CHECK(cli::run({"recurrence", "--config", kConfigs + "recurrence.json", "--threads", "4", "--out", b.string()}) == 0);
    CHECK(slurp(a / "recurrence.csv") == slurp(b / "recurrence.csv"));
    CHECK(cli::run({"rigidity", "--grid", "16x16", "--threads", "1", "--out", a.string()}) != 1);
    CHECK(cli::run({"rigidity", "--grid", "16x16", "--threads", "4", "--out", b.string()}) != 1);
    CHECK(slurp(a / "rigidity.csv") == slurp(b / "rigidity.csv"));
}
