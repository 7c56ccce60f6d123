// One PASS/FAIL line per acceptance criterion. Exit 0 unless a criterion that
// is expected to be attainable fails.
#include "hofer/cli.hpp"
#include "hofer/continued_fraction.hpp"
#include "hofer/diophantine.hpp"
#include "hofer/map_expr.hpp"
#include "hofer/norms.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>

using namespace hofer;
namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

const std::string kConfigs = std::string(HOFERLAB_SOURCE_DIR) + "/configs/";

struct Run {
    std::string sub, config;
};

// every shipped config, in a fixed order
const std::vector<Run> kSuite = {
    {"constants", "constants_plane.json"},
    {"verify-inequality", "verify_inequality_annulus.json"},
    {"verify-inequality", "verify_inequality_plane.json"},
    {"rigidity", "rigidity_liouville.json"},
    {"rigidity", "rigidity_golden.json"},
    {"ak-build", "ak_build.json"},
    {"recurrence", "recurrence.json"},
    {"entropy", "entropy_cat.json"},
    {"entropy", "entropy_conjugated.json"},
    {"diophantine", "diophantine.json"},
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path dir_for(const fs::path& root, const Run& r) { return root / fs::path(r.config).stem(); }

std::string stem_of(const std::string& sub) { return sub; }

Json summary(const fs::path& root, const Run& r) {
    return Json::parse(slurp(dir_for(root, r) / (stem_of(r.sub) + "_summary.json")));
}

const Run& find(const std::string& config) {
    for (const auto& r : kSuite)
        if (r.config == config) return r;
    throw std::logic_error("no such config " + config);
}

struct Line {
    int id;
    bool pass;
    bool infeasible;  // fails for a documented reason, does not gate the exit code
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

}  // namespace

int main() {
    fs::path root = fs::temp_directory_path() / "hofer_acceptance";
    fs::remove_all(root);
    fs::path t1 = root / "threads1", t8 = root / "threads8";

    std::map<std::string, int> codes;
    std::map<std::string, double> seconds;
    for (const auto& [tag, dir] : {std::pair{"1", t1}, std::pair{"8", t8}}) {
        for (const auto& r : kSuite) {
            auto t0 = std::chrono::steady_clock::now();
            int rc = cli::run({r.sub, "--config", kConfigs + r.config, "--threads", tag, "--out", dir_for(dir, r).string()});
            double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            if (std::string(tag) == "1") {
                codes[r.config] = rc;
                seconds[r.config] = s;
            }
        }
    }

    std::vector<Line> lines;
    auto guard = [&](int id, const std::function<Line()>& f) {
        try {
            lines.push_back(f());
        } catch (const std::exception& e) {
            lines.push_back({id, false, false, std::string("exception: ") + e.what()});
        }
    };

    guard(1, [&] {
        const Run& r = find("verify_inequality_annulus.json");
        Json s = summary(t1, r);
        double secs = seconds[r.config];
        bool ok = codes[r.config] == 0 && s["count"] == 200 && s["violations"] == 0 &&
                  s["witnesses_found"] == s["sub_delta"] && secs <= 300;
        return Line{1, ok, false,
                    fmt("annulus 200 samples: violations=%g witnesses=%g/%g", s["violations"].get<double>(),
                        s["witnesses_found"].get<double>(), s["sub_delta"].get<double>()) +
                        fmt(", min slack %.3g, %.0f s", s["min_slack_ratio"].get<double>(), secs)};
    });

    guard(2, [&] {
        const Run& r = find("verify_inequality_plane.json");
        Json s = summary(t1, r);
        bool ok = codes[r.config] == 0 && s["count"] == 50 && s["violations"] == 0 &&
                  s["min_slack_ratio"].get<double>() >= 1.0;
        return Line{2, ok, false,
                    fmt("plane 50 samples: violations=%g, min slack ratio %.4g", s["violations"].get<double>(),
                        s["min_slack_ratio"].get<double>())};
    });

    guard(3, [&] {
        Manifold a = Manifold::annulus(), sp = Manifold::sphere();
        auto ea = c0_distance(MapExpr::rotation(a.kind, Rational(1, 4)), MapExpr::identity(a.kind), a, {{512, 512}, 0});
        auto es = c0_distance(MapExpr::rotation(sp.kind, Rational(1, 10)), MapExpr::identity(sp.kind), sp, {{512, 512}, 0});
        double target = 0.2 * std::numbers::pi;
        bool ok = std::fabs(ea.raw - 0.25) <= 1e-3 && std::fabs(es.raw - target) <= 1e-3;
        return Line{3, ok, false, fmt("annulus rotation 1/4: %.9f, sphere rotation 1/10: %.9f (want %.9f)", ea.raw, es.raw, target)};
    });

    guard(4, [&] {
        Manifold a = Manifold::annulus();
        auto e = derivative_norm(MapExpr::twist(a.kind, {0.0, 1.0}), a, {{32, 32}, 1});
        double phi = (1 + std::sqrt(5.0)) / 2;
        bool ok = std::fabs(e.lower - phi) <= 1e-6;
        return Line{4, ok, false, fmt("unit twist derivative norm %.12f, golden ratio %.12f", e.lower, phi)};
    });

    guard(5, [&] {
        auto cf = golden_mean();
        auto cs = cf.convergents(31);
        std::vector<BigInt> fib{0, 1};
        while (fib.size() < 33) fib.push_back(fib[fib.size() - 1] + fib[fib.size() - 2]);
        bool conv = true;
        for (std::size_t n = 0; n <= 30; ++n) conv = conv && cs[n].p == fib[n] && cs[n].q == fib[n + 1];
        auto iv = cf.bracket(256);
        bool bound = true;
        for (std::size_t n = 0; n + 1 < cs.size(); ++n) {
            Rational b(BigInt(1), cs[n + 1].q);
            Rational lo = cs[n].q * iv.lo - cs[n].p, hi = cs[n].q * iv.hi - cs[n].p;
            if (lo < 0) lo = -lo;
            if (hi < 0) hi = -hi;
            bound = bound && lo < b && hi < b;
        }
        auto cert = exp_liouville_witnesses(cf, Rational(1), BigInt(10000));
        bool ok = conv && bound && cert.witnesses.empty();
        return Line{5, ok, false,
                    std::string("Fibonacci convergents n<=30 ") + (conv ? "exact" : "WRONG") + ", best-approximation bound " +
                        (bound ? "holds" : "FAILS") + ", golden witnesses up to k=1e4: " + std::to_string(cert.witnesses.size())};
    });

    guard(6, [&] {
        const Run& r = find("rigidity_liouville.json");
        Json s = summary(t1, r);
        bool partial = codes[r.config] == 0 && s["pass"].get<bool>();
        std::size_t rows = s["rows"].get<std::size_t>();
        bool complete = rows >= 4 && !s.contains("construction_note");
        std::string note = s.value("construction_note", std::string());
        std::string d = "chain checked on " + std::to_string(rows) + " stages (" + (partial ? "all hold" : "FAILED") + ")";
        if (!complete) d += "; stage 4 not built: " + note;
        // the missing stage is a size limit, not a wrong answer
        return Line{6, complete && partial, partial && !complete, d};
    });

    guard(7, [&] {
        const Run& r = find("recurrence.json");
        Json s = summary(t1, r);
        double dens = s["checks"]["eps_density"]["density"].get<double>();
        bool ok = codes[r.config] == 0 && std::fabs(dens - 0.2) <= 0.01 && s["random_runs"] == 20 && s["random_failures"] == 0;
        return Line{7, ok, false,
                    fmt("golden eps=1/10 density %.6f, random quadratic pairs %g failed of %g", dens,
                        s["random_failures"].get<double>(), s["random_runs"].get<double>())};
    });

    guard(8, [&] {
        Json cat = summary(t1, find("entropy_cat.json")), conj = summary(t1, find("entropy_conjugated.json"));
        double want = std::log((3 + std::sqrt(5.0)) / 2);
        double a = cat["slope"].get<double>(), b = conj["slope"].get<double>();
        bool ok = std::fabs(a - want) <= 0.02 * want && cat["n_max"] == 40 && b <= 0.01 && conj["n_max"] == 64;
        return Line{8, ok, false, fmt("cat map slope %.6f (log lambda %.6f), conjugated rotation slope %.3g", a, want, b)};
    });

    guard(9, [&] {
        const PlateauProfile prof{{0.1, 0.3, 0.7, 0.9}};
        Manifold m = Manifold::annulus();
        auto h = HamiltonianSpec::autonomous(m.kind, {HamiltonianTerm::action(0.03), HamiltonianTerm::wave(0.06, 3, 0.2, prof)});
        double defect = symplecticity_defect(MapExpr::flow(h, 1.0, {1e-3, 1e-13, 80, FlowMethod::Midpoint}), m, {{16, 16}, 0});
        Point p = Point::annulus(0.3, 0.45);
        auto run = [&](double s) { return integrate_flow(h, 1.0, {s, 1e-14, 100, FlowMethod::Midpoint}, p, false).p; };
        Point ref = run(1e-4);
        double e1 = distance(run(0.04), ref), e2 = distance(run(0.02), ref), e3 = distance(run(0.01), ref);
        double r1 = e1 / e2, r2 = e2 / e3;
        bool ok = defect <= 1e-8 && std::fabs(r1 - 4) <= 0.6 && std::fabs(r2 - 4) <= 0.6;
        return Line{9, ok, false, fmt("area defect %.3g at step 1e-3, error ratios %.4f %.4f under halving", defect, r1, r2)};
    });

    guard(10, [&] {
        const Run& r = find("ak_build.json");
        Json s = summary(t1, r);
        std::string alphas;
        for (const auto& a : s["alphas"]) alphas += (alphas.empty() ? "" : " ") + a.get<std::string>();
        bool ok = codes[r.config] == 0 && s["stages_built"] == 4 && s["pass"].get<bool>();
        return Line{10, ok, false, "stages " + std::to_string(s["stages_built"].get<int>()) + ", alphas " + alphas};
    });

    guard(11, [&] {
        int same = 0, total = 0;
        std::string diff;
        for (const auto& r : kSuite) {
            for (const auto& e : fs::directory_iterator(dir_for(t1, r))) {
                if (e.path().extension() != ".csv") continue;
                ++total;
                fs::path other = dir_for(t8, r) / e.path().filename();
                if (fs::exists(other) && slurp(e.path()) == slurp(other))
                    ++same;
                else
                    diff += " " + r.config;
            }
        }
        bool ok = total == static_cast<int>(kSuite.size()) && same == total;
        return Line{11, ok, false,
                    std::to_string(same) + "/" + std::to_string(total) + " CSVs identical at 1 and 8 threads" + diff};
    });

    int hard = 0;
    for (const auto& l : lines) {
        std::printf("criterion %2d: %s  %s%s\n", l.id, l.pass ? "PASS" : "FAIL", l.detail.c_str(),
                    !l.pass && l.infeasible ? " [known infeasible, see analysis]" : "");
        hard += !l.pass && !l.infeasible;
    }
    std::fflush(stdout);
    return hard == 0 ? 0 : 1;
}
