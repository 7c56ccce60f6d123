#include "hofer/cli.hpp"

#include "hofer/errors.hpp"
#include "hofer/experiments.hpp"
#include "hofer/parallel.hpp"
#include "hofer/serialization.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace hofer::cli {

namespace {

using io::Json;
using io::num;

constexpr const char* kTopKeys[] = {"manifold",  "atlas",   "grid",       "integrator",        "seed",
                                    "tolerance", "output",  "constants",  "verify_inequality", "rigidity",
                                    "ak_build",  "recurrence", "entropy", "diophantine"};

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> grid;
    std::optional<std::string> out;
    std::optional<double> tol;
    std::optional<int> count;
    std::optional<std::string> construct;
    std::optional<std::int64_t> stages;
    std::vector<std::string> checks;
};

struct Env {
    std::string sub;
    Json cfg = Json::object();  // effective config (overrides applied, output removed)
    Manifold manifold = Manifold::annulus();
    GridSpec grid{{32, 32}, 1};
    IntegratorParams ip{1e-2, 1e-12, 60, FlowMethod::Auto};
    std::uint64_t seed = 7;
    std::string hash;
    Overrides ov;
};

struct Outcome {
    io::CsvTable csv;
    Json summary = Json::object();
    bool pass = true;
    std::vector<std::pair<std::string, io::CsvTable>> extra;  // additional CSVs by file stem
};

const Json& section(const Env& e, const char* key) {
    static const Json empty = Json::object();
    auto it = e.cfg.find(key);
    return it == e.cfg.end() ? empty : *it;
}

std::string bstr(bool b) { return b ? "1" : "0"; }

std::string big(const BigInt& n) { return n.str(); }

std::string mesh_text(const Manifold& m, const GridSpec& g) {
    SampleGrid sg = make_grid(m, g);
    std::ostringstream os;
    os << "counts=";
    for (std::size_t i = 0; i < g.counts.size(); ++i) os << (i ? "x" : "") << g.counts[i];
    os << " refinements=" << g.refinements << " finest_mesh=" << num(sg.finest_mesh());
    return os.str();
}

void stamp(io::CsvTable& t, const Env& e, const Manifold& m, const GridSpec& g) {
    t.meta("subcommand", e.sub);
    t.meta("config_hash", e.hash);
    t.meta("seed", std::to_string(e.seed));
    t.meta("manifold", manifold_name(m.kind));
    t.meta("mesh", mesh_text(m, g));
    t.meta("tolerance_policy", "integrator fixed-point tol=" + num(e.ip.tolerance) + " step=" + num(e.ip.step) +
                                   "; C0 lower=grid max-noise, upper=grid max+(Lip f+Lip g)*mesh+noise");
}

DarbouxChart chart_of(const Json& v) {
    std::string kind = v.value("kind", "");
    if (kind == "plane_box") {
        io::reject_unknown(v, {"kind", "center", "k_half", "kp_half"}, "atlas.plane_box");
        Vec2 c{0, 0};
        if (v.contains("center")) c = {v["center"].at(0).get<double>(), v["center"].at(1).get<double>()};
        return DarbouxChart::plane_box(c, v.at("k_half").get<double>(), v.at("kp_half").get<double>());
    }
    if (kind == "annulus_strip") {
        io::reject_unknown(v, {"kind", "window", "k_lo", "k_hi", "kp_lo", "kp_hi"}, "atlas.annulus_strip");
        return DarbouxChart::annulus_strip(v.at("window").get<double>(), v.at("k_lo").get<double>(),
                                           v.at("k_hi").get<double>(), v.at("kp_lo").get<double>(),
                                           v.at("kp_hi").get<double>());
    }
    if (kind == "sphere_cap") {
        io::reject_unknown(v, {"kind", "pole", "z_k", "z_kp"}, "atlas.sphere_cap");
        return DarbouxChart::sphere_cap(v.at("pole").get<int>(), v.at("z_k").get<double>(), v.at("z_kp").get<double>());
    }
    throw ConfigError("atlas: unknown chart kind '" + kind + "'");
}

Atlas atlas_for(const Env& e, const Manifold& m) {
    auto it = e.cfg.find("atlas");
    if (it == e.cfg.end() || (it->is_string() && it->get<std::string>() == "default")) return Atlas::default_for(m);
    if (!it->is_array()) throw ConfigError("atlas: expected \"default\" or a list of charts");
    Atlas a;
    a.manifold = m.kind;
    for (const auto& c : *it) a.charts.push_back(chart_of(c));
    return a;
}

AtlasConstants constants_for(const Env& e, const Manifold& m, const Json& sec) {
    GridSpec cover{{48, 48}, 0};
    if (sec.contains("cover_counts")) cover = io::grid_of(Json{{"counts", sec["cover_counts"]}});
    int bs = sec.value("boundary_samples", 256), cs = sec.value("chart_samples", 257);
    return atlas_constants(atlas_for(e, m), m, make_grid(m, cover).points, bs, cs);
}

std::vector<HamiltonianSpec> action_of(const Json& sec, const Manifold& m, std::size_t k) {
    if (!sec.contains("action")) {
        if (k != 1) throw ConfigError("an explicit action list is needed for k >= 2");
        return default_action(m);
    }
    const Json& a = sec["action"];
    std::vector<HamiltonianSpec> out;
    if (a.is_array())
        for (const auto& h : a) out.push_back(io::hamiltonian_of(h, m.kind));
    else
        out.push_back(io::hamiltonian_of(a, m.kind));
    return out;
}

// ---- subcommands ----

Outcome cmd_constants(const Env& e) {
    const Json& sec = section(e, "constants");
    io::reject_unknown(sec, {"cover_counts", "boundary_samples", "chart_samples"}, "constants");
    AtlasConstants k = constants_for(e, e.manifold, sec);
    Outcome o;
    stamp(o.csv, e, e.manifold, e.grid);
    o.csv.header({"manifold", "charts", "epsilon", "L", "epsilon_mesh", "L_mesh", "diameter", "delta", "C_proof", "C"});
    o.csv.row({manifold_name(e.manifold.kind), std::to_string(atlas_for(e, e.manifold).charts.size()), num(k.epsilon),
               num(k.L), num(k.epsilon_mesh), num(k.L_mesh), num(k.diameter), num(k.constants.delta),
               num(k.constants.C_proof), num(k.constants.C)});
    o.pass = k.epsilon > 0 && k.L >= 1 && k.constants.C >= k.constants.C_proof;
    o.summary = {{"epsilon", k.epsilon}, {"L", k.L},         {"delta", k.constants.delta},
                 {"C_proof", k.constants.C_proof}, {"C", k.constants.C}, {"diameter", k.diameter}};
    return o;
}

Outcome cmd_verify(const Env& e) {
    const Json& sec = section(e, "verify_inequality");
    io::reject_unknown(sec,
                       {"family", "count", "c_min", "c_max", "wave_share", "max_frequency", "conjugator_kappa",
                        "conjugate", "osc_min", "osc_max", "hessian_target", "smallness_threshold", "witness_budget"},
                       "verify_inequality");
    HarnessConfig hc;
    std::string fam = sec.value("family", e.manifold.kind == ManifoldKind::Plane ? "plane" : "annulus");
    if (fam == "plane") hc.family = HarnessFamily::Plane;
    else if (fam != "annulus") throw ConfigError("verify_inequality.family: expected annulus or plane");
    hc.count = sec.value("count", hc.count);
    hc.seed = e.seed;
    hc.c_min = sec.value("c_min", hc.c_min);
    hc.c_max = sec.value("c_max", hc.c_max);
    hc.wave_share = sec.value("wave_share", hc.wave_share);
    hc.max_frequency = sec.value("max_frequency", hc.max_frequency);
    hc.conjugator_kappa = sec.value("conjugator_kappa", hc.conjugator_kappa);
    hc.conjugate = sec.value("conjugate", hc.conjugate);
    hc.osc_min = sec.value("osc_min", hc.osc_min);
    hc.osc_max = sec.value("osc_max", hc.osc_max);
    hc.hessian_target = sec.value("hessian_target", hc.hessian_target);
    hc.smallness_threshold = sec.value("smallness_threshold", hc.smallness_threshold);
    if (sec.contains("witness_budget")) hc.witness_budget = io::grid_of(Json{{"counts", sec["witness_budget"]}});
    hc.integrator = e.ip;
    hc.grid = e.grid;
    if (!(hc.c_min > 0 && hc.c_min <= hc.c_max && hc.osc_min > 0 && hc.osc_min <= hc.osc_max && hc.max_frequency >= 1))
        throw ConfigError("verify_inequality: inconsistent ranges");

    Manifold m = hc.family == HarnessFamily::Plane ? Manifold::plane() : Manifold::annulus();
    AtlasConstants k = constants_for(e, m, Json::object());
    HarnessReport rep = inequality_harness(hc, k.constants, k.L);

    Outcome o;
    stamp(o.csv, e, m, hc.grid);
    o.csv.meta("constants", "delta=" + num(k.constants.delta) + " C=" + num(k.constants.C) + " L=" + num(k.L));
    o.csv.header({"index", "description", "gamma_ub", "gamma_exact", "c0_lower", "c0_upper", "deriv_lower",
                  "deriv_upper", "C", "rhs", "rhs_inflated", "slack_ratio", "violation", "sub_delta", "witness_radius",
                  "witness_found", "witness_tried"});
    for (const auto& s : rep.samples)
        o.csv.row({std::to_string(s.index), s.description, num(s.gamma_ub), bstr(s.gamma_exact), num(s.holder.c0.lower),
                   num(s.holder.c0.upper), num(s.holder.deriv.lower), num(s.holder.deriv.upper), num(s.holder.C),
                   num(s.holder.rhs), num(s.holder.rhs_inflated), num(s.holder.slack_ratio), bstr(s.holder.violation),
                   bstr(s.sub_delta), num(s.witness_radius), bstr(s.witness_found), std::to_string(s.witness_tried)});
    double rate = rep.sub_delta ? static_cast<double>(rep.witnesses_found) / rep.sub_delta : 1.0;
    o.pass = rep.violations == 0 && rep.witnesses_found == rep.sub_delta;
    o.summary = {{"family", fam},
                 {"count", hc.count},
                 {"violations", rep.violations},
                 {"sub_delta", rep.sub_delta},
                 {"witnesses_found", rep.witnesses_found},
                 {"witness_rate", rate},
                 {"min_slack_ratio", rep.min_slack},
                 {"delta", k.constants.delta},
                 {"C", k.constants.C},
                 {"L", k.L},
                 {"note", rep.note},
                 {"invariants", {{"no_violations", rep.violations == 0}, {"all_witnesses", rep.witnesses_found == rep.sub_delta}}}};
    return o;
}

Outcome cmd_rigidity(const Env& e) {
    const Json& sec = section(e, "rigidity");
    io::reject_unknown(sec, {"alpha", "conjugator", "iterates", "convergents_up_to", "c", "C", "action"}, "rigidity");
    if (e.manifold.kind == ManifoldKind::Plane) throw ConfigError("rigidity needs the annulus or the sphere");
    io::AlphaSpec a = io::alpha_of(sec.contains("alpha") ? sec["alpha"] : Json("golden"));
    RigidityConfig rc;
    rc.manifold = e.manifold;
    rc.alpha = a.value;
    rc.h = sec.contains("conjugator") ? io::map_of(sec["conjugator"], e.manifold.kind, e.ip)
                                      : MapExpr::identity(e.manifold.kind);
    rc.c = sec.value("c", 1.0);
    rc.C = sec.contains("C") ? sec["C"].get<double>() : constants_for(e, e.manifold, Json::object()).constants.C;
    rc.grid = e.grid;
    rc.action = action_of(sec, e.manifold, 1);
    if (sec.contains("iterates")) {
        for (const auto& n : sec["iterates"])
            rc.iterates.push_back(n.is_string() ? BigInt(n.get<std::string>()) : BigInt(n.get<std::int64_t>()));
    } else if (a.constructed && !sec.contains("convergents_up_to")) {
        for (const auto& st : a.constructed->stages) {
            rc.iterates.push_back(st.q);
            rc.rates.push_back(st.c);
        }
    } else {
        if (a.value.is_rational()) throw ConfigError("rigidity: convergent scans need an irrational alpha");
        BigInt qmax(sec.value("convergents_up_to", std::int64_t{10000}));
        BigInt last(0);
        for (const auto& cv : a.value.cf()->convergents_up_to(qmax))
            if (cv.q > last) rc.iterates.push_back(last = cv.q);
    }
    RigidityReport rep = rigidity_scan(rc);

    Outcome o;
    stamp(o.csv, e, e.manifold, e.grid);
    o.csv.meta("alpha", a.value.describe());
    o.csv.meta("envelope", "c=" + num(rc.c) + " C=" + num(rc.C) + " deriv1_upper=" + num(rep.deriv1.upper));
    o.csv.header({"n", "c_n", "dist_lower", "dist_upper", "dist_log2_upper", "hofer_ub", "hofer_ub_log2", "c0_lower",
                  "c0_upper", "c0_upper_log2", "deriv_lower", "deriv_upper", "holder_rhs_log2", "envelope_log2",
                  "premise", "holder_ok", "envelope_ok", "chain_ok"});
    int holder_fail = 0, env_fail = 0, chain_fail = 0, skipped = 0;
    for (const auto& r : rep.rows) {
        holder_fail += !r.holder_ok;
        env_fail += !r.envelope_ok;
        skipped += !r.premise;
        if (r.chain_ok && !*r.chain_ok) ++chain_fail;
        o.csv.row({big(r.n), r.c_n ? to_string(*r.c_n) : "", num(to_double(r.torus_dist.lower)),
                   r.torus_dist.symbolic ? "" : num(to_double(r.torus_dist.upper)), num(r.torus_dist.log2_upper()),
                   num(r.hofer_ub), num(r.hofer_ub_log2), num(r.c0.lower), num(r.c0.upper), num(r.c0.upper_log2),
                   num(r.deriv.lower), num(r.deriv.upper), num(r.holder_rhs_log2), num(r.envelope_log2),
                   bstr(r.premise), bstr(r.holder_ok), bstr(r.envelope_ok), r.chain_ok ? bstr(*r.chain_ok) : ""});
    }
    // The envelope and monotone decay are only claimed along exp-Liouville schedules.
    const bool liouville = !rc.rates.empty();
    o.pass = holder_fail == 0 && chain_fail == 0 && (!liouville || (env_fail == 0 && rep.c0_strictly_decreasing));
    o.summary = {{"alpha", a.value.describe()},
                 {"rows", rep.rows.size()},
                 {"deriv1", {{"lower", rep.deriv1.lower}, {"upper", rep.deriv1.upper}}},
                 {"premise_skipped_rows", skipped},
                 {"envelope_enforced", liouville},
                 {"invariants",
                  {{"holder", holder_fail == 0},
                   {"envelope", env_fail == 0},
                   {"exp_chain", chain_fail == 0},
                   {"c0_strictly_decreasing", rep.c0_strictly_decreasing}}}};
    if (a.constructed && a.constructed->infeasible) o.summary["construction_note"] = *a.constructed->infeasible;
    return o;
}

Json ak_default_schedule() {
    Json stages = Json::array();
    stages.push_back({{"alpha", "1/2"}, {"conjugator", {{"frequency", 2}, {"kappa", 0.5}}}, {"tol", 0.5}});
    for (int m = 2; m <= 4; ++m)
        stages.push_back({{"conjugator", {{"frequency", 0}, {"kappa", 0.5}}}, {"tol", std::ldexp(1.0, -m)}});
    return {{"stages", stages}, {"nested", true}};
}

Outcome cmd_ak(const Env& e) {
    const Json& sec = section(e, "ak_build");
    AKSchedule s = io::schedule_of(sec.contains("stages") ? sec : ak_default_schedule(), e.ip);
    auto stages = ak_build(s, e.grid);
    Outcome o;
    Manifold m = Manifold::annulus();
    stamp(o.csv, e, m, e.grid);
    o.csv.meta("closeness", "C0 and C1 gaps only; smooth convergence is not measured");
    o.csv.meta("schedule", std::string("nested=") + (s.nested ? "1" : "0") + " stages=" + std::to_string(s.stages.size()));
    o.csv.header({"stage", "alpha", "q", "frequency", "tol", "c0_gap_lower", "c0_gap_upper", "c0_gap_bound", "c1_gap",
                  "deriv_h_lower", "deriv_h_upper", "commutation_residual", "consistency", "accepted", "failure"});
    bool all = stages.size() == s.stages.size();
    double tol10 = 10.0 * s.integrator.tolerance;
    bool comm_ok = true, cons_ok = true;
    for (const auto& a : stages) {
        all = all && a.accepted;
        if (a.accepted) {
            comm_ok = comm_ok && a.commutation_residual <= 1e-9;
            cons_ok = cons_ok && a.consistency <= tol10;
        }
        o.csv.row({std::to_string(a.stage), to_string(a.alpha), big(a.q), std::to_string(a.frequency), num(a.tol),
                   num(a.c0_gap.lower), num(a.c0_gap.upper), num(a.c0_gap_bound), num(a.c1_gap), num(a.deriv_h.lower),
                   num(a.deriv_h.upper), num(a.commutation_residual), num(a.consistency), bstr(a.accepted), a.failure});
    }
    o.pass = all && comm_ok && cons_ok;
    Json alphas = Json::array();
    for (const auto& a : stages) alphas.push_back(to_string(a.alpha));
    o.summary = {{"stages_built", stages.size()},
                 {"alphas", alphas},
                 {"alpha_rule", s.nested ? "alpha_m = alpha_{m-1} + 1/(l q), smallest l keeping the denominator l q"
                                         : "alpha_m = alpha_{m-1} + 1/(l q), smallest admissible l"},
                 {"closeness", "C0 and C1 gaps only; smooth convergence is not measured"},
                 {"invariants", {{"all_stages_accepted", all}, {"commutation", comm_ok}, {"consistency", cons_ok}}}};
    return o;
}

Outcome cmd_recurrence(const Env& e) {
    const Json& sec = section(e, "recurrence");
    io::reject_unknown(sec, {"alpha", "set", "N", "action", "eps_check", "random"}, "recurrence");
    Manifold m = e.manifold;
    TorusVector alpha;
    const Json av = sec.contains("alpha") ? sec["alpha"] : Json("golden");
    if (av.is_array())
        for (const auto& x : av) alpha.push_back(io::alpha_of(x).value);
    else
        alpha.push_back(io::alpha_of(av).value);
    auto action = action_of(sec, m, alpha.size());
    RecurrenceSet A;
    if (sec.contains("set")) {
        const Json& s = sec["set"];
        io::reject_unknown(s, {"kind", "radius", "level"}, "recurrence.set");
        std::string k = s.value("kind", "ball");
        if (k == "circle") A.kind = RecurrenceSet::Kind::LagrangianCircle;
        else if (k != "ball") throw ConfigError("recurrence.set.kind: expected ball or circle");
        A.radius = s.value("radius", A.radius);
        A.level = s.value("level", A.level);
    }
    std::uint64_t N = sec.value("N", std::uint64_t{100000});

    Outcome o;
    stamp(o.csv, e, m, e.grid);
    o.csv.header({"label", "alpha", "set", "N", "e_lower", "C2", "C1", "d", "threshold", "density", "bound",
                  "discrepancy", "slack", "passed"});
    auto add = [&](const std::string& label, const RecurrenceReport& r) {
        o.csv.row({label, r.alpha, r.set, std::to_string(r.N), num(r.e_lower), num(r.C2), num(r.C1), std::to_string(r.d),
                   num(r.threshold), num(r.density), num(r.bound), num(r.discrepancy), num(r.slack), bstr(r.passed)});
    };
    int failures = 0;
    RecurrenceReport main = recurrence_experiment(alpha, A, N, action, m);
    add("main", main);
    failures += !main.passed;

    Json checks = Json::object();
    if (sec.contains("eps_check")) {
        const Json& c = sec["eps_check"];
        io::reject_unknown(c, {"eps", "expected", "tolerance"}, "recurrence.eps_check");
        Rational eps = io::rational_of(c.at("eps"), "recurrence.eps_check.eps");
        DensityResult d = equidistribution_density(alpha, eps, N);
        double expected = c.value("expected", 2.0 * to_double(eps));
        double tol = c.value("tolerance", 0.01);
        bool ok = std::fabs(d.density() - expected) <= tol;
        failures += !ok;
        o.csv.row({"eps_check", main.alpha, "eps=" + to_string(eps), std::to_string(N), "", "", "", "", to_string(eps),
                   num(d.density()), num(expected), num(tol), "", bstr(ok)});
        checks["eps_density"] = {{"density", d.density()}, {"expected", expected}, {"ok", ok}};
    }
    int random_failures = 0, random_count = 0;
    if (sec.contains("random")) {
        const Json& r = sec["random"];
        io::reject_unknown(r, {"count", "r_min", "r_max", "d_max"}, "recurrence.random");
        if (alpha.size() != 1) throw ConfigError("recurrence.random draws a single frequency");
        Rng rng(e.seed);
        random_count = r.value("count", 20);
        double r_min = r.value("r_min", 0.02), r_max = r.value("r_max", 0.2);
        std::int64_t d_max = r.value("d_max", std::int64_t{2000});
        for (int i = 0; i < random_count; ++i) {
            TorusComponent a = random_quadratic(rng, d_max);
            RecurrenceSet B;
            B.radius = rng.uniform(r_min, r_max);
            RecurrenceReport rr = recurrence_experiment(TorusVector{a}, B, N, action, m);
            random_failures += !rr.passed;
            add("random_" + std::to_string(i), rr);
        }
        failures += random_failures;
    }
    o.pass = failures == 0;
    o.summary = {{"density", main.density},
                 {"bound", main.bound},
                 {"threshold", main.threshold},
                 {"C2", main.C2},
                 {"C1", main.C1},
                 {"d", main.d},
                 {"checks", checks},
                 {"random_runs", random_count},
                 {"random_failures", random_failures},
                 {"invariants", {{"density_above_bound", failures == 0}}}};
    return o;
}

Outcome cmd_entropy(const Env& e) {
    const Json& sec = section(e, "entropy");
    io::reject_unknown(sec, {"map", "n_max", "max_slope", "expected"}, "entropy");
    Json mv = sec.contains("map") ? sec["map"]
                                  : Json{{"op", "conjugate"},
                                         {"by", {{"op", "twist"}, {"coeffs", {0.0, 1.0}}}},
                                         {"map", {{"op", "rotation"}, {"alpha", "golden"}}}};
    MapExpr f = io::map_of(mv, e.manifold.kind, e.ip);
    std::int64_t n_max = sec.value("n_max", std::int64_t{64});
    EntropyResult r = entropy_slope(f, e.manifold, n_max, e.grid);
    Outcome o;
    stamp(o.csv, e, e.manifold, e.grid);
    o.csv.header({"n", "log_norm"});
    for (std::size_t i = 0; i < r.n.size(); ++i) o.csv.row({std::to_string(r.n[i]), num(r.log_norm[i])});
    Json inv = Json::object();
    if (sec.contains("max_slope")) {
        bool ok = r.slope <= sec["max_slope"].get<double>();
        inv["slope_below_max"] = ok;
        o.pass = o.pass && ok;
    }
    if (sec.contains("expected")) {
        const Json& x = sec["expected"];
        io::reject_unknown(x, {"value", "rel_tol"}, "entropy.expected");
        double v = x.at("value").get<double>(), rt = x.value("rel_tol", 0.02);
        bool ok = std::fabs(r.slope - v) <= rt * std::fabs(v);
        inv["slope_matches_expected"] = ok;
        o.pass = o.pass && ok;
    }
    o.summary = {{"slope", r.slope}, {"bound", r.bound}, {"stopped_early", r.stopped_early}, {"n_max", n_max},
                 {"invariants", inv}};
    return o;
}

Rational parse_check(const std::string& s) {
    if (s.rfind("c=", 0) != 0) throw ConfigError("--check expects c=<rational>");
    return parse_rational(s.substr(2));
}

Outcome cmd_diophantine(const Env& e) {
    const Json& sec = section(e, "diophantine");
    io::reject_unknown(sec, {"alpha", "convergents", "checks", "k_max", "full_scan_limit"}, "diophantine");
    io::AlphaSpec a = io::alpha_of(sec.contains("alpha") ? sec["alpha"] : Json("golden"));
    std::vector<Rational> cs;
    if (sec.contains("checks"))
        for (const auto& c : sec["checks"]) cs.push_back(io::rational_of(c, "diophantine.checks"));
    BigInt k_max(sec.value("k_max", std::int64_t{10000}));
    BigInt full(sec.value("full_scan_limit", std::int64_t{1000}));
    std::size_t count = sec.value("convergents", std::size_t{30});

    ContinuedFraction cf = a.value.is_rational() ? cf_expand(a.value.offset()) : *a.value.cf();
    auto convs = cf.convergents(count);
    bool law = convergent_law_holds(convs);

    Outcome o;
    stamp(o.csv, e, e.manifold, e.grid);
    o.csv.meta("alpha", a.value.describe());
    o.csv.header({"kind", "index", "a", "p", "q", "c", "dist_lower", "dist_upper", "bound_exponent", "convergent"});
    for (std::size_t i = 0; i < convs.size(); ++i)
        o.csv.row({"convergent", std::to_string(i), big(cf.quotient(i)), big(convs[i].p), big(convs[i].q), "", "", "",
                   "", ""});

    Json certs = Json::array();
    bool verified = true;
    for (const auto& c : cs) {
        LiouvilleCertificate cert = exp_liouville_witnesses(cf, c, k_max, full);
        bool ok = verify_certificate(cert, a.value);
        verified = verified && ok;
        Json ws = Json::array();
        for (std::size_t i = 0; i < cert.witnesses.size(); ++i) {
            const auto& w = cert.witnesses[i];
            o.csv.row({"witness", std::to_string(i), "", "", big(w.k), to_string(c), num(to_double(w.dist.lower)),
                       w.dist.symbolic ? "" : num(to_double(w.dist.upper)), to_string(w.bound_exponent),
                       bstr(w.convergent)});
            ws.push_back({{"k", big(w.k)},
                          {"dist_log2_upper", w.dist.log2_upper()},
                          {"bound_exponent", to_string(w.bound_exponent)},
                          {"convergent", w.convergent}});
        }
        Json und = Json::array();
        for (const auto& u : cert.undecided) und.push_back(big(u));
        certs.push_back({{"c", to_string(c)},
                         {"k_max", big(cert.k_max)},
                         {"full_scan_limit", big(cert.full_scan_limit)},
                         {"scan_complete", cert.scan_complete},
                         {"witnesses", ws},
                         {"undecided", und},
                         {"verified", ok},
                         {"note", cert.note}});
    }
    o.pass = law && verified;
    o.summary = {{"alpha", a.value.describe()},
                 {"convergents", convs.size()},
                 {"certificates", certs},
                 {"invariants", {{"convergent_law", law}, {"certificates_verified", verified}}}};
    if (a.constructed) {
        Json st = Json::array();
        for (const auto& s : a.constructed->stages)
            st.push_back({{"n", s.n}, {"c", to_string(s.c)}, {"q", big(s.q)}, {"next_symbolic", s.next_symbolic}});
        o.summary["construction"] = {{"schedule", a.constructed->schedule.text},
                                     {"requested_stages", a.constructed->requested_stages},
                                     {"stages", st},
                                     {"infeasible", a.constructed->infeasible ? Json(*a.constructed->infeasible) : Json()}};
    }
    return o;
}

// ---- driver ----

Env make_env(const std::string& sub, const std::optional<std::string>& config, const Overrides& ov) {
    Env e;
    e.sub = sub;
    e.ov = ov;
    if (config) {
        std::ifstream f(*config);
        if (!f) throw ConfigError("cannot read config " + *config);
        try {
            e.cfg = Json::parse(f);
        } catch (const Json::parse_error& err) {
            throw ConfigError(std::string("config is not valid JSON: ") + err.what());
        }
        if (!e.cfg.is_object()) throw ConfigError("config must be a JSON object");
        for (auto it = e.cfg.begin(); it != e.cfg.end(); ++it) {
            bool ok = false;
            for (const char* k : kTopKeys) ok = ok || it.key() == k;
            if (!ok) throw ConfigError("config: unknown key '" + it.key() + "'");
        }
    }
    if (ov.seed) e.cfg["seed"] = *ov.seed;
    if (ov.tol) e.cfg["tolerance"] = *ov.tol;
    if (ov.grid) {
        GridSpec g = io::parse_grid_flag(*ov.grid);
        Json gj = e.cfg.contains("grid") ? e.cfg["grid"] : Json::object();
        gj["counts"] = g.counts;
        e.cfg["grid"] = gj;
    }
    if (ov.count) e.cfg["verify_inequality"]["count"] = *ov.count;
    if (ov.construct || ov.stages)
        e.cfg["diophantine"]["alpha"] = {
            {"construct", {{"schedule", ov.construct.value_or("c_n=n")}, {"stages", ov.stages.value_or(4)}}}};
    if (!ov.checks.empty()) {
        Json cs = Json::array();
        for (const auto& c : ov.checks) cs.push_back(to_string(parse_check(c)));
        e.cfg["diophantine"]["checks"] = cs;
    }
    if (e.cfg.contains("manifold")) e.manifold = io::manifold_of(e.cfg["manifold"]);
    if (e.cfg.contains("grid")) e.grid = io::grid_of(e.cfg["grid"]);
    if (e.cfg.contains("integrator")) e.ip = io::integrator_of(e.cfg["integrator"], e.ip);
    if (e.cfg.contains("tolerance")) {
        e.ip.tolerance = e.cfg["tolerance"].get<double>();
        e.ip.validate();
    }
    if (e.cfg.contains("seed")) e.seed = e.cfg["seed"].get<std::uint64_t>();
    if (e.cfg.contains("output")) io::reject_unknown(e.cfg["output"], {"dir"}, "output");
    Json hashed = e.cfg;
    hashed.erase("output");
    e.hash = io::hex64(io::config_hash(hashed));
    return e;
}

std::string out_dir(const Env& e, const Overrides& ov) {
    if (ov.out) return *ov.out;
    if (e.cfg.contains("output") && e.cfg["output"].contains("dir")) return e.cfg["output"]["dir"].get<std::string>();
    if (const char* env = std::getenv("HOFERLAB_OUT"); env && *env) return env;
    return "hoferlab_out";
}

void diagnostic(const std::string& kind, const std::string& message) {
    std::cerr << Json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Hofer-geometry experiment laboratory"};
    app.require_subcommand(1);
    std::optional<std::string> config;
    Overrides ov;
    unsigned threads = 1;
    app.add_option("--config", config, "JSON config file");
    app.add_option("--seed", ov.seed, "random seed");
    app.add_option("--grid", ov.grid, "coarsest grid, NxM");
    app.add_option("--out", ov.out, "output directory");
    app.add_option("--tol", ov.tol, "integrator fixed-point tolerance");
    app.add_option("--threads", threads, "worker threads (speed only)")->check(CLI::Range(1u, 1024u));

    struct Sub {
        const char* name;
        const char* help;
        Outcome (*fn)(const Env&);
    };
    const Sub subs[] = {{"constants", "atlas constants epsilon, L, delta, C", cmd_constants},
                        {"verify-inequality", "randomised Holder inequality harness", cmd_verify},
                        {"rigidity", "rigidity scan along iterates", cmd_rigidity},
                        {"ak-build", "approximation-by-conjugation stages", cmd_ak},
                        {"recurrence", "recurrence densities", cmd_recurrence},
                        {"entropy", "derivative growth slopes", cmd_entropy},
                        {"diophantine", "continued fractions and exp-Liouville certificates", cmd_diophantine}};
    std::vector<CLI::App*> handles;
    for (const auto& s : subs) {
        CLI::App* c = app.add_subcommand(s.name, s.help);
        c->fallthrough();
        handles.push_back(c);
    }
    handles[1]->add_option("--count", ov.count, "number of samples");
    handles[6]->add_option("--construct", ov.construct, "coefficient schedule, e.g. c_n=n");
    handles[6]->add_option("--stages", ov.stages, "construction stages");
    handles[6]->add_option("--check", ov.checks, "certificate rate, c=<rational> (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        diagnostic("usage", e.what());
        return RuntimeFailure;
    }

    std::size_t which = 0;
    for (std::size_t i = 0; i < handles.size(); ++i)
        if (handles[i]->parsed()) which = i;

    try {
        set_worker_count(threads);
        Env env = make_env(subs[which].name, config, ov);
        std::string dir = out_dir(env, ov);
        auto t0 = std::chrono::steady_clock::now();
        Outcome o = subs[which].fn(env);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        std::filesystem::create_directories(dir);
        std::string stem = subs[which].name;
        o.csv.write((std::filesystem::path(dir) / (stem + ".csv")).string());
        for (const auto& [name, t] : o.extra) t.write((std::filesystem::path(dir) / (name + ".csv")).string());
        o.summary["subcommand"] = stem;
        o.summary["config_hash"] = env.hash;
        o.summary["seed"] = env.seed;
        o.summary["pass"] = o.pass;
        o.summary["elapsed_seconds"] = secs;
        io::write_json((std::filesystem::path(dir) / (stem + "_summary.json")).string(), o.summary);
        std::cout << stem << ": " << (o.pass ? "pass" : "INVARIANT VIOLATION") << " (" << dir << ")\n";
        return o.pass ? Pass : Violation;
    } catch (const InvariantViolation& e) {
        diagnostic("invariant_violation", e.what());
        return Violation;
    } catch (const ConfigError& e) {
        diagnostic("config", e.what());
        return RuntimeFailure;
    } catch (const Json::exception& e) {
        diagnostic("config", e.what());
        return RuntimeFailure;
    } catch (const IntegrationError& e) {
        diagnostic("integration", e.what());
        return RuntimeFailure;
    } catch (const std::exception& e) {
        diagnostic("runtime", e.what());
        return RuntimeFailure;
    }
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"hofer_lab"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace hofer::cli
