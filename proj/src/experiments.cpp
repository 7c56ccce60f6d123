#include "hofer/experiments.hpp"

#include "hofer/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hofer {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// Enclosure of ||v|| from a bracket of the given width.
std::pair<Rational, Rational> norm_enclosure(const TorusComponent& v, unsigned bits) {
    RationalInterval b = v.bracket(bits);
    Rational lo = circle_norm(b.lo), hi = circle_norm(b.hi);
    if (lo > hi) std::swap(lo, hi);
    BigInt fl = floor_of(b.lo), fh = floor_of(b.hi);
    if (fl != fh) lo = 0;  // an integer lies inside
    Rational half_lo = Rational(fl) + Rational(1, 2);
    if (b.lo <= half_lo && half_lo <= b.hi) hi = Rational(1, 2);
    if (fl != fh && Rational(fh) + Rational(1, 2) <= b.hi) hi = Rational(1, 2);
    return {lo, hi};
}

struct AnnulusDraw {
    double c;
    int q;
    double wave_coef, wave_phase;
    bool conj;
    int cq;
    double conj_coef, conj_phase;
};

struct PlaneDraw {
    double peak, radius, cx, cy, wx, wy;
};

}  // namespace

HarnessReport inequality_harness(const HarnessConfig& cfg, const InequalityConstants& k, double L) {
    if (cfg.count < 0) throw ConfigError("sample count must be non-negative");
    HarnessReport rep;
    rep.config = cfg;
    rep.constants = k;
    rep.L = L;
    Rng rng(cfg.seed);
    const PlateauProfile prof{{0.1, 0.3, 0.7, 0.9}};

    for (int i = 0; i < cfg.count; ++i) {
        HarnessSample s;
        s.index = i;
        MapExpr f;
        Manifold m;
        Point centre;
        if (cfg.family == HarnessFamily::Annulus) {
            m = Manifold::annulus();
            AnnulusDraw d{};
            d.c = rng.log_uniform(cfg.c_min, cfg.c_max) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
            d.q = static_cast<int>(rng.integer(1, cfg.max_frequency));
            // wave osc = coef / (pi q) <= share |c|
            d.wave_coef = rng.uniform() * cfg.wave_share * std::fabs(d.c) * kPi * d.q;
            d.wave_phase = rng.uniform(0.0, 2.0 * kPi);
            d.conj = cfg.conjugate && rng.uniform() < 0.5;
            d.cq = static_cast<int>(rng.integer(1, cfg.max_frequency));
            d.conj_coef = rng.uniform() * cfg.conjugator_kappa / (2.0 * kPi * d.cq);
            d.conj_phase = rng.uniform(0.0, 2.0 * kPi);
            double ci = rng.uniform(), cth = rng.uniform();

            HamiltonianSpec H = HamiltonianSpec::autonomous(
                m.kind, {HamiltonianTerm::action(d.c), HamiltonianTerm::wave(d.wave_coef, d.q, d.wave_phase, prof)});
            f = MapExpr::flow(H, 1.0, cfg.integrator);
            std::ostringstream os;
            os << "flow(" << fmt(d.c) << "*I + wave(q=" << d.q << ", a=" << fmt(d.wave_coef) << "))";
            if (d.conj) {
                HamiltonianSpec G = HamiltonianSpec::autonomous(
                    m.kind, {HamiltonianTerm::wave(d.conj_coef, d.cq, d.conj_phase, prof)});
                f = MapExpr::conjugate(MapExpr::flow(G, 1.0, cfg.integrator), f);
                os << " conjugated by wave(q=" << d.cq << ", a=" << fmt(d.conj_coef) << ")";
            }
            s.description = os.str();
            // conjugation leaves the Hofer length unchanged
            s.gamma_ub = hofer_upper(H, m);
            s.witness_radius = 2.0 * L * std::sqrt(s.gamma_ub / kPi);
            double r = s.witness_radius;
            double I = r < 0.5 ? r + ci * (1.0 - 2.0 * r) : 0.5;
            centre = Point::annulus(cth, I);
        } else {
            PlaneDraw d{};
            d.peak = rng.log_uniform(cfg.osc_min, cfg.osc_max);
            d.radius = std::max(1.0, std::sqrt(8.0 * d.peak / cfg.hessian_target));
            d.cx = rng.uniform(-0.5, 0.5);
            d.cy = rng.uniform(-0.5, 0.5);
            d.wx = rng.uniform(-1.0, 1.0);
            d.wy = rng.uniform(-1.0, 1.0);
            m = Manifold::plane(0.0, 0.0, d.radius + 1.0);
            HamiltonianSpec H =
                HamiltonianSpec::autonomous(m.kind, {HamiltonianTerm::bump({d.cx, d.cy}, d.radius, d.peak)});
            f = MapExpr::flow(H, 1.0, cfg.integrator);
            std::ostringstream os;
            os << "flow(bump(peak=" << fmt(d.peak) << ", R=" << fmt(d.radius) << "))";
            s.description = os.str();
            GammaEstimate g = gamma_exact_small(H, m, cfg.grid, cfg.smallness_threshold);
            s.gamma_ub = g.value;
            s.gamma_exact = g.exact;
            s.witness_radius = 2.0 * L * std::sqrt(s.gamma_ub / kPi);
            centre = Point::plane(d.cx + d.wx * 0.5 * d.radius, d.cy + d.wy * 0.5 * d.radius);
        }

        HolderForm form = cfg.family == HarnessFamily::Plane ? HolderForm::RefinedPlane : HolderForm::Standard;
        double C = form == HolderForm::Standard ? k.C : 1.0;
        s.holder = check_holder_inequality(f, s.gamma_ub, C, m, cfg.grid, form);
        if (s.holder.violation) ++rep.violations;
        rep.min_slack = std::min(rep.min_slack, s.holder.slack_ratio);

        s.sub_delta = s.gamma_ub < k.delta;
        if (s.sub_delta) {
            ++rep.sub_delta;
            WitnessSearch w = nondisplacement_witness(f, centre, s.witness_radius, m, cfg.witness_budget);
            s.witness_found = w.witness.has_value();
            s.witness_tried = w.tried;
            if (s.witness_found) ++rep.witnesses_found;
        }
        rep.samples.push_back(std::move(s));
    }
    if (cfg.family == HarnessFamily::Plane) rep.note = "refined plane form sqrt(gamma) (1 + |Df|)";
    return rep;
}

bool exp_chain_holds(const TorusDistance& dist, double osc, double mu_sup, std::size_t k, const Rational& c,
                     const BigInt& n) {
    Rational x = c * Rational(n);
    if (dist.symbolic) {
        // 2^-K osc <= 2 k mu e^{-x}  <=  K >= ceil(x log2 e) + ceil(log2(osc / (2 k mu)))
        double ratio = std::ceil(std::log2(osc / (2.0 * static_cast<double>(k) * mu_sup)) + 1e-9);
        return static_cast<double>(dist.upper_neg_log2) >= static_cast<double>(ceil_log2_exp_upper(x)) + ratio;
    }
    if (dist.upper == 0) return true;
    Rational d = dist.upper * rational_from_double(osc) /
                 (Rational(2 * static_cast<long long>(k)) * rational_from_double(mu_sup));
    return compare_with_exp(d, -x) <= 0;
}

RigidityReport rigidity_scan(const RigidityConfig& cfg) {
    const Manifold& m = cfg.manifold;
    if (m.kind == ManifoldKind::Plane) throw ConfigError("rigidity scans need a circle action");
    auto action = cfg.action.empty() ? default_action(m) : cfg.action;
    if (action.size() != 1) throw ConfigError("rigidity scans use a single circle action");
    MapExpr h = cfg.h.valid() ? cfg.h : MapExpr::identity(m.kind);
    auto base = MapExpr::conjugate(h, MapExpr::rotation(m.kind, TorusVector{cfg.alpha}));
    RigidityReport rep;
    rep.deriv1 = derivative_norm(base, m, cfg.grid);
    const double log_d1 = std::log(rep.deriv1.upper);
    const double osc = hofer_upper(action[0], m);
    double mu = 0;
    for (const auto& t : action[0].segments.front().terms) mu += term_sup_norm(t, m);

    std::vector<BigInt> ns = cfg.iterates;
    std::vector<std::optional<Rational>> rates = cfg.rates;
    rates.resize(ns.size());
    std::vector<std::size_t> order(ns.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ns[a] < ns[b]; });

    for (std::size_t idx : order) {
        RigidityRow r;
        r.n = ns[idx];
        if (r.n < 1) throw ConfigError("iterates must be positive");
        r.c_n = rates[idx];
        TorusComponent na = cfg.alpha.scaled(r.n);
        r.torus_dist = torus_norm(na);
        HoferRotationBound hb = hofer_rotation_bound(TorusVector{na}, action, m);
        r.hofer_ub = hb.tight;
        r.hofer_ub_log2 = hb.tight_log2;
        MapExpr phin = MapExpr::conjugate(h, MapExpr::rotation(m.kind, TorusVector{na}));
        r.c0 = c0_distance(phin, MapExpr::identity(m.kind), m, cfg.grid);
        r.deriv = derivative_norm(phin, m, cfg.grid);
        r.holder_rhs_log2 = std::log2(cfg.C) + 0.5 * r.hofer_ub_log2 + std::log2(r.deriv.upper);
        r.holder_rhs = std::exp2(r.holder_rhs_log2);
        r.holder_ok = r.c0.lower == 0 || std::log2(r.c0.lower) <= r.holder_rhs_log2;
        double nd = to_double(r.n);
        r.premise = cfg.c > log_d1;
        r.envelope_log2 = std::log2(cfg.C) + nd * (log_d1 - cfg.c) / std::numbers::ln2;
        r.envelope_ok = !r.premise || r.c0.upper_log2 <= r.envelope_log2;
        if (r.c_n) r.chain_ok = exp_chain_holds(r.torus_dist, osc, mu, 1, *r.c_n, r.n);
        rep.rows.push_back(std::move(r));
    }
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
        if (!(rep.rows[i].c0.upper_log2 < rep.rows[i - 1].c0.upper_log2)) rep.c0_strictly_decreasing = false;
    return rep;
}

std::string RecurrenceSet::describe() const {
    std::ostringstream os;
    if (kind == Kind::Ball) os << "ball(r=" << radius << ")";
    else os << "circle(I=" << level << ")";
    return os.str();
}

RecurrenceReport recurrence_experiment(const TorusVector& alpha, const RecurrenceSet& A, std::uint64_t N,
                                       const std::vector<HamiltonianSpec>& action, const Manifold& m) {
    if (alpha.empty()) throw ConfigError("empty rotation vector");
    if (action.size() != alpha.size()) throw ConfigError("rotation vector and action differ in length");
    if (N < 1) throw ConfigError("N must be positive");
    RecurrenceReport rep;
    {
        std::ostringstream os;
        for (std::size_t i = 0; i < alpha.size(); ++i) os << (i ? "," : "") << alpha[i].describe();
        rep.alpha = os.str();
    }
    rep.set = A.describe();
    rep.N = N;
    const std::size_t k = alpha.size();
    double mu = 0;
    for (const auto& H : action)
        for (const auto& s : H.segments) {
            double v = 0;
            for (const auto& t : s.terms) v += term_sup_norm(t, m);
            mu = std::max(mu, v);
        }
    rep.C2 = 1.0 / (2.0 * static_cast<double>(k) * mu);
    rep.d = static_cast<int>(k);
    rep.C1 = std::pow(2.0, static_cast<double>(k));
    if (A.kind == RecurrenceSet::Kind::Ball) {
        if (!(A.radius > 0)) throw std::domain_error("displacement energy lower bound is zero");
        rep.e_lower = m.kind == ManifoldKind::Sphere ? 2.0 * kPi * (1.0 - std::cos(A.radius)) : kPi * A.radius * A.radius;
    } else {
        // an essential circle of the annulus cannot be displaced at all
        rep.e_lower = INFINITY;
    }
    rep.threshold = std::min(0.5, rep.C2 * rep.e_lower);
    Rational eps = rational_from_double(rep.threshold);
    if (rep.threshold >= 0.5) eps = Rational(1, 2) + Rational(1, 1 << 20);  // every iterate counts
    rep.counts = equidistribution_density(alpha, eps, N);
    rep.density = rep.counts.density();
    rep.bound = std::min(1.0, rep.C1 * std::pow(rep.threshold, rep.d));
    if (rep.threshold >= 0.5) rep.bound = 1.0;

    double disc = 0;
    for (const auto& a : alpha) {
        if (a.is_rational()) {
            double q = to_double(denominator(a.offset()));
            disc += 1.0 / q + q / static_cast<double>(N);
        } else {
            disc += ostrowski_discrepancy_bound(*a.cf(), N);
        }
    }
    rep.discrepancy = disc;
    rep.slack = 3.0 * disc;
    rep.passed = rep.density >= rep.bound - rep.slack;
    return rep;
}

TorusComponent random_quadratic(Rng& rng, std::int64_t d_max) {
    for (;;) {
        std::int64_t D = rng.integer(2, d_max);
        auto s = static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(D))));
        while (s * s > D) --s;
        while ((s + 1) * (s + 1) <= D) ++s;
        if (s * s == D) continue;
        auto cf = cf_expand(QuadraticIrrational{BigInt(-s), BigInt(D), BigInt(1)});
        return TorusComponent::irrational(std::make_shared<const ContinuedFraction>(std::move(cf)));
    }
}

EntropyResult entropy_slope(const MapExpr& f, const Manifold& m, std::int64_t n_max, const GridSpec& grid) {
    if (n_max < 8) throw ConfigError("entropy fits need n_max >= 8");
    EntropyResult r;
    for (std::int64_t n = n_max / 2; n <= n_max; ++n) {
        NormEstimate d = derivative_norm(MapExpr::iterate(f, n), m, grid);
        if (!std::isfinite(d.lower) || d.lower > 1e300) {
            r.stopped_early = true;
            break;
        }
        r.n.push_back(n);
        r.log_norm.push_back(std::log(d.lower));
    }
    const std::size_t k = r.n.size();
    if (k >= 2) {
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < k; ++i) {
            mx += static_cast<double>(r.n[i]);
            my += r.log_norm[i];
        }
        mx /= static_cast<double>(k);
        my /= static_cast<double>(k);
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < k; ++i) {
            double dx = static_cast<double>(r.n[i]) - mx;
            sxy += dx * (r.log_norm[i] - my);
            sxx += dx * dx;
        }
        r.slope = sxy / sxx;
    }
    r.bound = 2.0 * std::max(r.slope, 0.0);
    return r;
}

std::vector<ConvergenceRow> hofer_convergence_diagnostic(const std::vector<TorusVector>& seq,
                                                         const TorusVector& limit,
                                                         const std::vector<std::int64_t>& j_list,
                                                         const std::vector<HamiltonianSpec>& action,
                                                         const Manifold& m) {
    if (action.size() != limit.size()) throw ConfigError("rotation vector and action differ in length");
    std::vector<double> osc;
    double osc_sum = 0;
    for (const auto& H : action) {
        osc.push_back(hofer_upper(H, m));
        osc_sum += osc.back();
    }
    std::vector<ConvergenceRow> rows;
    for (std::size_t mi = 0; mi < seq.size(); ++mi) {
        const TorusVector& am = seq[mi];
        if (am.size() != limit.size()) throw ConfigError("sequence entries differ in length from the limit");
        TorusVector delta;
        for (std::size_t i = 0; i < am.size(); ++i) delta.push_back(am[i].plus(limit[i].negated()));
        Rational dist_hi(0);
        for (const auto& c : delta) dist_hi = std::max(dist_hi, norm_enclosure(c, 512).second);
        double dist = to_double(dist_hi);
        for (std::int64_t j : j_list) {
            ConvergenceRow r;
            r.m = mi;
            r.j = j;
            Rational diff_hi(0);
            for (std::size_t i = 0; i < am.size(); ++i) {
                if (delta[i].is_rational() && delta[i].offset() == 0) continue;  // identical coordinates
                auto a = norm_enclosure(am[i].scaled(BigInt(j)), 512);
                auto b = norm_enclosure(limit[i].scaled(BigInt(j)), 512);
                Rational w = std::max(a.second - b.first, b.second - a.first);
                if (w < 0) w = 0;
                diff_hi += w * rational_from_double(osc[i]);
            }
            r.diff = to_double(diff_hi);
            r.limit = static_cast<double>(std::llabs(j)) * dist * osc_sum;
            r.ok = r.diff <= r.limit * (1.0 + 1e-12) + 1e-300;
            rows.push_back(r);
        }
    }
    return rows;
}

}  // namespace hofer
