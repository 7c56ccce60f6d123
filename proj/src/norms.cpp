#include "hofer/norms.hpp"

#include "hofer/errors.hpp"
#include "hofer/kernels.hpp"
#include "hofer/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace hofer {

namespace {

constexpr double kPi = std::numbers::pi;

struct Jets {
    std::vector<double> a, b, c, d;
    explicit Jets(std::size_t n) : a(n), b(n), c(n), d(n) {}
    void set(std::size_t i, const Mat2& m) {
        a[i] = m.a;
        b[i] = m.b;
        c[i] = m.c;
        d[i] = m.d;
    }
    kernels::Mat2Soa view(std::size_t n = SIZE_MAX) const {
        n = std::min(n, a.size());
        return {{a.data(), n}, {b.data(), n}, {c.data(), n}, {d.data(), n}};
    }
};

Jets jacobians(const MapExpr& f, const std::vector<Point>& pts) {
    Jets j(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) { j.set(i, jacobian(f, pts[i])); });
    return j;
}

double max_distance(const std::vector<Point>& a, const std::vector<Point>& b, ManifoldKind kind) {
    const std::size_t n = a.size();
    if (n == 0) return 0;
    if (kind == ManifoldKind::Sphere) {
        std::vector<double> d(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = distance(a[i], b[i]);
        return kernels::max_value(d);
    }
    std::vector<double> ax(n), ay(n), bx(n), by(n);
    for (std::size_t i = 0; i < n; ++i) {
        ax[i] = a[i].x[0];
        ay[i] = a[i].x[1];
        bx[i] = b[i].x[0];
        by[i] = b[i].x[1];
    }
    return kernels::max_flat_distance(ax, ay, bx, by, kind == ManifoldKind::Annulus);
}

std::vector<Point> images(const MapExpr& f, const std::vector<Point>& pts) {
    if (f.kind() == MapExpr::Kind::Identity) return pts;
    std::vector<Point> out(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) { out[i] = evaluate(f, pts[i]); });
    return out;
}

void check_manifold(const MapExpr& f, const Manifold& m) {
    if (f.manifold() != m.kind) throw ConfigError("map and manifold disagree");
}

}  // namespace

NormEstimate c0_distance(const MapExpr& f, const MapExpr& g, const Manifold& m, const GridSpec& grid) {
    check_manifold(f, m);
    check_manifold(g, m);
    grid.validate();
    SampleGrid sg = make_grid(m, grid);
    double raw = max_distance(images(f, sg.points), images(g, sg.points), m.kind);
    double noise = numerical_noise(f) + numerical_noise(g);
    NormEstimate e;
    e.mesh = sg.finest_mesh();
    double lf = lipschitz_bound(f, m), lg = lipschitz_bound(g, m);
    e.lipschitz = lf + lg;
    e.raw = raw;
    e.lower = std::max(0.0, raw - noise);
    e.upper = raw + e.lipschitz * e.mesh + noise;
    e.upper_log2 = std::log2(e.upper);
    e.method = "grid+lipschitz";

    // a conjugated rotation moves every point by at most Lip(h) ||beta|| speed
    const MapExpr* rot = nullptr;
    if (g.kind() == MapExpr::Kind::Identity) rot = &f;
    else if (f.kind() == MapExpr::Kind::Identity) rot = &g;
    if (rot) {
        if (auto cr = as_conjugated_rotation(*rot)) {
            double lh = cr->h ? lipschitz_bound(*cr->h, m) : 1.0;
            TorusDistance beta = torus_norm(cr->beta);
            double l2 = std::log2(lh) + beta.log2_upper() + std::log2(rotation_speed(m.kind));
            l2 += 1e-12 * (1.0 + std::fabs(l2));  // round the log-domain sum outward
            if (l2 < e.upper_log2) {
                e.upper_log2 = l2;
                e.upper = std::exp2(l2);
                e.method = cr->h ? "conjugated-rotation" : "rotation";
            }
        }
    }
    if (e.lower > e.upper) e.lower = e.upper;
    return e;
}

NormEstimate derivative_norm(const MapExpr& f, const Manifold& m, const GridSpec& grid) {
    check_manifold(f, m);
    grid.validate();
    SampleGrid sg = make_grid(m, grid);
    std::vector<std::size_t> order(sg.points.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sg.level[x] < sg.level[y]; });
    std::vector<Point> pts;
    pts.reserve(order.size());
    for (auto i : order) pts.push_back(sg.points[i]);
    Jets j = jacobians(f, pts);

    NormEstimate e;
    std::size_t prefix = 0;
    for (int lev = 0; lev <= sg.finest; ++lev) {
        while (prefix < order.size() && sg.level[order[prefix]] <= lev) ++prefix;
        e.levels.push_back(kernels::max_singular_value(j.view(prefix)));
    }
    e.lower = e.raw = e.levels.back();
    double margin = e.levels.size() > 1 ? 2.0 * std::fabs(e.levels.back() - e.levels[e.levels.size() - 2]) : 0.0;
    e.lipschitz = lipschitz_bound(f, m);
    e.upper = std::max(e.lower, std::min(e.lower + margin, e.lipschitz));
    e.upper_log2 = std::log2(e.upper);
    e.mesh = sg.finest_mesh();
    e.method = "grid-levels";
    if (e.lower < 1.0 - 1e-9)
        throw InvariantViolation("derivative norm below 1 for a symplectic map: " + std::to_string(e.lower));
    return e;
}

double symplecticity_defect(const MapExpr& f, const Manifold& m, const GridSpec& grid) {
    check_manifold(f, m);
    SampleGrid sg = make_grid(m, grid);
    Jets j = jacobians(f, sg.points);
    return kernels::max_det_defect(j.view());
}

double c1_gap(const MapExpr& f, const MapExpr& g, const Manifold& m, const GridSpec& grid) {
    check_manifold(f, m);
    check_manifold(g, m);
    SampleGrid sg = make_grid(m, grid);
    Jets a = jacobians(f, sg.points), b = jacobians(g, sg.points);
    return kernels::max_frobenius_distance(a.view(), b.view());
}

std::vector<HamiltonianSpec> default_action(const Manifold& m) {
    switch (m.kind) {
        case ManifoldKind::Annulus: return {HamiltonianSpec::autonomous(m.kind, {HamiltonianTerm::action(1.0)})};
        case ManifoldKind::Sphere: return {HamiltonianSpec::autonomous(m.kind, {HamiltonianTerm::sphere_height(1.0)})};
        case ManifoldKind::Plane: break;
    }
    throw std::domain_error("the plane carries no circle action");
}

HoferRotationBound hofer_rotation_bound(const TorusVector& alpha, const std::vector<HamiltonianSpec>& action,
                                        const Manifold& m) {
    if (action.empty()) throw std::domain_error("empty action list");
    if (action.size() != alpha.size()) throw std::domain_error("rotation vector and action differ in length");
    HoferRotationBound b;
    double worst = 0;
    double log2_terms = -INFINITY;
    bool finite_exact = true;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        TorusDistance d = torus_norm(alpha[i]);
        double osc = hofer_upper(action[i], m);
        double sup = 0;
        for (const auto& s : action[i].segments) {
            double v = 0;
            for (const auto& t : s.terms) v += term_sup_norm(t, m);
            sup = std::max(sup, v);
        }
        b.mu_sup = std::max(b.mu_sup, sup);
        b.osc_sum += osc;
        b.tight += d.approx() * osc;
        worst = std::max(worst, d.approx());
        if (d.symbolic) finite_exact = false;
        else b.tight_upper_exact += d.upper * rational_from_double(osc);
        double l = d.log2_upper() + std::log2(osc);
        // log2(2^x + 2^y)
        log2_terms = log2_terms == -INFINITY ? l
                     : l == -INFINITY        ? log2_terms
                                             : std::max(l, log2_terms) + std::log2(1.0 + std::exp2(-std::fabs(l - log2_terms)));
    }
    if (!finite_exact) b.tight_upper_exact = 0;
    b.tight_log2 = log2_terms;
    b.coarse = 2.0 * static_cast<double>(alpha.size()) * worst * b.mu_sup;
    return b;
}

GammaEstimate gamma_exact_small(const HamiltonianSpec& h, const Manifold& m, const GridSpec& grid, double threshold) {
    GammaEstimate g;
    g.threshold = threshold;
    if (!h.is_autonomous()) {
        g.value = hofer_upper(h, m);
        g.note = "time-dependent Hamiltonian: Hofer upper bound only";
        return g;
    }
    SampleGrid sg = make_grid(m, grid);
    std::vector<double> hs(sg.points.size());
    const auto& terms = h.segments.front().terms;
    parallel_for(sg.points.size(), [&](std::size_t i) { hs[i] = hessian_norm(terms, sg.points[i]); });
    g.hessian_sup = kernels::max_value(hs);
    OscBounds osc = segment_oscillation(h.segments.front(), m);
    if (g.hessian_sup > threshold) {
        g.value = osc.upper;
        g.note = "not C2-small at the chosen threshold: Hofer upper bound only";
    } else if (!osc.exact()) {
        g.value = osc.upper;
        g.note = "oscillation not known exactly: upper bound only";
    } else {
        g.value = osc.upper;
        g.exact = true;
        g.note = "C2-small autonomous: gamma equals the oscillation (threshold is a policy)";
    }
    return g;
}

DisplacementBounds displacement_energy_bounds(const Point& c, double r, const Manifold& m) {
    if (!(r > 0)) throw std::domain_error("ball radius must be positive");
    if (c.manifold != m.kind) throw std::domain_error("ball centre on the wrong manifold");
    Atlas atlas = Atlas::default_for(m);
    if (!atlas.chart_containing_ball(c, r)) throw std::domain_error("ball does not fit in any chart");
    DisplacementBounds out;
    const double pad = 0.5 * r, ramp = r;
    if (m.kind == ManifoldKind::Sphere) {
        out.lower = 2.0 * kPi * (1.0 - std::cos(r));
        double z = std::clamp(c.x[2], -1.0, 1.0);
        double phi = std::acos(z);
        double phim = std::min(phi, kPi - phi);
        if (phim <= r) throw std::domain_error("ball contains a pole; the rotation cannot displace it");
        double d = std::min(2.5 * r, r + phim);
        double s2 = std::sin(phi) * std::sin(phi);
        double cosb = std::clamp((std::cos(d) - z * z) / s2, -1.0, 1.0);
        double beta = std::acos(cosb) / (2.0 * kPi);
        double zlo = std::cos(std::min(kPi, phi + r)), zhi = std::cos(std::max(0.0, phi - r));
        PlateauProfile a{{zlo - pad - ramp, zlo - pad, zhi + pad, zhi + pad + ramp}};
        out.displacing = HamiltonianSpec::autonomous(m.kind, {HamiltonianTerm::cutoff_linear(beta, z, a)});
        out.shift = d;
    } else {
        out.lower = kPi * r * r;
        const double tau = 2.5 * r;
        double u = c.x[1];
        PlateauProfile a{{u - r - pad - ramp, u - r - pad, u + r + pad, u + r + pad + ramp}};
        std::optional<PlateauProfile> b;
        if (m.kind == ManifoldKind::Annulus) {
            if (4.5 * r >= 1.0) throw std::domain_error("ball too wide to be displaced around the annulus");
        } else {
            double x = c.x[0];
            b = PlateauProfile{{x - r - pad - ramp, x - r - pad, x + tau + r + pad, x + tau + r + pad + ramp}};
        }
        out.displacing = HamiltonianSpec::autonomous(m.kind, {HamiltonianTerm::cutoff_linear(tau, u, a, b)});
        out.shift = tau;
    }
    out.upper = hofer_upper(out.displacing, m);
    return out;
}

WitnessSearch nondisplacement_witness(const MapExpr& f, const Point& x, double r, const Manifold& m,
                                      const GridSpec& budget) {
    if (!(r > 0)) throw std::domain_error("ball radius must be positive");
    check_manifold(f, m);
    budget.validate();
    const int nr = budget.counts[0], na = budget.counts.size() > 1 ? budget.counts[1] : budget.counts[0];
    MapExpr finv = MapExpr::inverse(f);
    WitnessSearch out;
    out.mesh = std::max(r / nr, r * 2.0 * kPi / na);
    std::array<Vec3, 2> frame{};
    if (m.kind == ManifoldKind::Sphere) frame = sphere_frame(x.x);
    auto candidate = [&](double rho, double ang) -> std::optional<Point> {
        if (m.kind == ManifoldKind::Sphere) {
            double cr = std::cos(rho), sr = std::sin(rho), ca = std::cos(ang), sa = std::sin(ang);
            Vec3 y;
            for (std::size_t k = 0; k < 3; ++k) y[k] = cr * x.x[k] + sr * (ca * frame[0][k] + sa * frame[1][k]);
            return Point::sphere(y);
        }
        double px = x.x[0] + rho * std::cos(ang), py = x.x[1] + rho * std::sin(ang);
        if (m.kind == ManifoldKind::Annulus) {
            if (py < 0.0 || py > 1.0) return std::nullopt;
            return Point::annulus(px, py);
        }
        return Point::plane(px, py);
    };
    for (int i = 0; i <= nr; ++i) {
        double rho = r * i / nr;
        int count = i == 0 ? 1 : na;
        for (int k = 0; k < count; ++k) {
            auto y = candidate(rho, 2.0 * kPi * k / na);
            if (!y) continue;
            ++out.tried;
            if (distance(*y, x) > r) continue;
            Point back = evaluate(finv, *y);
            if (distance(back, x) <= r) {
                out.witness = *y;
                return out;
            }
        }
    }
    return out;
}

HolderReport check_holder_inequality(const MapExpr& f, double gamma_ub, double C, const Manifold& m,
                                     const GridSpec& grid, HolderForm form) {
    if (gamma_ub < 0) throw std::domain_error("gamma upper bound must be non-negative");
    HolderReport r;
    r.gamma_ub = gamma_ub;
    r.C = C;
    r.c0 = c0_distance(f, MapExpr::identity(m.kind), m, grid);
    r.deriv = derivative_norm(f, m, grid);
    r.noise = numerical_noise(f);
    double sg = std::sqrt(gamma_ub);
    if (form == HolderForm::Standard) {
        r.rhs = C * sg * r.deriv.lower;
        r.rhs_inflated = C * sg * r.deriv.upper;
    } else {
        r.rhs = sg * (1.0 + r.deriv.lower);
        r.rhs_inflated = sg * (1.0 + r.deriv.upper);
    }
    // c0.lower already has the evaluation noise removed
    r.violation = r.c0.lower > r.rhs_inflated;
    r.slack_ratio = r.c0.lower > 0 ? r.rhs / r.c0.lower : INFINITY;
    return r;
}

}  // namespace hofer
