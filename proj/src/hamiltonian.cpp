#include "hofer/hamiltonian.hpp"

#include "hofer/errors.hpp"

#include <algorithm>
#include <numbers>

namespace hofer {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double S(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }
double S1(double t) { return 30.0 * t * t * (1.0 - t) * (1.0 - t); }
double S2(double t) { return 60.0 * t * (2.0 * t - 1.0) * (t - 1.0); }

}  // namespace

void PlateauProfile::validate() const {
    const auto& k = knots;
    if (!(k[0] < k[1] && k[1] <= k[2] && k[2] < k[3]))
        throw ConfigError("plateau knots must satisfy k0 < k1 <= k2 < k3");
}

double PlateauProfile::value(double u) const {
    const auto& k = knots;
    if (u <= k[0] || u >= k[3]) return 0.0;
    if (u < k[1]) return S((u - k[0]) / (k[1] - k[0]));
    if (u <= k[2]) return 1.0;
    return S((k[3] - u) / (k[3] - k[2]));
}

double PlateauProfile::d1(double u) const {
    const auto& k = knots;
    if (u <= k[0] || u >= k[3]) return 0.0;
    if (u < k[1]) return S1((u - k[0]) / (k[1] - k[0])) / (k[1] - k[0]);
    if (u <= k[2]) return 0.0;
    return -S1((k[3] - u) / (k[3] - k[2])) / (k[3] - k[2]);
}

double PlateauProfile::d2(double u) const {
    const auto& k = knots;
    if (u <= k[0] || u >= k[3]) return 0.0;
    if (u < k[1]) {
        double w = k[1] - k[0];
        return S2((u - k[0]) / w) / (w * w);
    }
    if (u <= k[2]) return 0.0;
    double w = k[3] - k[2];
    return S2((k[3] - u) / w) / (w * w);
}

double PlateauProfile::sup_d1() const {
    double w = std::min(knots[1] - knots[0], knots[3] - knots[2]);
    return (15.0 / 8.0) / w;
}

double PlateauProfile::sup_d2() const {
    double w = std::min(knots[1] - knots[0], knots[3] - knots[2]);
    return (10.0 * std::sqrt(3.0) / 3.0) / (w * w);
}

HamiltonianTerm HamiltonianTerm::action(double c) {
    HamiltonianTerm t;
    t.kind = TermKind::ActionLinear;
    t.coef = c;
    return t;
}

HamiltonianTerm HamiltonianTerm::sphere_height(double c) {
    HamiltonianTerm t;
    t.kind = TermKind::SphereHeight;
    t.coef = c;
    return t;
}

HamiltonianTerm HamiltonianTerm::wave(double amplitude, int q, double phase, PlateauProfile a) {
    if (q < 1) throw ConfigError("wave frequency must be >= 1");
    a.validate();
    HamiltonianTerm t;
    t.kind = TermKind::ConjugatorWave;
    t.coef = amplitude;
    t.frequency = q;
    t.phase = phase;
    t.profile = a;
    return t;
}

HamiltonianTerm HamiltonianTerm::bump(Vec2 center, double radius, double peak) {
    if (!(radius > 0)) throw ConfigError("bump radius must be positive");
    HamiltonianTerm t;
    t.kind = TermKind::PlaneBump;
    t.coef = peak;
    t.center = center;
    t.radius = radius;
    return t;
}

HamiltonianTerm HamiltonianTerm::quadratic(double c) {
    HamiltonianTerm t;
    t.kind = TermKind::PlaneQuadratic;
    t.coef = c;
    return t;
}

HamiltonianTerm HamiltonianTerm::cutoff_linear(double c, double u0, PlateauProfile a, std::optional<PlateauProfile> b) {
    a.validate();
    if (b) b->validate();
    HamiltonianTerm t;
    t.kind = TermKind::CutoffLinear;
    t.coef = c;
    t.u0 = u0;
    t.profile = a;
    t.cross = b;
    return t;
}

bool HamiltonianTerm::allowed_on(ManifoldKind m) const {
    switch (kind) {
        case TermKind::ActionLinear: return m != ManifoldKind::Sphere;
        case TermKind::SphereHeight: return m == ManifoldKind::Sphere;
        case TermKind::ConjugatorWave: return m == ManifoldKind::Annulus;
        case TermKind::PlaneBump:
        case TermKind::PlaneQuadratic: return m == ManifoldKind::Plane;
        case TermKind::CutoffLinear: return m != ManifoldKind::Annulus || !cross;
    }
    return false;
}

std::string HamiltonianTerm::name() const {
    switch (kind) {
        case TermKind::ActionLinear: return "action";
        case TermKind::SphereHeight: return "sphere_height";
        case TermKind::ConjugatorWave: return "wave";
        case TermKind::PlaneBump: return "bump";
        case TermKind::PlaneQuadratic: return "quadratic";
        case TermKind::CutoffLinear: return "cutoff_linear";
    }
    return "?";
}

FlatJet flat_jet(const HamiltonianTerm& t, double x1, double x2) {
    FlatJet j;
    switch (t.kind) {
        case TermKind::ActionLinear:
            j.h = t.coef * x2;
            j.h2 = t.coef;
            break;
        case TermKind::ConjugatorWave: {
            double q2 = kTwoPi * t.frequency;
            double arg = q2 * x1 + t.phase;
            double s = std::sin(arg), c = std::cos(arg);
            double A = t.coef * t.profile.value(x2);
            double A1 = t.coef * t.profile.d1(x2);
            double A2 = t.coef * t.profile.d2(x2);
            j.h = A * s / q2;
            j.h1 = A * c;
            j.h2 = A1 * s / q2;
            j.h11 = -A * s * q2;
            j.h12 = A1 * c;
            j.h22 = A2 * s / q2;
            break;
        }
        case TermKind::PlaneBump: {
            double dx = x1 - t.center[0], dy = x2 - t.center[1];
            double R2 = t.radius * t.radius;
            double w = 1.0 - (dx * dx + dy * dy) / R2;
            if (w <= 0) break;
            double w2 = w * w;
            j.h = t.coef * w2 * w2;
            // d/dx w^4 = 4 w^3 * (-2 dx / R^2)
            double g = -8.0 * t.coef * w2 * w / R2;
            j.h1 = g * dx;
            j.h2 = g * dy;
            double gg = 48.0 * t.coef * w2 / (R2 * R2);
            j.h11 = g + gg * dx * dx;
            j.h12 = gg * dx * dy;
            j.h22 = g + gg * dy * dy;
            break;
        }
        case TermKind::PlaneQuadratic:
            j.h = t.coef * x1 * x2;
            j.h1 = t.coef * x2;
            j.h2 = t.coef * x1;
            j.h12 = t.coef;
            break;
        case TermKind::CutoffLinear: {
            // u = x2, v = x1
            double du = x2 - t.u0;
            double a = t.profile.value(x2), a1 = t.profile.d1(x2), a2 = t.profile.d2(x2);
            double b = 1, b1 = 0, b2 = 0;
            if (t.cross) {
                b = t.cross->value(x1);
                b1 = t.cross->d1(x1);
                b2 = t.cross->d2(x1);
            }
            double f = du * a, f1 = a + du * a1, f2 = 2.0 * a1 + du * a2;
            j.h = t.coef * f * b;
            j.h2 = t.coef * f1 * b;
            j.h1 = t.coef * f * b1;
            j.h22 = t.coef * f2 * b;
            j.h12 = t.coef * f1 * b1;
            j.h11 = t.coef * f * b2;
            break;
        }
        case TermKind::SphereHeight: throw std::domain_error("sphere term evaluated on a flat manifold");
    }
    return j;
}

HeightJet height_jet(const HamiltonianTerm& t, double z) {
    HeightJet j;
    switch (t.kind) {
        case TermKind::SphereHeight:
            j.h = kTwoPi * t.coef * z;
            j.hz = kTwoPi * t.coef;
            break;
        case TermKind::CutoffLinear: {
            double du = z - t.u0;
            double a = t.profile.value(z), a1 = t.profile.d1(z), a2 = t.profile.d2(z);
            j.h = kTwoPi * t.coef * du * a;
            j.hz = kTwoPi * t.coef * (a + du * a1);
            j.hzz = kTwoPi * t.coef * (2.0 * a1 + du * a2);
            break;
        }
        default: throw std::domain_error("flat term evaluated on the sphere");
    }
    return j;
}

FlatJet flat_jet(const std::vector<HamiltonianTerm>& terms, double x1, double x2) {
    FlatJet s;
    for (const auto& t : terms) {
        FlatJet j = flat_jet(t, x1, x2);
        s.h += j.h;
        s.h1 += j.h1;
        s.h2 += j.h2;
        s.h11 += j.h11;
        s.h12 += j.h12;
        s.h22 += j.h22;
    }
    return s;
}

HeightJet height_jet(const std::vector<HamiltonianTerm>& terms, double z) {
    HeightJet s;
    for (const auto& t : terms) {
        HeightJet j = height_jet(t, z);
        s.h += j.h;
        s.hz += j.hz;
        s.hzz += j.hzz;
    }
    return s;
}

double hamiltonian_value(const std::vector<HamiltonianTerm>& terms, const Point& p) {
    if (p.manifold == ManifoldKind::Sphere) return height_jet(terms, p.x[2]).h;
    return flat_jet(terms, p.x[0], p.x[1]).h;
}

namespace {

// range of (u - u0) over [k0, k3] together with 0
std::pair<double, double> cutoff_range(const HamiltonianTerm& t) {
    double lo = std::min(0.0, t.profile.knots[0] - t.u0);
    double hi = std::max(0.0, t.profile.knots[3] - t.u0);
    return {lo, hi};
}

double momentum_scale(const Manifold& m) { return m.kind == ManifoldKind::Sphere ? kTwoPi : 1.0; }

}  // namespace

OscBounds term_oscillation(const HamiltonianTerm& t, const Manifold& m) {
    switch (t.kind) {
        case TermKind::ActionLinear: {
            double span = m.kind == ManifoldKind::Plane ? 2.0 * m.plane_half_width : 1.0;
            double v = std::fabs(t.coef) * span;
            return {v, v};
        }
        case TermKind::SphereHeight: {
            double v = 2.0 * kTwoPi * std::fabs(t.coef);
            return {v, v};
        }
        case TermKind::ConjugatorWave: {
            double v = std::fabs(t.coef) / (std::numbers::pi * t.frequency);
            bool plateau_inside = t.profile.knots[1] <= 1.0 && t.profile.knots[2] >= 0.0;
            return {plateau_inside ? v : 0.0, v};
        }
        case TermKind::PlaneBump: {
            double v = std::fabs(t.coef);
            return {v, v};
        }
        case TermKind::PlaneQuadratic: {
            double h = m.plane_half_width;
            double xs[2] = {m.plane_center[0] - h, m.plane_center[0] + h};
            double ys[2] = {m.plane_center[1] - h, m.plane_center[1] + h};
            double lo = INFINITY, hi = -INFINITY;
            for (double x : xs)
                for (double y : ys) {
                    lo = std::min(lo, x * y);
                    hi = std::max(hi, x * y);
                }
            double v = std::fabs(t.coef) * (hi - lo);
            return {v, v};
        }
        case TermKind::CutoffLinear: {
            auto [lo, hi] = cutoff_range(t);
            double s = std::fabs(t.coef) * momentum_scale(m);
            double upper = s * (hi - lo);
            double lower = s * std::max(0.0, t.profile.knots[2] - t.profile.knots[1]);
            return {std::min(lower, upper), upper};
        }
    }
    return {0, 0};
}

double term_sup_norm(const HamiltonianTerm& t, const Manifold& m) {
    switch (t.kind) {
        case TermKind::ActionLinear: {
            if (m.kind == ManifoldKind::Plane)
                return std::fabs(t.coef) * (std::fabs(m.plane_center[1]) + m.plane_half_width);
            return std::fabs(t.coef);
        }
        case TermKind::SphereHeight: return kTwoPi * std::fabs(t.coef);
        case TermKind::ConjugatorWave: return std::fabs(t.coef) / (kTwoPi * t.frequency);
        case TermKind::PlaneBump: return std::fabs(t.coef);
        case TermKind::PlaneQuadratic: {
            double ax = std::fabs(m.plane_center[0]) + m.plane_half_width;
            double ay = std::fabs(m.plane_center[1]) + m.plane_half_width;
            return std::fabs(t.coef) * ax * ay;
        }
        case TermKind::CutoffLinear: {
            auto [lo, hi] = cutoff_range(t);
            return std::fabs(t.coef) * momentum_scale(m) * std::max(-lo, hi);
        }
    }
    return 0;
}

double term_field_derivative_bound(const HamiltonianTerm& t, const Manifold& m) {
    switch (t.kind) {
        case TermKind::ActionLinear: return 0.0;
        case TermKind::SphereHeight: return kTwoPi * std::fabs(t.coef);
        case TermKind::ConjugatorWave: {
            double q2 = kTwoPi * t.frequency;
            double a = std::fabs(t.coef);
            double h11 = a * q2, h12 = a * t.profile.sup_d1(), h22 = a * t.profile.sup_d2() / q2;
            return std::sqrt(h11 * h11 + 2.0 * h12 * h12 + h22 * h22);
        }
        case TermKind::PlaneBump: return 8.0 * std::fabs(t.coef) / (t.radius * t.radius);
        case TermKind::PlaneQuadratic: return std::fabs(t.coef);
        case TermKind::CutoffLinear: {
            auto [lo, hi] = cutoff_range(t);
            double U = std::max(-lo, hi);
            double c = std::fabs(t.coef) * momentum_scale(m);
            double huu = c * (2.0 * t.profile.sup_d1() + U * t.profile.sup_d2());
            if (m.kind == ManifoldKind::Sphere) {
                double hz = c * (1.0 + U * t.profile.sup_d1());
                return huu + hz;
            }
            double huv = 0, hvv = 0;
            if (t.cross) {
                huv = c * (1.0 + U * t.profile.sup_d1()) * t.cross->sup_d1();
                hvv = c * U * t.cross->sup_d2();
            }
            return std::sqrt(huu * huu + 2.0 * huv * huv + hvv * hvv);
        }
    }
    return 0;
}

HamiltonianSpec HamiltonianSpec::autonomous(ManifoldKind m, std::vector<HamiltonianTerm> terms) {
    HamiltonianSpec h;
    h.manifold = m;
    h.segments.push_back({1.0, std::move(terms)});
    h.validate();
    return h;
}

void HamiltonianSpec::validate() const {
    if (segments.empty()) throw ConfigError("Hamiltonian has no time segments");
    double total = 0;
    for (const auto& s : segments) {
        if (!(s.duration > 0)) throw ConfigError("segment durations must be positive");
        total += s.duration;
        for (const auto& t : s.terms) {
            if (!t.allowed_on(manifold))
                throw ConfigError("term '" + t.name() + "' is not defined on the " + manifold_name(manifold));
            if (!std::isfinite(t.coef)) throw ConfigError("non-finite Hamiltonian coefficient");
        }
    }
    if (std::fabs(total - 1.0) > 1e-12) throw ConfigError("segment durations must sum to 1");
}

bool HamiltonianSpec::is_zero() const {
    for (const auto& s : segments)
        for (const auto& t : s.terms)
            if (t.coef != 0) return false;
    return true;
}

OscBounds segment_oscillation(const Segment& s, const Manifold& m) {
    std::vector<const HamiltonianTerm*> live;
    for (const auto& t : s.terms)
        if (t.coef != 0) live.push_back(&t);
    if (live.empty()) return {0, 0};
    if (live.size() == 1) return term_oscillation(*live[0], m);
    OscBounds b{0, 0};
    for (auto* t : live) b.upper += term_oscillation(*t, m).upper;
    for (auto* t : live) {
        double others = b.upper - term_oscillation(*t, m).upper;
        b.lower = std::max(b.lower, term_oscillation(*t, m).lower - others);
    }
    return b;
}

double hofer_upper(const HamiltonianSpec& h, const Manifold& m) {
    double total = 0;
    for (const auto& s : h.segments) total += s.duration * segment_oscillation(s, m).upper;
    return total;
}

double hessian_norm(const std::vector<HamiltonianTerm>& terms, const Point& p) {
    if (p.manifold == ManifoldKind::Sphere) {
        HeightJet j = height_jet(terms, p.x[2]);
        auto f = sphere_frame(p.x);
        // P Hess P - (grad . p) on the tangent plane, Hess = hzz e_z e_z^T, grad = hz e_z
        double gp = j.hz * p.x[2];
        double a = j.hzz * f[0][2] * f[0][2] - gp;
        double b = j.hzz * f[0][2] * f[1][2];
        double d = j.hzz * f[1][2] * f[1][2] - gp;
        double h = 0.5 * (a - d);
        double r = std::sqrt(h * h + b * b);
        double m = 0.5 * (a + d);
        return std::max(std::fabs(m + r), std::fabs(m - r));
    }
    FlatJet j = flat_jet(terms, p.x[0], p.x[1]);
    double h = 0.5 * (j.h11 - j.h22);
    double r = std::sqrt(h * h + j.h12 * j.h12);
    double m = 0.5 * (j.h11 + j.h22);
    return std::max(std::fabs(m + r), std::fabs(m - r));
}

}  // namespace hofer
