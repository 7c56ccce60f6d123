#include "hofer/ak_forge.hpp"

#include "hofer/errors.hpp"

#include <cmath>
#include <numbers>
#include <limits>

namespace hofer {

void ConjugatorSpec::validate() const {
    if (frequency < 0) throw ConfigError("conjugator frequency must be positive");
    if (!std::isfinite(amplitude) || !std::isfinite(phase) || (kappa && !std::isfinite(*kappa))) throw ConfigError("conjugator parameters must be finite");
    profile.validate();
    if (profile.knots[0] <= 0.0 || profile.knots[3] >= 1.0)
        throw ConfigError("conjugator profile must vanish near I = 0 and I = 1");
}

HamiltonianSpec ConjugatorSpec::hamiltonian() const {
    if (frequency <= 0) throw ConfigError("conjugator frequency not resolved");
    double amp = kappa ? *kappa / (2.0 * std::numbers::pi * frequency) : amplitude;
    return HamiltonianSpec::autonomous(ManifoldKind::Annulus, {HamiltonianTerm::wave(amp, frequency, phase, profile)});
}

MapExpr ConjugatorSpec::map(const IntegratorParams& ip) const {
    if (kappa ? *kappa == 0 : amplitude == 0) return MapExpr::identity(ManifoldKind::Annulus);
    return MapExpr::flow(hamiltonian(), 1.0, ip);
}

void AKSchedule::validate() const {
    if (stages.empty()) throw ConfigError("AK schedule has no stages");
    if (!stages.front().alpha) throw ConfigError("the first AK stage needs an explicit alpha");
    if (stages.front().conjugator.frequency <= 0) throw ConfigError("the first AK stage needs a conjugator frequency");
    for (const auto& s : stages) {
        if (!(s.tol > 0)) throw ConfigError("AK stage tolerances must be positive");
        s.conjugator.validate();
    }
    integrator.validate();
}

double commutation_check(const MapExpr& g, const Rational& alpha, const GridSpec& grid) {
    ManifoldKind mk = g.manifold();
    Manifold m = mk == ManifoldKind::Sphere ? Manifold::sphere() : Manifold::annulus();
    MapExpr r = MapExpr::rotation(mk, alpha);
    return c0_distance(MapExpr::compose({g, r}), MapExpr::compose({r, g}), m, grid).raw;
}

Rational ak_next_alpha(const Rational& alpha, std::int64_t q_next, double lip_bound, double tol, bool nested,
                       ManifoldKind m) {
    if (q_next < 1) throw ConfigError("next frequency must be positive");
    if (!(lip_bound >= 1)) throw ConfigError("Lipschitz bound must be at least 1");
    if (!(tol > 0)) throw ConfigError("tolerance must be positive");
    const BigInt& den = denominator(alpha);
    if (BigInt(q_next) % den != 0) throw ConfigError("next frequency must be a multiple of the current denominator");
    double need = lip_bound * rotation_speed(m) / (tol * static_cast<double>(q_next));
    double lmin = std::isfinite(need) ? std::max(1.0, std::ceil(need)) : 1.0;
    if (lmin > 1e15) throw ConfigError("no integer step reaches the tolerance");
    auto l = static_cast<std::int64_t>(lmin);
    // the bound is checked exactly once l is fixed; ceil may land one short in floating point
    while (static_cast<double>(l) * static_cast<double>(q_next) * tol < lip_bound * rotation_speed(m)) ++l;
    for (;; ++l) {
        BigInt step = BigInt(l) * q_next;
        Rational next = alpha + Rational(BigInt(1), step);
        if (!nested) return next;
        if (denominator(next) == step && step > den) return next;
        if (l > (std::int64_t(1) << 40)) throw ConfigError("could not find a nested denominator");
    }
}

std::vector<AKApproximant> ak_build(const AKSchedule& schedule, const GridSpec& grid) {
    schedule.validate();
    const Manifold m = Manifold::annulus();
    const MapExpr id = MapExpr::identity(ManifoldKind::Annulus);
    std::vector<AKApproximant> out;
    MapExpr h = id, phi = id;
    Rational alpha(0);
    for (std::size_t i = 0; i < schedule.stages.size(); ++i) {
        const AKStage& st = schedule.stages[i];
        AKApproximant a;
        a.stage = static_cast<int>(i) + 1;
        a.tol = st.tol;
        ConjugatorSpec cs = st.conjugator;
        cs.stage = a.stage;
        const BigInt& prev_den = denominator(alpha);
        if (cs.frequency == 0) cs.frequency = static_cast<int>(prev_den);
        if (BigInt(cs.frequency) % prev_den != 0) {
            a.accepted = false;
            a.failure = "conjugator frequency is not a multiple of the previous denominator";
            out.push_back(std::move(a));
            break;
        }
        a.frequency = cs.frequency;
        MapExpr g = cs.map(schedule.integrator);
        MapExpr hn = MapExpr::compose({g, h});
        double lip = lipschitz_bound(hn, m);
        Rational an;
        if (st.alpha) {
            an = *st.alpha;
        } else {
            try {
                an = ak_next_alpha(alpha, cs.frequency, lip, st.tol, schedule.nested);
            } catch (const ConfigError& e) {
                a.accepted = false;
                a.failure = e.what();
                out.push_back(std::move(a));
                break;
            }
        }
        an = an - Rational(floor_of(an));
        a.alpha = an;
        a.q = denominator(an);
        a.h = hn;
        a.phi = MapExpr::conjugate(hn, MapExpr::rotation(ManifoldKind::Annulus, an));
        a.c0_gap = c0_distance(a.phi, phi, m, grid);
        a.c1_gap = c1_gap(a.phi, phi, m, grid);
        a.deriv_h = derivative_norm(hn, m, grid);
        a.commutation_residual =
            commutation_check(g, Rational(BigInt(1), BigInt(cs.frequency)), grid);
        if (i > 0) {
            a.c0_gap_bound = lip * to_double(circle_norm(an - alpha)) * rotation_speed(m.kind);
            MapExpr back = MapExpr::conjugate(hn, MapExpr::rotation(ManifoldKind::Annulus, alpha));
            a.consistency = c0_distance(back, phi, m, grid).raw;
        }
        a.slack = 1e-9;
        if (a.c0_gap.lower > a.tol + a.slack) {
            a.accepted = false;
            a.failure = "C0 gap exceeds the stage tolerance";
        }
        if (i > 0 && a.q <= denominator(alpha)) {
            a.accepted = false;
            a.failure = "denominators must increase";
        }
        bool ok = a.accepted;
        out.push_back(a);
        if (!ok) break;
        h = hn;
        phi = a.phi;
        alpha = an;
    }
    return out;
}

}  // namespace hofer
