#include "hofer/map_expr.hpp"

#include "hofer/errors.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace hofer {

namespace {

constexpr std::int64_t kMaxIterate = 10'000'000;

using Node = MapExpr::Node;
using Kind = MapExpr::Kind;

std::string hex(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

std::string profile_text(const PlateauProfile& p) {
    return hex(p.knots[0]) + "," + hex(p.knots[1]) + "," + hex(p.knots[2]) + "," + hex(p.knots[3]);
}

std::string hamiltonian_text(const HamiltonianSpec& h) {
    std::ostringstream os;
    os << manifold_name(h.manifold) << "[";
    for (const auto& s : h.segments) {
        os << "seg(" << hex(s.duration);
        for (const auto& t : s.terms) {
            os << ";" << t.name() << ":" << hex(t.coef) << ":" << t.frequency << ":" << hex(t.phase) << ":"
               << profile_text(t.profile) << ":" << (t.cross ? profile_text(*t.cross) : "-") << ":"
               << hex(t.center[0]) << "," << hex(t.center[1]) << ":" << hex(t.radius) << ":" << hex(t.u0);
        }
        os << ")";
    }
    os << "]";
    return os.str();
}

std::string component_text(const TorusComponent& c) {
    std::ostringstream os;
    os << c.describe();
    if (!c.is_rational()) os << "@" << static_cast<const void*>(c.cf().get());
    return os.str();
}

double poly(const std::vector<double>& c, double u) {
    double v = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * u + *it;
    return v;
}

double poly_d1(const std::vector<double>& c, double u) {
    double v = 0;
    for (std::size_t k = c.size(); k-- > 1;) v = v * u + static_cast<double>(k) * c[k];
    return v;
}

MapExpr::Node base(Kind k, ManifoldKind m) {
    Node n;
    n.kind = k;
    n.manifold = m;
    return n;
}

void need_same(ManifoldKind a, ManifoldKind b) {
    if (a != b) throw ConfigError("cannot combine maps on " + manifold_name(a) + " and " + manifold_name(b));
}

double shear_norm(double s) {
    Mat2 m{1, s, 0, 1};
    return m.max_singular();
}

}  // namespace

MapExpr MapExpr::identity(ManifoldKind m) { return MapExpr(std::make_shared<const Node>(base(Kind::Identity, m))); }

MapExpr MapExpr::rotation(ManifoldKind m, TorusVector alpha) {
    if (m == ManifoldKind::Plane) throw ConfigError("rotations are defined on the annulus and the sphere only");
    if (alpha.size() != 1) throw ConfigError("a rotation of a surface takes one angle");
    Node n = base(Kind::Rotation, m);
    n.alpha_value = alpha[0].to_double();
    n.alpha = std::move(alpha);
    return MapExpr(std::make_shared<const Node>(std::move(n)));
}

MapExpr MapExpr::rotation(ManifoldKind m, const Rational& alpha) {
    return rotation(m, TorusVector{TorusComponent::rational(alpha)});
}

MapExpr MapExpr::flow(HamiltonianSpec h, double t, IntegratorParams ip) {
    h.validate();
    ip.validate();
    if (!std::isfinite(t)) throw ConfigError("flow time must be finite");
    Node n = base(Kind::Flow, h.manifold);
    n.hamiltonian = std::move(h);
    n.time = t;
    n.integrator = ip;
    return MapExpr(std::make_shared<const Node>(std::move(n)));
}

MapExpr MapExpr::twist(ManifoldKind m, std::vector<double> coeffs) {
    if (m == ManifoldKind::Sphere) throw ConfigError("twists are defined on the annulus and the plane only");
    for (double c : coeffs)
        if (!std::isfinite(c)) throw ConfigError("twist coefficients must be finite");
    Node n = base(Kind::Twist, m);
    n.coeffs = std::move(coeffs);
    return MapExpr(std::make_shared<const Node>(std::move(n)));
}

MapExpr MapExpr::linear(Mat2 m) {
    if (std::fabs(m.det() - 1.0) > 1e-12) throw ConfigError("linear maps must have determinant 1");
    Node n = base(Kind::Linear, ManifoldKind::Plane);
    n.matrix = m;
    return MapExpr(std::make_shared<const Node>(std::move(n)));
}

MapExpr MapExpr::compose(std::vector<MapExpr> maps) {
    if (maps.empty()) throw ConfigError("compose needs at least one map");
    ManifoldKind m = maps.front().manifold();
    std::vector<MapExpr> kept;
    for (auto& f : maps) {
        if (!f.valid()) throw ConfigError("compose received an empty map");
        need_same(m, f.manifold());
        if (f.kind() != Kind::Identity) kept.push_back(std::move(f));
    }
    if (kept.empty()) return identity(m);
    if (kept.size() == 1) return kept.front();
    Node n = base(Kind::Compose, m);
    n.children = std::move(kept);
    return MapExpr(std::make_shared<const Node>(std::move(n)));
}

MapExpr MapExpr::inverse(MapExpr f) {
    switch (f.kind()) {
        case Kind::Identity: return f;
        case Kind::Rotation: {
            TorusVector a;
            for (const auto& c : f.node().alpha) a.push_back(c.negated());
            return rotation(f.manifold(), std::move(a));
        }
        case Kind::Inverse: return f.node().children.front();
        default: break;
    }
    if (auto cr = as_conjugated_rotation(f); cr && cr->h)
        return conjugate(*cr->h, rotation(f.manifold(), TorusVector{cr->beta.negated()}));
    Node n = base(Kind::Inverse, f.manifold());
    n.children = {std::move(f)};
    return MapExpr(std::make_shared<const Node>(std::move(n)));
}

MapExpr MapExpr::iterate(MapExpr f, std::int64_t count) {
    if (count == 0 || f.kind() == Kind::Identity) return identity(f.manifold());
    if (count == 1) return f;
    if (count < 0) return iterate(inverse(std::move(f)), -count);
    if (f.kind() == Kind::Rotation) {
        TorusVector a;
        for (const auto& c : f.node().alpha) a.push_back(c.scaled(BigInt(count)));
        return rotation(f.manifold(), std::move(a));
    }
    if (auto cr = as_conjugated_rotation(f); cr && cr->h)
        return conjugate(*cr->h, rotation(f.manifold(), TorusVector{cr->beta.scaled(BigInt(count))}));
    if (f.kind() == Kind::Iterate) {
        std::int64_t inner = f.node().count;
        if (count > kMaxIterate / inner) throw ConfigError("iterate count too large");
        return iterate(f.node().children.front(), inner * count);
    }
    if (count > kMaxIterate) throw ConfigError("iterate count too large (limit 10^7)");
    Node n = base(Kind::Iterate, f.manifold());
    n.count = count;
    n.children = {std::move(f)};
    return MapExpr(std::make_shared<const Node>(std::move(n)));
}

std::string MapExpr::canonical() const {
    const Node& n = *node_;
    std::ostringstream os;
    switch (n.kind) {
        case Kind::Identity: os << "id(" << manifold_name(n.manifold) << ")"; break;
        case Kind::Rotation:
            os << "rot(" << manifold_name(n.manifold);
            for (const auto& c : n.alpha) os << "," << component_text(c);
            os << ")";
            break;
        case Kind::Flow:
            os << "flow(" << hamiltonian_text(n.hamiltonian) << "," << hex(n.time) << "," << hex(n.integrator.step)
               << "," << hex(n.integrator.tolerance) << "," << n.integrator.max_iterations << ","
               << (n.integrator.method == FlowMethod::Auto ? "auto" : "midpoint") << ")";
            break;
        case Kind::Twist:
            os << "twist(" << manifold_name(n.manifold);
            for (double c : n.coeffs) os << "," << hex(c);
            os << ")";
            break;
        case Kind::Linear:
            os << "lin(" << hex(n.matrix.a) << "," << hex(n.matrix.b) << "," << hex(n.matrix.c) << ","
               << hex(n.matrix.d) << ")";
            break;
        case Kind::Compose:
            os << "comp(";
            for (std::size_t i = 0; i < n.children.size(); ++i) os << (i ? "," : "") << n.children[i].canonical();
            os << ")";
            break;
        case Kind::Inverse: os << "inv(" << n.children.front().canonical() << ")"; break;
        case Kind::Iterate: os << "iter(" << n.count << "," << n.children.front().canonical() << ")"; break;
    }
    return os.str();
}

namespace {

Mat3 flat3(double a, double b, double c, double d) {
    Mat3 J = Mat3::identity();
    J(0, 0) = a;
    J(0, 1) = b;
    J(1, 0) = c;
    J(1, 1) = d;
    return J;
}

Point flat_point(ManifoldKind m, double x, double y) {
    return m == ManifoldKind::Annulus ? Point::annulus(x, y) : Point::plane(x, y);
}

void eval(const MapExpr& f, bool inv, PointJet& s, bool want) {
    const Node& n = f.node();
    switch (n.kind) {
        case Kind::Identity: return;
        case Kind::Rotation: {
            double a = inv ? -n.alpha_value : n.alpha_value;
            if (n.manifold == ManifoldKind::Annulus) {
                s.p = Point::annulus(s.p.x[0] + a, s.p.x[1]);
            } else {
                double ang = 2.0 * std::numbers::pi * a;
                double c = std::cos(ang), sn = std::sin(ang);
                Vec3 q{c * s.p.x[0] - sn * s.p.x[1], sn * s.p.x[0] + c * s.p.x[1], s.p.x[2]};
                s.p.x = q;
                if (want) {
                    Mat3 R = Mat3::identity();
                    R(0, 0) = c;
                    R(0, 1) = -sn;
                    R(1, 0) = sn;
                    R(1, 1) = c;
                    s.J = R * s.J;
                }
            }
            return;
        }
        case Kind::Flow: {
            PointJet r = integrate_flow(n.hamiltonian, inv ? -n.time : n.time, n.integrator, s.p, want);
            s.p = r.p;
            if (want) s.J = r.J * s.J;
            return;
        }
        case Kind::Twist: {
            double u = s.p.x[1];
            double d = poly(n.coeffs, u), d1 = poly_d1(n.coeffs, u);
            if (inv) {
                d = -d;
                d1 = -d1;
            }
            s.p = flat_point(n.manifold, s.p.x[0] + d, u);
            if (want) s.J = flat3(1, d1, 0, 1) * s.J;
            return;
        }
        case Kind::Linear: {
            Mat2 M = n.matrix;
            if (inv) M = Mat2{M.d, -M.b, -M.c, M.a};
            double x = s.p.x[0], y = s.p.x[1];
            s.p = Point::plane(M.a * x + M.b * y, M.c * x + M.d * y);
            if (want) s.J = flat3(M.a, M.b, M.c, M.d) * s.J;
            return;
        }
        case Kind::Compose:
            if (inv) {
                for (const auto& c : n.children) eval(c, true, s, want);
            } else {
                for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) eval(*it, false, s, want);
            }
            return;
        case Kind::Inverse: eval(n.children.front(), !inv, s, want); return;
        case Kind::Iterate:
            for (std::int64_t k = 0; k < n.count; ++k) eval(n.children.front(), inv, s, want);
            return;
    }
}

}  // namespace

PointJet evaluate_jet(const MapExpr& f, const Point& p) {
    need_same(f.manifold(), p.manifold);
    PointJet s{p, Mat3::identity()};
    eval(f, false, s, true);
    return s;
}

Point evaluate(const MapExpr& f, const Point& p) {
    need_same(f.manifold(), p.manifold);
    PointJet s{p, Mat3::identity()};
    eval(f, false, s, false);
    return s.p;
}

Mat2 jacobian(const MapExpr& f, const Point& p) {
    PointJet s = evaluate_jet(f, p);
    return tangent_matrix(p.manifold, s.J, p.x, s.p.x);
}

namespace {

bool flat_momentum_only(const Segment& s) {
    for (const auto& t : s.terms) {
        if (t.coef == 0) continue;
        if (t.kind == TermKind::ActionLinear) continue;
        if (t.kind == TermKind::CutoffLinear && !t.cross) continue;
        return false;
    }
    return true;
}

bool height_only(const Segment& s) {
    for (const auto& t : s.terms)
        if (t.coef != 0 && t.kind != TermKind::SphereHeight) return false;
    return true;
}

double flow_lipschitz(const Node& n, const Manifold& m) {
    const auto& H = n.hamiltonian;
    const double T = std::fabs(n.time);
    bool shear = m.flat() && n.integrator.method == FlowMethod::Auto;
    bool rigid = m.kind == ManifoldKind::Sphere && n.integrator.method == FlowMethod::Auto;
    for (const auto& s : H.segments) {
        shear = shear && flat_momentum_only(s);
        rigid = rigid && height_only(s);
    }
    if (rigid) return 1.0;
    if (shear) {
        double total = 0;
        for (const auto& s : H.segments)
            for (const auto& t : s.terms) total += T * s.duration * term_field_derivative_bound(t, m);
        return shear_norm(total);
    }
    double log_bound = 0;
    for (const auto& s : H.segments) {
        double L = 0;
        for (const auto& t : s.terms) L += term_field_derivative_bound(t, m);
        double dur = T * s.duration;
        if (dur == 0 || L == 0) continue;
        auto steps = std::max<double>(1.0, std::ceil(dur / n.integrator.step));
        double h = dur / steps;
        if (h * L < 1.0)
            log_bound += steps * std::log((1.0 + 0.5 * h * L) / (1.0 - 0.5 * h * L));
        else
            log_bound += 2.0 * dur * L;  // sound for the exact flow only; steps this coarse are refused upstream
    }
    return std::exp(log_bound);
}

}  // namespace

double lipschitz_bound(const MapExpr& f, const Manifold& m) {
    const Node& n = f.node();
    switch (n.kind) {
        case Kind::Identity:
        case Kind::Rotation: return 1.0;
        case Kind::Twist: {
            double lo = m.kind == ManifoldKind::Plane ? m.plane_center[1] - m.plane_half_width : 0.0;
            double hi = m.kind == ManifoldKind::Plane ? m.plane_center[1] + m.plane_half_width : 1.0;
            double U = std::max(std::fabs(lo), std::fabs(hi));
            double s = 0, pw = 1;
            for (std::size_t k = 1; k < n.coeffs.size(); ++k) {
                s += static_cast<double>(k) * std::fabs(n.coeffs[k]) * pw;
                pw *= U;
            }
            return shear_norm(s);
        }
        case Kind::Linear: return n.matrix.max_singular();
        case Kind::Flow: return flow_lipschitz(n, m);
        case Kind::Compose: {
            double p = 1;
            for (const auto& c : n.children) p *= lipschitz_bound(c, m);
            return p;
        }
        case Kind::Inverse: return lipschitz_bound(n.children.front(), m);
        case Kind::Iterate: return std::pow(lipschitz_bound(n.children.front(), m), static_cast<double>(n.count));
    }
    return INFINITY;
}

double numerical_noise(const MapExpr& f) {
    struct Walk {
        static double go(const MapExpr& g) {
            const Node& n = g.node();
            switch (n.kind) {
                case Kind::Identity: return 0;
                case Kind::Rotation:
                case Kind::Twist:
                case Kind::Linear: return 4e-16;
                case Kind::Flow: {
                    double steps = 0;
                    for (const auto& s : n.hamiltonian.segments)
                        steps += std::max(1.0, std::ceil(std::fabs(n.time) * s.duration / n.integrator.step));
                    return 10.0 * n.integrator.tolerance + steps * 1e-15;
                }
                case Kind::Compose: {
                    double t = 0;
                    for (const auto& c : n.children) t += go(c);
                    return t;
                }
                case Kind::Inverse: return go(n.children.front());
                case Kind::Iterate: return static_cast<double>(n.count) * go(n.children.front());
            }
            return 0;
        }
    };
    return 1e-12 + Walk::go(f);
}

std::optional<ConjugatedRotation> as_conjugated_rotation(const MapExpr& f) {
    const Node& n = f.node();
    if (n.kind == Kind::Identity) return ConjugatedRotation{std::nullopt, TorusComponent::rational(Rational(0))};
    if (n.kind == Kind::Rotation) return ConjugatedRotation{std::nullopt, n.alpha.front()};
    if (n.kind != Kind::Compose || n.children.size() != 3) return std::nullopt;
    const MapExpr& mid = n.children[1];
    if (mid.kind() != Kind::Rotation) return std::nullopt;
    const MapExpr& h = n.children[2];
    const MapExpr& hinv = n.children[0];
    MapExpr expect = MapExpr::inverse(h);
    if (&expect.node() != &hinv.node() && expect.canonical() != hinv.canonical()) return std::nullopt;
    return ConjugatedRotation{h, mid.node().alpha.front()};
}

double rotation_speed(ManifoldKind m) {
    switch (m) {
        case ManifoldKind::Annulus: return 1.0;
        case ManifoldKind::Sphere: return 2.0 * std::numbers::pi;
        case ManifoldKind::Plane: return 0.0;
    }
    return 0.0;
}

}  // namespace hofer
