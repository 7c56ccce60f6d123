#include "hofer/errors.hpp"
#include "hofer/map_expr.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hofer {

void IntegratorParams::validate() const {
    if (!(step > 0) || !std::isfinite(step)) throw ConfigError("integrator step must be positive");
    if (!(tolerance > 0) || tolerance > 1e-12) throw ConfigError("integrator tolerance must be in (0, 1e-12]");
    if (max_iterations < 2) throw ConfigError("integrator needs at least 2 fixed-point iterations");
}

namespace {

bool momentum_only(const Segment& s) {
    for (const auto& t : s.terms) {
        if (t.coef == 0) continue;
        if (t.kind == TermKind::ActionLinear || t.kind == TermKind::SphereHeight) continue;
        if (t.kind == TermKind::CutoffLinear && !t.cross) continue;
        return false;
    }
    return true;
}

Mat3 inverse3(const Mat3& a) {
    Mat3 r = Mat3::zero();
    r(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
    r(0, 1) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
    r(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
    r(1, 0) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
    r(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
    r(1, 2) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
    r(2, 0) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
    r(2, 1) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
    r(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    double det = a(0, 0) * r(0, 0) + a(0, 1) * r(1, 0) + a(0, 2) * r(2, 0);
    for (double& v : r.m) v /= det;
    return r;
}

[[noreturn]] void fail(const char* where, std::size_t step, double x, double y, double z, double diff) {
    std::ostringstream os;
    os << "implicit midpoint did not converge (" << where << ", step " << step << ", at (" << x << ", " << y
       << ", " << z << "), last correction " << diff << ")";
    throw IntegrationError(os.str());
}

void flat_segment(const std::vector<HamiltonianTerm>& terms, double T, const IntegratorParams& ip, bool closed,
                  double& x, double& y, Mat3& J, bool want) {
    if (closed) {
        FlatJet j = flat_jet(terms, x, y);
        x += T * j.h2;
        if (want) {
            Mat3 S = Mat3::identity();
            S(0, 1) = T * j.h22;
            J = S * J;
        }
        return;
    }
    auto n = static_cast<std::size_t>(std::ceil(std::fabs(T) / ip.step));
    if (n == 0) n = 1;
    const double h = T / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        FlatJet j = flat_jet(terms, x, y);
        double nx = x + h * j.h2, ny = y - h * j.h1;
        bool ok = false;
        double diff = 0;
        for (int it = 0; it < ip.max_iterations; ++it) {
            j = flat_jet(terms, 0.5 * (x + nx), 0.5 * (y + ny));
            double tx = x + h * j.h2, ty = y - h * j.h1;
            diff = std::max(std::fabs(tx - nx), std::fabs(ty - ny));
            nx = tx;
            ny = ty;
            if (diff <= ip.tolerance * std::max({1.0, std::fabs(nx), std::fabs(ny)})) {
                ok = true;
                break;
            }
        }
        if (!ok) fail("flat", k, x, y, 0, diff);
        if (want) {
            j = flat_jet(terms, 0.5 * (x + nx), 0.5 * (y + ny));
            // A = D X = [[h12, h22], [-h11, -h12]];  J <- (I - h/2 A)^-1 (I + h/2 A) J
            double a = 0.5 * h * j.h12, b = 0.5 * h * j.h22, c = -0.5 * h * j.h11, d = -0.5 * h * j.h12;
            double ma = 1 - a, mb = -b, mc = -c, md = 1 - d;
            double det = ma * md - mb * mc;
            double pa = 1 + a, pb = b, pc = c, pd = 1 + d;
            // M^-1 = [[md, -mb], [-mc, ma]] / det
            double sa = (md * pa - mb * pc) / det, sb = (md * pb - mb * pd) / det;
            double sc = (-mc * pa + ma * pc) / det, sd = (-mc * pb + ma * pd) / det;
            Mat3 S = Mat3::identity();
            S(0, 0) = sa;
            S(0, 1) = sb;
            S(1, 0) = sc;
            S(1, 1) = sd;
            J = S * J;
        }
        x = nx;
        y = ny;
    }
}

Vec3 sphere_field(const HeightJet& j, const Vec3& m) { return {-j.hz * m[1], j.hz * m[0], 0.0}; }

void sphere_segment(const std::vector<HamiltonianTerm>& terms, double T, const IntegratorParams& ip, bool closed,
                    Vec3& p, Mat3& J, bool want) {
    if (closed) {
        HeightJet j = height_jet(terms, p[2]);
        double a = T * j.hz;
        double c = std::cos(a), s = std::sin(a);
        Vec3 q{c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]};
        if (want) {
            Mat3 S = Mat3::identity();
            S(0, 0) = c;
            S(0, 1) = -s;
            S(1, 0) = s;
            S(1, 1) = c;
            // d(angle)/dz contribution
            double da = T * j.hzz;
            S(0, 2) = da * (-s * p[0] - c * p[1]);
            S(1, 2) = da * (c * p[0] - s * p[1]);
            J = S * J;
        }
        p = q;
        return;
    }
    auto n = static_cast<std::size_t>(std::ceil(std::fabs(T) / ip.step));
    if (n == 0) n = 1;
    const double h = T / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        HeightJet j = height_jet(terms, p[2]);
        Vec3 X = sphere_field(j, p);
        Vec3 y{p[0] + h * X[0], p[1] + h * X[1], p[2] + h * X[2]};
        bool ok = false;
        double diff = 0;
        Vec3 m{};
        for (int it = 0; it < ip.max_iterations; ++it) {
            m = {0.5 * (p[0] + y[0]), 0.5 * (p[1] + y[1]), 0.5 * (p[2] + y[2])};
            j = height_jet(terms, m[2]);
            X = sphere_field(j, m);
            Vec3 t{p[0] + h * X[0], p[1] + h * X[1], p[2] + h * X[2]};
            diff = std::max({std::fabs(t[0] - y[0]), std::fabs(t[1] - y[1]), std::fabs(t[2] - y[2])});
            y = t;
            if (diff <= ip.tolerance) {
                ok = true;
                break;
            }
        }
        if (!ok) fail("sphere", k, p[0], p[1], p[2], diff);
        double ny = norm(y);
        Vec3 q{y[0] / ny, y[1] / ny, y[2] / ny};
        if (want) {
            m = {0.5 * (p[0] + y[0]), 0.5 * (p[1] + y[1]), 0.5 * (p[2] + y[2])};
            j = height_jet(terms, m[2]);
            Mat3 A = Mat3::zero();
            A(0, 1) = -j.hz;
            A(1, 0) = j.hz;
            A(0, 2) = -j.hzz * m[1];
            A(1, 2) = j.hzz * m[0];
            Mat3 B = Mat3::identity(), C = Mat3::identity();
            for (std::size_t i = 0; i < 9; ++i) {
                B.m[i] -= 0.5 * h * A.m[i];
                C.m[i] += 0.5 * h * A.m[i];
            }
            Mat3 P = Mat3::identity();
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) P(r, c) = ((r == c ? 1.0 : 0.0) - q[static_cast<std::size_t>(r)] * q[static_cast<std::size_t>(c)]) / ny;
            J = P * (inverse3(B) * (C * J));
        }
        p = q;
    }
}

}  // namespace

PointJet integrate_flow(const HamiltonianSpec& H, double t, const IntegratorParams& ip, const Point& p,
                        bool want_jacobian) {
    ip.validate();
    if (p.manifold != H.manifold) throw std::domain_error("flow and point live on different manifolds");
    PointJet out{p, Mat3::identity()};
    if (t == 0 || H.is_zero()) return out;
    const std::size_t ns = H.segments.size();
    if (p.manifold == ManifoldKind::Sphere) {
        Vec3 q = p.x;
        for (std::size_t i = 0; i < ns; ++i) {
            const Segment& s = H.segments[t > 0 ? i : ns - 1 - i];
            bool closed = ip.method == FlowMethod::Auto && momentum_only(s);
            sphere_segment(s.terms, t * s.duration, ip, closed, q, out.J, want_jacobian);
        }
        out.p = Point{ManifoldKind::Sphere, q};
        return out;
    }
    double x = p.x[0], y = p.x[1];
    for (std::size_t i = 0; i < ns; ++i) {
        const Segment& s = H.segments[t > 0 ? i : ns - 1 - i];
        bool closed = ip.method == FlowMethod::Auto && momentum_only(s);
        flat_segment(s.terms, t * s.duration, ip, closed, x, y, out.J, want_jacobian);
    }
    if (!std::isfinite(x) || !std::isfinite(y)) throw IntegrationError("flow produced a non-finite point");
    if (p.manifold == ManifoldKind::Annulus) {
        if (y < -1e-9 || y > 1.0 + 1e-9) {
            std::ostringstream os;
            os << "flow left the annulus (I = " << y << ")";
            throw IntegrationError(os.str());
        }
        out.p = Point::annulus(x, std::clamp(y, 0.0, 1.0));
    } else {
        out.p = Point::plane(x, y);
    }
    return out;
}

}  // namespace hofer
