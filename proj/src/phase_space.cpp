#include "hofer/phase_space.hpp"

#include "hofer/errors.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace hofer {

double Mat2::max_singular() const {
    double s = a + d, t = c - b, u = a - d, v = b + c;
    return 0.5 * (std::sqrt(s * s + t * t) + std::sqrt(u * u + v * v));
}

Mat3 Mat3::operator*(const Mat3& o) const {
    Mat3 r = Mat3::zero();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0;
            for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
            r(i, j) = s;
        }
    return r;
}

Vec3 Mat3::operator*(const Vec3& v) const {
    Vec3 r{};
    for (int i = 0; i < 3; ++i) r[static_cast<std::size_t>(i)] = (*this)(i, 0) * v[0] + (*this)(i, 1) * v[1] + (*this)(i, 2) * v[2];
    return r;
}

std::string manifold_name(ManifoldKind k) {
    switch (k) {
        case ManifoldKind::Annulus: return "annulus";
        case ManifoldKind::Sphere: return "sphere";
        case ManifoldKind::Plane: return "plane";
    }
    return "?";
}

ManifoldKind parse_manifold(const std::string& name) {
    if (name == "annulus") return ManifoldKind::Annulus;
    if (name == "sphere") return ManifoldKind::Sphere;
    if (name == "plane") return ManifoldKind::Plane;
    throw ConfigError("unknown manifold '" + name + "'");
}

double Manifold::diameter() const {
    switch (kind) {
        case ManifoldKind::Annulus: return std::sqrt(1.25);
        case ManifoldKind::Sphere: return std::numbers::pi;
        case ManifoldKind::Plane: return 2.0 * std::sqrt(2.0) * plane_half_width;
    }
    return 0;
}

Point Point::annulus(double theta, double action) {
    if (!std::isfinite(theta) || !std::isfinite(action)) throw std::domain_error("non-finite annulus point");
    if (action < -1e-12 || action > 1 + 1e-12) throw std::domain_error("annulus action coordinate outside [0,1]");
    double t = theta - std::floor(theta);
    if (t >= 1.0) t = 0.0;
    return {ManifoldKind::Annulus, {t, action, 0}};
}

Point Point::plane(double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) throw std::domain_error("non-finite plane point");
    return {ManifoldKind::Plane, {x, y, 0}};
}

Point Point::sphere(const Vec3& p) {
    double n = norm(p);
    if (!std::isfinite(n) || std::fabs(n - 1.0) > 1e-6) throw std::domain_error("sphere point off the unit sphere");
    return {ManifoldKind::Sphere, {p[0] / n, p[1] / n, p[2] / n}};
}

Point Point::sphere_polar(double colatitude, double longitude) {
    double s = std::sin(colatitude);
    return {ManifoldKind::Sphere, {s * std::cos(longitude), s * std::sin(longitude), std::cos(colatitude)}};
}

double distance(const Point& p, const Point& q) {
    if (p.manifold != q.manifold) throw std::domain_error("distance between points of different manifolds");
    switch (p.manifold) {
        case ManifoldKind::Annulus: {
            double dt = std::fabs(p.x[0] - q.x[0]);
            dt = std::min(dt, 1.0 - dt);
            double di = p.x[1] - q.x[1];
            return std::sqrt(dt * dt + di * di);
        }
        case ManifoldKind::Plane: {
            double dx = p.x[0] - q.x[0], dy = p.x[1] - q.x[1];
            return std::sqrt(dx * dx + dy * dy);
        }
        case ManifoldKind::Sphere: return std::atan2(norm(cross(p.x, q.x)), dot(p.x, q.x));
    }
    return 0;
}

std::array<Vec3, 2> sphere_frame(const Vec3& p) {
    double r = std::sqrt(p[0] * p[0] + p[1] * p[1]);
    if (std::fabs(p[2]) <= 0.9) {
        Vec3 e_t{p[0] * p[2] / r, p[1] * p[2] / r, -r};
        Vec3 e_p{-p[1] / r, p[0] / r, 0};
        return {e_t, e_p};
    }
    Vec3 e1{1.0 - p[0] * p[0], -p[0] * p[1], -p[0] * p[2]};
    double n = norm(e1);
    e1 = {e1[0] / n, e1[1] / n, e1[2] / n};
    return {e1, cross(p, e1)};
}

Mat2 tangent_matrix(ManifoldKind kind, const Mat3& J, const Vec3& p, const Vec3& q) {
    if (kind != ManifoldKind::Sphere) return {J(0, 0), J(0, 1), J(1, 0), J(1, 1)};
    auto fp = sphere_frame(p);
    auto fq = sphere_frame(q);
    Vec3 c0 = J * fp[0], c1 = J * fp[1];
    return {dot(fq[0], c0), dot(fq[0], c1), dot(fq[1], c0), dot(fq[1], c1)};
}

DarbouxChart DarbouxChart::plane_box(Vec2 center, double k_half, double kp_half) {
    if (!(0 < k_half && k_half < kp_half)) throw ConfigError("plane chart needs 0 < K half width < K' half width");
    DarbouxChart c;
    c.kind = ChartKind::PlaneBox;
    c.name = "plane-box";
    c.center = center;
    c.k_lo = -k_half;
    c.k_hi = k_half;
    c.kp_lo = -kp_half;
    c.kp_hi = kp_half;
    return c;
}

DarbouxChart DarbouxChart::annulus_strip(double window, double k_lo, double k_hi, double kp_lo, double kp_hi) {
    if (!(window < kp_lo && kp_lo < k_lo && k_lo < k_hi && k_hi < kp_hi && kp_hi < window + 1))
        throw ConfigError("annulus chart needs window < K'lo < Klo < Khi < K'hi < window + 1");
    DarbouxChart c;
    c.kind = ChartKind::AnnulusStrip;
    c.name = "annulus-strip";
    c.window = window;
    c.k_lo = k_lo;
    c.k_hi = k_hi;
    c.kp_lo = kp_lo;
    c.kp_hi = kp_hi;
    return c;
}

DarbouxChart DarbouxChart::sphere_cap(int pole, double z_k, double z_kp) {
    if (pole != 1 && pole != -1) throw ConfigError("sphere chart pole must be +1 or -1");
    if (!(-1 < z_kp && z_kp < z_k && z_k < 1)) throw ConfigError("sphere chart needs -1 < z(K') < z(K) < 1");
    DarbouxChart c;
    c.kind = ChartKind::SphereCap;
    c.name = pole > 0 ? "sphere-north" : "sphere-south";
    c.pole = pole;
    c.k_lo = z_k;
    c.kp_lo = z_kp;
    return c;
}

ManifoldKind DarbouxChart::manifold() const {
    switch (kind) {
        case ChartKind::PlaneBox: return ManifoldKind::Plane;
        case ChartKind::AnnulusStrip: return ManifoldKind::Annulus;
        case ChartKind::SphereCap: return ManifoldKind::Sphere;
    }
    return ManifoldKind::Plane;
}

namespace {

// reflection (x, y, z) -> (x, -y, -z) carries the south cap to the north cap
Vec3 to_north(const Vec3& p, int pole) { return pole > 0 ? p : Vec3{p[0], -p[1], -p[2]}; }

double unroll(double theta, double window) {
    double t = theta - window;
    t -= std::floor(t);
    return window + t;
}

}  // namespace

Vec2 DarbouxChart::to_chart(const Point& p) const {
    if (p.manifold != manifold()) throw std::domain_error("point and chart live on different manifolds");
    switch (kind) {
        case ChartKind::PlaneBox: return {p.x[0], p.x[1]};
        case ChartKind::AnnulusStrip: return {unroll(p.x[0], window), p.x[1]};
        case ChartKind::SphereCap: {
            Vec3 q = to_north(p.x, pole);
            if (q[2] <= -1.0 + 1e-14) throw std::domain_error("point at the excluded pole of the chart");
            double s = std::sqrt(2.0 / (1.0 + q[2]));
            return {q[0] * s, q[1] * s};
        }
    }
    return {0, 0};
}

Point DarbouxChart::from_chart(const Vec2& u) const {
    switch (kind) {
        case ChartKind::PlaneBox: return Point::plane(u[0], u[1]);
        case ChartKind::AnnulusStrip: return Point::annulus(u[0], u[1]);
        case ChartKind::SphereCap: {
            double rho2 = u[0] * u[0] + u[1] * u[1];
            if (rho2 >= 4.0) throw std::domain_error("chart coordinate outside the Lambert disc");
            double s = std::sqrt(1.0 - rho2 / 4.0);
            Vec3 q{u[0] * s, u[1] * s, 1.0 - rho2 / 2.0};
            Point p{ManifoldKind::Sphere, to_north(q, pole)};
            return p;
        }
    }
    return {};
}

std::array<Vec3, 2> DarbouxChart::inverse_jacobian(const Vec2& u) const {
    if (kind != ChartKind::SphereCap) return {Vec3{1, 0, 0}, Vec3{0, 1, 0}};
    double rho2 = u[0] * u[0] + u[1] * u[1];
    double s = std::sqrt(1.0 - rho2 / 4.0);
    double su = -u[0] / (4.0 * s), sv = -u[1] / (4.0 * s);
    Vec3 cu{s + u[0] * su, u[1] * su, -u[0]};
    Vec3 cv{u[0] * sv, s + u[1] * sv, -u[1]};
    return {to_north(cu, pole), to_north(cv, pole)};
}

double DarbouxChart::inverse_jacobian_norm(const Vec2& u) const {
    auto J = inverse_jacobian(u);
    double g11 = dot(J[0], J[0]), g22 = dot(J[1], J[1]), g12 = dot(J[0], J[1]);
    double h = 0.5 * (g11 - g22);
    double lmax = 0.5 * (g11 + g22) + std::sqrt(h * h + g12 * g12);
    return std::sqrt(lmax);
}

double DarbouxChart::area_defect(const Vec2& u) const {
    if (kind != ChartKind::SphereCap) return 0.0;
    auto J = inverse_jacobian(u);
    Point p = from_chart(u);
    auto f = sphere_frame(p.x);
    double det = dot(f[0], J[0]) * dot(f[1], J[1]) - dot(f[0], J[1]) * dot(f[1], J[0]);
    return std::fabs(std::fabs(det) - 1.0);
}

bool DarbouxChart::in_domain(const Point& p) const {
    if (p.manifold != manifold()) return false;
    switch (kind) {
        case ChartKind::PlaneBox: return true;
        case ChartKind::AnnulusStrip: return unroll(p.x[0], window) > window;
        case ChartKind::SphereCap: return to_north(p.x, pole)[2] > -1.0;
    }
    return false;
}

bool DarbouxChart::in_K(const Point& p) const {
    if (p.manifold != manifold()) return false;
    switch (kind) {
        case ChartKind::PlaneBox:
            return std::fabs(p.x[0] - center[0]) <= k_hi && std::fabs(p.x[1] - center[1]) <= k_hi;
        case ChartKind::AnnulusStrip: {
            double u = unroll(p.x[0], window);
            return u >= k_lo && u <= k_hi;
        }
        case ChartKind::SphereCap: return to_north(p.x, pole)[2] >= k_lo;
    }
    return false;
}

bool DarbouxChart::in_Kprime(const Point& p) const {
    if (p.manifold != manifold()) return false;
    switch (kind) {
        case ChartKind::PlaneBox:
            return std::fabs(p.x[0] - center[0]) <= kp_hi && std::fabs(p.x[1] - center[1]) <= kp_hi;
        case ChartKind::AnnulusStrip: {
            double u = unroll(p.x[0], window);
            return u >= kp_lo && u <= kp_hi;
        }
        case ChartKind::SphereCap: return to_north(p.x, pole)[2] >= kp_lo;
    }
    return false;
}

bool DarbouxChart::contains_ball(const Point& c, double r) const {
    if (c.manifold != manifold() || r < 0) return false;
    switch (kind) {
        case ChartKind::PlaneBox:
            return std::fabs(c.x[0] - center[0]) + r <= kp_hi && std::fabs(c.x[1] - center[1]) + r <= kp_hi;
        case ChartKind::AnnulusStrip: {
            double u = unroll(c.x[0], window);
            return u - r >= kp_lo && u + r <= kp_hi && c.x[1] - r >= 0.0 && c.x[1] + r <= 1.0;
        }
        case ChartKind::SphereCap: {
            double zc = std::clamp(to_north(c.x, pole)[2], -1.0, 1.0);
            return std::acos(zc) + r <= std::acos(kp_lo);
        }
    }
    return false;
}

namespace {

std::vector<Point> square_boundary(Vec2 c, double h, int n) {
    std::vector<Point> pts;
    for (int i = 0; i < n; ++i) {
        double t = -h + 2.0 * h * i / (n - 1);
        pts.push_back(Point::plane(c[0] + t, c[1] - h));
        pts.push_back(Point::plane(c[0] + t, c[1] + h));
        pts.push_back(Point::plane(c[0] - h, c[1] + t));
        pts.push_back(Point::plane(c[0] + h, c[1] + t));
    }
    return pts;
}

std::vector<Point> strip_boundary(double a, double b, int n) {
    std::vector<Point> pts;
    for (int j = 0; j < n; ++j) {
        double I = static_cast<double>(j) / (n - 1);
        pts.push_back(Point::annulus(a, I));
        pts.push_back(Point::annulus(b, I));
    }
    return pts;
}

std::vector<Point> cap_boundary(double z, int pole, int n) {
    std::vector<Point> pts;
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    for (int i = 0; i < n; ++i) {
        double phi = 2.0 * std::numbers::pi * i / n;
        Vec3 q{r * std::cos(phi), r * std::sin(phi), z};
        pts.push_back(Point{ManifoldKind::Sphere, to_north(q, pole)});
    }
    return pts;
}

}  // namespace

std::vector<Point> DarbouxChart::boundary_K(int n) const {
    switch (kind) {
        case ChartKind::PlaneBox: return square_boundary(center, k_hi, n);
        case ChartKind::AnnulusStrip: return strip_boundary(k_lo, k_hi, n);
        case ChartKind::SphereCap: return cap_boundary(k_lo, pole, n);
    }
    return {};
}

std::vector<Point> DarbouxChart::boundary_Kprime(int n) const {
    switch (kind) {
        case ChartKind::PlaneBox: return square_boundary(center, kp_hi, n);
        case ChartKind::AnnulusStrip: return strip_boundary(kp_lo, kp_hi, n);
        case ChartKind::SphereCap: return cap_boundary(kp_lo, pole, n);
    }
    return {};
}

std::vector<Vec2> DarbouxChart::chart_samples_Kprime(int n) const {
    std::vector<Vec2> out;
    switch (kind) {
        case ChartKind::PlaneBox:
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    out.push_back({center[0] + kp_lo + (kp_hi - kp_lo) * i / (n - 1),
                                   center[1] + kp_lo + (kp_hi - kp_lo) * j / (n - 1)});
            break;
        case ChartKind::AnnulusStrip:
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    out.push_back({kp_lo + (kp_hi - kp_lo) * i / (n - 1), static_cast<double>(j) / (n - 1)});
            break;
        case ChartKind::SphereCap: {
            double rho_max = std::sqrt(2.0 * (1.0 - kp_lo));
            for (int i = 0; i < n; ++i) {
                double rho = rho_max * i / (n - 1);
                int m = i == 0 ? 1 : n;
                for (int j = 0; j < m; ++j) {
                    double a = 2.0 * std::numbers::pi * j / m;
                    out.push_back({rho * std::cos(a), rho * std::sin(a)});
                }
            }
            break;
        }
    }
    return out;
}

Atlas Atlas::default_for(const Manifold& m) {
    Atlas a;
    a.manifold = m.kind;
    switch (m.kind) {
        case ManifoldKind::Annulus:
            a.charts.push_back(DarbouxChart::annulus_strip(0.0, 0.15, 0.85, 0.05, 0.95));
            a.charts.push_back(DarbouxChart::annulus_strip(-0.5, -0.35, 0.35, -0.45, 0.45));
            break;
        case ManifoldKind::Sphere:
            a.charts.push_back(DarbouxChart::sphere_cap(1, -0.1, -0.5));
            a.charts.push_back(DarbouxChart::sphere_cap(-1, -0.1, -0.5));
            break;
        case ManifoldKind::Plane:
            a.charts.push_back(DarbouxChart::plane_box(m.plane_center, m.plane_half_width, m.plane_half_width + 1.0));
            break;
    }
    return a;
}

const DarbouxChart* Atlas::chart_containing_ball(const Point& c, double r) const {
    for (const auto& ch : charts)
        if (ch.contains_ball(c, r)) return &ch;
    return nullptr;
}

InequalityConstants inequality_constants(double epsilon, double L, double diameter) {
    if (!(epsilon > 0) || !(L >= 1)) throw std::domain_error("need epsilon > 0 and L >= 1");
    InequalityConstants k;
    k.delta = std::numbers::pi * epsilon * epsilon / (4.0 * L * L);
    k.C_proof = 8.0 * L / std::sqrt(std::numbers::pi);
    k.C = std::max(k.C_proof, diameter / std::sqrt(k.delta));
    return k;
}

AtlasConstants atlas_constants(const Atlas& atlas, const Manifold& m, const std::vector<Point>& cover_samples,
                               int boundary_samples, int chart_samples) {
    if (atlas.charts.empty()) throw ConfigError("atlas has no charts");
    for (const auto& ch : atlas.charts)
        if (ch.manifold() != m.kind) throw ConfigError("atlas chart on the wrong manifold");
    for (const auto& p : cover_samples) {
        bool covered = std::any_of(atlas.charts.begin(), atlas.charts.end(), [&](const DarbouxChart& c) { return c.in_K(p); });
        if (!covered) {
            throw ConfigError("charts do not cover the manifold: sample (" + std::to_string(p.x[0]) + ", " +
                              std::to_string(p.x[1]) + ", " + std::to_string(p.x[2]) + ") lies in no K_i");
        }
    }
    AtlasConstants out;
    out.diameter = m.diameter();
    out.epsilon = std::numeric_limits<double>::infinity();
    out.L = 0;
    for (const auto& ch : atlas.charts) {
        auto bk = ch.boundary_K(boundary_samples);
        auto bkp = ch.boundary_Kprime(boundary_samples);
        double e = std::numeric_limits<double>::infinity();
        for (const auto& p : bk)
            for (const auto& q : bkp) e = std::min(e, distance(p, q));
        // the sampled minimum can only overshoot; the nested shapes also give it in closed form
        double exact = e;
        switch (ch.kind) {
            case ChartKind::PlaneBox: exact = ch.kp_hi - ch.k_hi; break;
            case ChartKind::AnnulusStrip:
                for (double a : {ch.k_lo, ch.k_hi})
                    for (double b : {ch.kp_lo, ch.kp_hi}) {
                        double d = std::fabs(a - b) - std::floor(std::fabs(a - b));
                        exact = std::min(exact, std::min(d, 1.0 - d));
                    }
                break;
            case ChartKind::SphereCap: exact = std::acos(ch.kp_lo) - std::acos(ch.k_lo); break;
        }
        out.epsilon = std::min({out.epsilon, e, exact});
        double spacing = 0;
        switch (ch.kind) {
            case ChartKind::PlaneBox: spacing = 2.0 * ch.kp_hi / (boundary_samples - 1); break;
            case ChartKind::AnnulusStrip: spacing = 1.0 / (boundary_samples - 1); break;
            case ChartKind::SphereCap: spacing = 2.0 * std::numbers::pi / boundary_samples; break;
        }
        out.epsilon_mesh = std::max(out.epsilon_mesh, spacing);
        for (const auto& u : ch.chart_samples_Kprime(chart_samples)) out.L = std::max(out.L, ch.inverse_jacobian_norm(u));
        double cs = 0;
        switch (ch.kind) {
            case ChartKind::PlaneBox: cs = (ch.kp_hi - ch.kp_lo) / (chart_samples - 1); break;
            case ChartKind::AnnulusStrip: cs = std::max(ch.kp_hi - ch.kp_lo, 1.0) / (chart_samples - 1); break;
            case ChartKind::SphereCap: cs = 2.0 * std::numbers::pi * std::sqrt(2.0 * (1.0 - ch.kp_lo)) / chart_samples; break;
        }
        out.L_mesh = std::max(out.L_mesh, cs);
    }
    out.constants = inequality_constants(out.epsilon, out.L, out.diameter);
    return out;
}

}  // namespace hofer
