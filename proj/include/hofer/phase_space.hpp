#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace hofer {

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

// Row-major [[a b] [c d]].
struct Mat2 {
    double a = 1, b = 0, c = 0, d = 1;

    double det() const { return a * d - b * c; }
    double max_singular() const;
    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
};

struct Mat3 {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    double operator()(int i, int j) const { return m[static_cast<std::size_t>(3 * i + j)]; }
    double& operator()(int i, int j) { return m[static_cast<std::size_t>(3 * i + j)]; }
    Mat3 operator*(const Mat3& o) const;
    Vec3 operator*(const Vec3& v) const;
    static Mat3 identity() { return Mat3{}; }
    static Mat3 zero() { return Mat3{{0, 0, 0, 0, 0, 0, 0, 0, 0}}; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

enum class ManifoldKind { Annulus, Sphere, Plane };

std::string manifold_name(ManifoldKind k);
ManifoldKind parse_manifold(const std::string& name);

// Annulus S^1 x [0,1] with theta in [0,1) (circle of length 1), unit sphere, or the plane
// restricted to a box [cx - h, cx + h] x [cy - h, cy + h] containing all supports.
struct Manifold {
    ManifoldKind kind = ManifoldKind::Annulus;
    Vec2 plane_center{0, 0};
    double plane_half_width = 1.0;

    static Manifold annulus() { return {ManifoldKind::Annulus, {0, 0}, 1.0}; }
    static Manifold sphere() { return {ManifoldKind::Sphere, {0, 0}, 1.0}; }
    static Manifold plane(double cx = 0, double cy = 0, double half_width = 1.0) {
        return {ManifoldKind::Plane, {cx, cy}, half_width};
    }
    double diameter() const;
    // planar (2 coordinates) or embedded in R^3
    bool flat() const { return kind != ManifoldKind::Sphere; }
};

// Annulus (theta, I, 0), plane (x, y, 0), sphere (x, y, z) with |p| = 1.
struct Point {
    ManifoldKind manifold = ManifoldKind::Annulus;
    Vec3 x{0, 0, 0};

    static Point annulus(double theta, double action);
    static Point plane(double x, double y);
    static Point sphere(const Vec3& p);  // normalises; rejects |p| far from 1
    static Point sphere_polar(double colatitude, double longitude);
};

double distance(const Point& p, const Point& q);

// Positively oriented orthonormal tangent frame of the sphere at p.
std::array<Vec3, 2> sphere_frame(const Vec3& p);

// Tangent 2x2 matrix of an ambient 3x3 derivative from p to q (identity frames on flat manifolds).
Mat2 tangent_matrix(ManifoldKind kind, const Mat3& ambient, const Vec3& p, const Vec3& q);

enum class ChartKind { PlaneBox, AnnulusStrip, SphereCap };

// Darboux chart with nested compacta K inside K' inside U.
//  PlaneBox      identity; K, K' squares centred at (cx, cy) with half widths k_hi, kp_hi
//  AnnulusStrip  U = {theta in (window, window + 1)} unrolled; K = [k_lo, k_hi] x [0,1],
//                K' = [kp_lo, kp_hi] x [0,1] in unrolled coordinates
//  SphereCap     Lambert equal-area projection from the pole `pole` (+1 north, -1 south);
//                K = {pole*z >= k_lo}, K' = {pole*z >= kp_lo}
struct DarbouxChart {
    ChartKind kind = ChartKind::PlaneBox;
    std::string name;
    double k_lo = 0, k_hi = 0, kp_lo = 0, kp_hi = 0;
    double window = 0;
    int pole = 1;
    Vec2 center{0, 0};

    static DarbouxChart plane_box(Vec2 center, double k_half, double kp_half);
    static DarbouxChart annulus_strip(double window, double k_lo, double k_hi, double kp_lo, double kp_hi);
    static DarbouxChart sphere_cap(int pole, double z_k, double z_kp);

    ManifoldKind manifold() const;
    Vec2 to_chart(const Point& p) const;
    Point from_chart(const Vec2& u) const;
    // Columns of D(psi^-1) at u as ambient vectors.
    std::array<Vec3, 2> inverse_jacobian(const Vec2& u) const;
    double inverse_jacobian_norm(const Vec2& u) const;
    // |det D(psi^-1)| - 1 in orthonormal frames, zero for a Darboux chart.
    double area_defect(const Vec2& u) const;

    bool in_domain(const Point& p) const;
    bool in_K(const Point& p) const;
    bool in_Kprime(const Point& p) const;
    // The closed geodesic ball B(c, r) lies in K' (and away from the annulus edges).
    bool contains_ball(const Point& c, double r) const;

    std::vector<Point> boundary_K(int n) const;
    std::vector<Point> boundary_Kprime(int n) const;
    // Grid over psi(K'), n points per direction including the boundary.
    std::vector<Vec2> chart_samples_Kprime(int n) const;
};

struct Atlas {
    ManifoldKind manifold = ManifoldKind::Annulus;
    std::vector<DarbouxChart> charts;

    static Atlas default_for(const Manifold& m);
    const DarbouxChart* chart_containing_ball(const Point& c, double r) const;
};

struct InequalityConstants {
    double delta = 0;
    double C_proof = 0;  // 8L / sqrt(pi)
    double C = 0;        // raised to diam / sqrt(delta) when that is larger
};

InequalityConstants inequality_constants(double epsilon, double L, double diameter);

struct AtlasConstants {
    double epsilon = 0;
    double L = 0;
    double epsilon_mesh = 0;
    double L_mesh = 0;
    double diameter = 0;
    InequalityConstants constants;
};

// Checks the cover on the given samples (ConfigError when some sample is in no K_i),
// then samples boundaries for epsilon and chart images for L.
AtlasConstants atlas_constants(const Atlas& atlas, const Manifold& m, const std::vector<Point>& cover_samples,
                               int boundary_samples = 256, int chart_samples = 257);

}  // namespace hofer
