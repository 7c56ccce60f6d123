#pragma once

#include "hofer/grid.hpp"
#include "hofer/map_expr.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hofer {

struct NormEstimate {
    double lower = 0;
    double upper = 0;            // may be +inf
    double raw = 0;              // uncorrected grid maximum
    double upper_log2 = 0;       // log2(upper); finite even when upper underflows
    std::string method;
    double mesh = 0;
    double lipschitz = 0;        // certified Lipschitz bound that entered the estimate
    std::vector<double> levels;  // per-level grid maxima (derivative_norm only)

    double margin() const { return upper - lower; }
};

// lower: grid max of d(f x, g x) minus the evaluation noise, clipped at 0.
// upper: raw max + (Lip f + Lip g) * mesh + noise; for g = Id and f = h^-1 R_b h also
// Lip(h) * ||b|| * speed, whichever is smaller.
NormEstimate c0_distance(const MapExpr& f, const MapExpr& g, const Manifold& m, const GridSpec& grid);

// Grid max of the largest singular value of Df over nested refinement levels.
// lower = finest level; upper = lower + 2 |L_R - L_{R-1}|, clipped to the structural bound.
// Throws InvariantViolation when lower < 1 (a symplectic map always has norm >= 1).
NormEstimate derivative_norm(const MapExpr& f, const Manifold& m, const GridSpec& grid);

double symplecticity_defect(const MapExpr& f, const Manifold& m, const GridSpec& grid);

// Grid sup of the Frobenius norm of Df - Dg (tangent frames).
double c1_gap(const MapExpr& f, const MapExpr& g, const Manifold& m, const GridSpec& grid);

struct HoferRotationBound {
    double tight = 0;   // sum |a_i| osc(H_i)
    double coarse = 0;  // 2 k ||a|| max ||H_i||_inf
    Rational tight_upper_exact{0};  // exact upper bound on `tight` (0 if symbolic)
    double tight_log2 = -INFINITY;
    double mu_sup = 0;
    double osc_sum = 0;
};

HoferRotationBound hofer_rotation_bound(const TorusVector& alpha, const std::vector<HamiltonianSpec>& action,
                                        const Manifold& m);
// Default period-1 action: I on the annulus, 2 pi z on the sphere.
std::vector<HamiltonianSpec> default_action(const Manifold& m);

struct GammaEstimate {
    double value = 0;
    bool exact = false;      // osc is the exact spectral norm (small regime)
    double hessian_sup = 0;
    double threshold = 0.1;
    std::string note;
};

GammaEstimate gamma_exact_small(const HamiltonianSpec& h, const Manifold& m, const GridSpec& grid,
                                double threshold = 0.1);

struct DisplacementBounds {
    double lower = 0;
    double upper = 0;
    HamiltonianSpec displacing;
    double shift = 0;  // how far the displacing flow moves the ball centre
};

DisplacementBounds displacement_energy_bounds(const Point& center, double r, const Manifold& m);

struct WitnessSearch {
    std::optional<Point> witness;
    double mesh = 0;
    std::size_t tried = 0;
};

// Looks for y in B(x, r) with f^-1(y) in B(x, r).  budget.counts = {radii, angles}.
WitnessSearch nondisplacement_witness(const MapExpr& f, const Point& x, double r, const Manifold& m,
                                      const GridSpec& budget);

enum class HolderForm { Standard, RefinedPlane };

struct HolderReport {
    NormEstimate c0;
    NormEstimate deriv;
    double gamma_ub = 0;
    double C = 0;
    double rhs = 0;
    double rhs_inflated = 0;
    double noise = 0;
    bool violation = false;
    double slack_ratio = INFINITY;  // rhs / lhs
};

HolderReport check_holder_inequality(const MapExpr& f, double gamma_ub, double C, const Manifold& m,
                                     const GridSpec& grid, HolderForm form = HolderForm::Standard);

}  // namespace hofer
