#pragma once

#include "hofer/norms.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hofer {

// g = time-1 flow of amplitude * A(I) sin(2 pi q theta + phase) / (2 pi q) on the annulus.
// It commutes with rotation by j/q for every integer j.
struct ConjugatorSpec {
    int stage = 1;
    int frequency = 1;  // 0: the previous stage's denominator
    double amplitude = 0;
    std::optional<double> kappa;  // when set, amplitude = kappa / (2 pi frequency)
    double phase = 0;
    PlateauProfile profile{{0.1, 0.3, 0.7, 0.9}};

    void validate() const;
    HamiltonianSpec hamiltonian() const;
    MapExpr map(const IntegratorParams& ip) const;
};

struct AKStage {
    std::optional<Rational> alpha;  // chosen by ak_next_alpha when absent (not allowed at stage 1)
    ConjugatorSpec conjugator;
    double tol = INFINITY;
};

struct AKSchedule {
    std::vector<AKStage> stages;
    IntegratorParams integrator;
    bool nested = true;  // force den(alpha_{m+1}) to be a multiple of the next frequency

    void validate() const;
};

struct AKApproximant {
    int stage = 0;
    Rational alpha;
    BigInt q;  // denominator of alpha
    int frequency = 0;
    MapExpr h;
    MapExpr phi;
    NormEstimate c0_gap;        // d(phi_m, phi_{m-1})
    double c0_gap_bound = 0;    // Lip(h_m) |alpha_m - alpha_{m-1}| speed (stages >= 2)
    double c1_gap = 0;
    NormEstimate deriv_h;
    double commutation_residual = 0;
    double consistency = 0;     // d(h_m^-1 R_{alpha_{m-1}} h_m, phi_{m-1}), stages >= 2
    double tol = 0;
    double slack = 0;           // grid slack allowed on top of tol
    bool accepted = true;
    std::string failure;
};

// d_C0(g o R_a, R_a o g).lower
double commutation_check(const MapExpr& g, const Rational& alpha, const GridSpec& grid);

// alpha + 1/(l q_next) with the smallest l >= 1 such that |delta| lip speed <= tol.  With
// `nested` the search continues to the first l for which the sum has denominator l q_next.
Rational ak_next_alpha(const Rational& alpha, std::int64_t q_next, double lip_bound, double tol,
                       bool nested = true, ManifoldKind m = ManifoldKind::Annulus);

// Stage failures stop the build; the partial list ends with the failed stage.
std::vector<AKApproximant> ak_build(const AKSchedule& schedule, const GridSpec& grid);

}  // namespace hofer
