#pragma once

#include "hofer/phase_space.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace hofer {

// C^2 plateau: 0 below k0, smootherstep up to 1 on [k1, k2], back down to 0 at k3.
struct PlateauProfile {
    std::array<double, 4> knots{0.0, 0.25, 0.75, 1.0};

    void validate() const;
    double value(double u) const;
    double d1(double u) const;
    double d2(double u) const;
    double sup_d1() const;  // 15/8 / narrowest ramp
    double sup_d2() const;  // (10 sqrt 3 / 3) / narrowest ramp^2
};

enum class TermKind { ActionLinear, SphereHeight, ConjugatorWave, PlaneBump, PlaneQuadratic, CutoffLinear };

// One autonomous Hamiltonian term.  Coordinates: annulus (theta, I), plane (x, y),
// sphere via the height z.  The momentum-like coordinate u is I, y or z.
//  ActionLinear    coef * u (annulus and plane)
//  SphereHeight    2 pi coef z; its time-1 flow is rotation by coef turns
//  ConjugatorWave  coef * A(I) sin(2 pi q theta + phase) / (2 pi q), A = plateau profile
//  PlaneBump       coef * (1 - |p - c|^2 / R^2)^4 inside the disc of radius R
//  PlaneQuadratic  coef * x * y
//  CutoffLinear    s * coef * (u - u0) * A(u) [* B(x) on the plane], s = 2 pi on the sphere
struct HamiltonianTerm {
    TermKind kind = TermKind::ActionLinear;
    double coef = 0;
    int frequency = 1;
    double phase = 0;
    PlateauProfile profile;
    std::optional<PlateauProfile> cross;
    Vec2 center{0, 0};
    double radius = 1;
    double u0 = 0;

    static HamiltonianTerm action(double c);
    static HamiltonianTerm sphere_height(double c);
    static HamiltonianTerm wave(double amplitude, int q, double phase, PlateauProfile a);
    static HamiltonianTerm bump(Vec2 center, double radius, double peak);
    static HamiltonianTerm quadratic(double c);
    static HamiltonianTerm cutoff_linear(double c, double u0, PlateauProfile a, std::optional<PlateauProfile> b = {});

    bool allowed_on(ManifoldKind m) const;
    std::string name() const;
};

// Value and coordinate derivatives on a flat manifold (first coordinate theta or x).
struct FlatJet {
    double h = 0, h1 = 0, h2 = 0, h11 = 0, h12 = 0, h22 = 0;
};

// Sphere terms depend on z only: value, d/dz, d2/dz2.
struct HeightJet {
    double h = 0, hz = 0, hzz = 0;
};

FlatJet flat_jet(const HamiltonianTerm& t, double x1, double x2);
HeightJet height_jet(const HamiltonianTerm& t, double z);

struct OscBounds {
    double lower = 0;
    double upper = 0;
    bool exact() const { return lower == upper; }
};

OscBounds term_oscillation(const HamiltonianTerm& t, const Manifold& m);
double term_sup_norm(const HamiltonianTerm& t, const Manifold& m);
// Upper bound on sup ||D X|| for the Hamiltonian vector field of the term.
double term_field_derivative_bound(const HamiltonianTerm& t, const Manifold& m);

struct Segment {
    double duration = 1.0;
    std::vector<HamiltonianTerm> terms;
};

// Piecewise-constant in time on [0, 1]; a single segment is autonomous.
struct HamiltonianSpec {
    ManifoldKind manifold = ManifoldKind::Annulus;
    std::vector<Segment> segments;

    static HamiltonianSpec autonomous(ManifoldKind m, std::vector<HamiltonianTerm> terms);
    void validate() const;
    bool is_autonomous() const { return segments.size() == 1; }
    bool is_zero() const;
};

FlatJet flat_jet(const std::vector<HamiltonianTerm>& terms, double x1, double x2);
HeightJet height_jet(const std::vector<HamiltonianTerm>& terms, double z);
double hamiltonian_value(const std::vector<HamiltonianTerm>& terms, const Point& p);

// osc of a single segment: exact for one term, otherwise [0 or better, sum of oscs].
OscBounds segment_oscillation(const Segment& s, const Manifold& m);
// Upper bound on the Hofer length of the time-1 flow: sum over segments of duration * osc.
double hofer_upper(const HamiltonianSpec& h, const Manifold& m);
// Operator norm of the (Riemannian) Hessian at p.
double hessian_norm(const std::vector<HamiltonianTerm>& terms, const Point& p);

}  // namespace hofer
