#pragma once

#include "hofer/diophantine.hpp"
#include "hofer/hamiltonian.hpp"
#include "hofer/phase_space.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hofer {

enum class FlowMethod {
    Auto,      // closed form when every term depends on the momentum coordinate only
    Midpoint,  // always implicit midpoint
};

struct IntegratorParams {
    double step = 1e-3;
    double tolerance = 1e-12;
    int max_iterations = 60;
    FlowMethod method = FlowMethod::Auto;

    void validate() const;
};

// Immutable expression tree of symplectic maps.  Compose({f1, ..., fn}) is f1 o ... o fn,
// so fn is applied first.
class MapExpr {
public:
    enum class Kind { Identity, Rotation, Flow, Twist, Linear, Compose, Inverse, Iterate };

    struct Node {
        Kind kind = Kind::Identity;
        ManifoldKind manifold = ManifoldKind::Annulus;
        TorusVector alpha;
        HamiltonianSpec hamiltonian;
        double time = 1.0;
        IntegratorParams integrator;
        std::vector<double> coeffs;  // twist psi(u) = sum coeffs[k] u^k
        Mat2 matrix;
        std::vector<MapExpr> children;
        std::int64_t count = 0;
        double alpha_value = 0;  // alpha[0] as a double in [0, 1)
    };

    MapExpr() = default;

    static MapExpr identity(ManifoldKind m);
    // Annulus: theta -> theta + alpha.  Sphere: rotation by alpha turns about the z axis.
    static MapExpr rotation(ManifoldKind m, TorusVector alpha);
    static MapExpr rotation(ManifoldKind m, const Rational& alpha);
    static MapExpr flow(HamiltonianSpec h, double t = 1.0, IntegratorParams ip = {});
    static MapExpr twist(ManifoldKind m, std::vector<double> coeffs);
    static MapExpr shear(ManifoldKind m, double s) { return twist(m, {0.0, s}); }
    static MapExpr linear(Mat2 m);  // plane only, determinant 1
    static MapExpr compose(std::vector<MapExpr> maps);
    static MapExpr inverse(MapExpr f);
    static MapExpr iterate(MapExpr f, std::int64_t n);
    static MapExpr conjugate(MapExpr h, MapExpr inner) { return compose({inverse(h), std::move(inner), std::move(h)}); }

    Kind kind() const { return node_->kind; }
    ManifoldKind manifold() const { return node_->manifold; }
    const Node& node() const { return *node_; }
    bool valid() const { return static_cast<bool>(node_); }

    // Structural fingerprint; equal strings mean equal maps.
    std::string canonical() const;

private:
    explicit MapExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

struct PointJet {
    Point p;
    Mat3 J;  // ambient derivative; flat manifolds use the upper-left 2x2 block
};

Point evaluate(const MapExpr& f, const Point& p);
PointJet evaluate_jet(const MapExpr& f, const Point& p);
Mat2 jacobian(const MapExpr& f, const Point& p);

// Certified bound on the Lipschitz constant of f (and of f^-1), built structurally.
double lipschitz_bound(const MapExpr& f, const Manifold& m);

// Allowance for floating point and fixed-point error in evaluating f.
double numerical_noise(const MapExpr& f);

// f = h^-1 o R_beta o h (h may be the identity), recognised structurally.
struct ConjugatedRotation {
    std::optional<MapExpr> h;
    TorusComponent beta;
};
std::optional<ConjugatedRotation> as_conjugated_rotation(const MapExpr& f);

// Rotation speed: distance moved per unit of rotation parameter at the fastest point.
double rotation_speed(ManifoldKind m);

// Flow primitive, also used directly by tests.
PointJet integrate_flow(const HamiltonianSpec& h, double t, const IntegratorParams& ip, const Point& p,
                        bool want_jacobian);

}  // namespace hofer
