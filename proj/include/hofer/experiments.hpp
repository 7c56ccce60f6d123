#pragma once

#include "hofer/ak_forge.hpp"
#include "hofer/diophantine.hpp"
#include "hofer/norms.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace hofer {

// Portable uniform draws on top of mt19937_64 (the std distributions differ between
// standard libraries).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : g_(seed) {}
    double uniform() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }
    std::int64_t integer(std::int64_t lo, std::int64_t hi) {  // inclusive
        auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(g_() % span);
    }

private:
    std::mt19937_64 g_;
};

// ---- inequality harness ----

enum class HarnessFamily { Annulus, Plane };

struct HarnessConfig {
    HarnessFamily family = HarnessFamily::Annulus;
    int count = 200;
    std::uint64_t seed = 7;
    double c_min = 1e-4, c_max = 0.05;        // annulus: |action coefficient|
    double wave_share = 1.0;                  // annulus: wave osc <= share * |c|
    int max_frequency = 4;
    double conjugator_kappa = 0.5;            // annulus: optional conjugation strength
    bool conjugate = true;
    double osc_min = 1e-3, osc_max = 1e-1;    // plane: bump peak
    double hessian_target = 0.05;             // plane: radius chosen so sup |Hess| <= target
    double smallness_threshold = 0.1;
    IntegratorParams integrator{1e-2, 1e-12, 60, FlowMethod::Auto};
    GridSpec grid{{24, 24}, 1};
    GridSpec witness_budget{{8, 16}, 0};
};

struct HarnessSample {
    int index = 0;
    std::string description;
    double gamma_ub = 0;
    bool gamma_exact = false;
    HolderReport holder;
    bool sub_delta = false;
    double witness_radius = 0;
    bool witness_found = false;
    std::size_t witness_tried = 0;
};

struct HarnessReport {
    HarnessConfig config;
    InequalityConstants constants;
    double L = 1;
    std::vector<HarnessSample> samples;
    int violations = 0;
    int sub_delta = 0;
    int witnesses_found = 0;
    double min_slack = INFINITY;
    std::string note;
};

HarnessReport inequality_harness(const HarnessConfig& cfg, const InequalityConstants& k, double L);

// ---- rigidity ----

struct RigidityRow {
    BigInt n;
    TorusDistance torus_dist;
    double hofer_ub = 0;
    double hofer_ub_log2 = -INFINITY;
    NormEstimate c0;
    NormEstimate deriv;
    double holder_rhs = 0;
    double holder_rhs_log2 = -INFINITY;
    double envelope_log2 = 0;   // log2 of C e^{n (log deriv_1 - c)}
    bool premise = true;        // c > log deriv_1
    bool holder_ok = true;
    bool envelope_ok = true;
    std::optional<Rational> c_n;  // decay rate attached to this iterate (constructed schedules)
    std::optional<bool> chain_ok; // hofer_ub <= 2 k ||mu|| e^{-c_n n}, decided exactly
};

struct RigidityConfig {
    Manifold manifold = Manifold::annulus();
    MapExpr h;                      // conjugator; identity allowed
    TorusComponent alpha;
    std::vector<BigInt> iterates;
    std::vector<std::optional<Rational>> rates;  // parallel to iterates, may be empty
    double c = 1.0;
    double C = 1.0;
    GridSpec grid{{32, 32}, 1};
    std::vector<HamiltonianSpec> action;  // default action when empty
};

struct RigidityReport {
    NormEstimate deriv1;
    std::vector<RigidityRow> rows;
    bool c0_strictly_decreasing = true;
};

RigidityReport rigidity_scan(const RigidityConfig& cfg);

// Exact check of ||n alpha|| osc <= 2 k mu e^{-c n}.
bool exp_chain_holds(const TorusDistance& dist, double osc, double mu_sup, std::size_t k, const Rational& c,
                     const BigInt& n);

// ---- recurrence ----

struct RecurrenceSet {
    enum class Kind { Ball, LagrangianCircle } kind = Kind::Ball;
    double radius = 0.1;
    double level = 0.5;
    std::string describe() const;
};

struct RecurrenceReport {
    std::string alpha;
    std::string set;
    std::uint64_t N = 0;
    double e_lower = 0;
    double C2 = 0;          // 1 / (2 k ||mu||)
    double C1 = 2;          // measure normalisation of the eps-ball
    int d = 1;
    double threshold = 0;
    double density = 0;
    double bound = 0;
    double discrepancy = 0;
    double slack = 0;
    bool passed = true;
    DensityResult counts;
};

RecurrenceReport recurrence_experiment(const TorusVector& alpha, const RecurrenceSet& A, std::uint64_t N,
                                       const std::vector<HamiltonianSpec>& action, const Manifold& m);

// frac(sqrt(D)) for a random non-square D, as a periodic expansion.
TorusComponent random_quadratic(Rng& rng, std::int64_t d_max = 2000);

// ---- entropy ----

struct EntropyResult {
    double slope = 0;
    double bound = 0;
    std::vector<std::int64_t> n;
    std::vector<double> log_norm;
    bool stopped_early = false;
};

EntropyResult entropy_slope(const MapExpr& f, const Manifold& m, std::int64_t n_max, const GridSpec& grid);

// ---- Hofer convergence along rotation vectors ----

struct ConvergenceRow {
    std::size_t m = 0;
    std::int64_t j = 0;
    double diff = 0;    // |bound(j alpha_m) - bound(j alpha)| (upper estimate)
    double limit = 0;   // j ||alpha_m - alpha|| sum osc
    bool ok = true;
};

std::vector<ConvergenceRow> hofer_convergence_diagnostic(const std::vector<TorusVector>& seq,
                                                         const TorusVector& limit,
                                                         const std::vector<std::int64_t>& j_list,
                                                         const std::vector<HamiltonianSpec>& action,
                                                         const Manifold& m);

}  // namespace hofer
