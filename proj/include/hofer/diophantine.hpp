#pragma once

#include "hofer/continued_fraction.hpp"
#include "hofer/exact.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hofer {

// One coordinate of a torus vector: multiplier * x + offset (mod 1), where x is the
// value of a continued fraction.  A zero multiplier means the coordinate is rational.
class TorusComponent {
public:
    TorusComponent() = default;
    static TorusComponent rational(const Rational& v);
    static TorusComponent irrational(std::shared_ptr<const ContinuedFraction> cf);

    TorusComponent scaled(const BigInt& n) const;
    TorusComponent negated() const { return scaled(BigInt(-1)); }
    TorusComponent plus(const TorusComponent& other) const;

    bool is_rational() const { return multiplier_ == 0; }
    const Rational& offset() const { return offset_; }
    const BigInt& multiplier() const { return multiplier_; }
    const std::shared_ptr<const ContinuedFraction>& cf() const { return cf_; }

    // Interval for multiplier * x + offset (not reduced mod 1).
    RationalInterval bracket(unsigned bits) const;
    // Representative in [0, 1).
    double to_double() const;
    std::string describe() const;

private:
    Rational offset_{0};
    BigInt multiplier_{0};
    std::shared_ptr<const ContinuedFraction> cf_;
};

using TorusVector = std::vector<TorusComponent>;

TorusVector torus_vector(std::initializer_list<Rational> values);

// Enclosure of the circle norm ||v||.  When `symbolic`, the upper bound is only known
// as 2^-upper_neg_log2 (the quantity is too small to materialise).
struct TorusDistance {
    Rational lower{0};
    Rational upper{0};
    bool exact = false;
    bool positive = false;
    bool symbolic = false;
    std::int64_t upper_neg_log2 = 0;

    double approx() const;
    double log2_upper() const;
};

TorusDistance torus_norm(const TorusComponent& v);
TorusDistance torus_norm(const TorusVector& v);

// Coefficient schedule c_n = slope * n + intercept.
struct CSchedule {
    Rational slope{1};
    Rational intercept{0};
    std::string text = "c_n=n";

    static CSchedule parse(std::string_view text);
    Rational at(std::int64_t n) const { return slope * n + intercept; }
    bool unbounded() const { return slope > 0; }
};

struct WitnessEntry {
    BigInt k;
    TorusDistance dist;
    Rational bound_exponent;  // -c k; the witness satisfies dist < e^{bound_exponent}
    bool convergent = false;
};

struct LiouvilleCertificate {
    Rational c;
    BigInt k_max;
    BigInt full_scan_limit;
    std::vector<WitnessEntry> witnesses;
    std::vector<BigInt> undecided;
    bool scan_complete = true;
    std::string note;
};

LiouvilleCertificate exp_liouville_witnesses(const ContinuedFraction& alpha, const Rational& c,
                                             const BigInt& k_max, const BigInt& full_scan_limit = 1000);
// Simultaneous version for k >= 2 coordinates.  Only the full scan is available, so the
// certificate is labelled scan-complete up to min(k_max, full_scan_limit).
LiouvilleCertificate exp_liouville_witnesses(const TorusVector& alpha, const Rational& c,
                                             const BigInt& k_max, const BigInt& full_scan_limit = 1000);

// Re-checks every witness through the series enclosure of exp at doubled precision,
// independent of the power-of-two filters used by the scan.
bool verify_certificate(const LiouvilleCertificate& cert, const TorusComponent& alpha);

struct LiouvilleStage {
    std::int64_t n = 0;  // convergent index
    Rational c;
    BigInt q;            // q_n
    bool next_symbolic = false;
};

struct ConstructedLiouville {
    ContinuedFraction cf = ContinuedFraction::finite({BigInt(0)});
    CSchedule schedule;
    std::vector<LiouvilleStage> stages;
    std::int64_t requested_stages = 0;
    std::optional<std::string> infeasible;
    bool schedule_unbounded = false;
};

// Stage j (1-based) sets a_{n+1} = ceil(exp(c_n q_n)) at n = s + j - 1, where a_s is the
// last seed quotient.  A quotient wider than materialize_bits is kept as a lower bound on
// its logarithm; stages after it cannot be built and are reported as infeasible.
ConstructedLiouville construct_exp_liouville(const CSchedule& schedule, std::vector<BigInt> seed,
                                             std::int64_t stages, std::int64_t materialize_bits = 65536);

struct DensityResult {
    std::uint64_t count = 0;
    std::uint64_t n = 0;
    std::uint64_t resolved_exactly = 0;
    double density() const { return n ? static_cast<double>(count) / static_cast<double>(n) : 0.0; }
};

// #{1 <= j <= N : ||j alpha|| < eps} with every comparison decided exactly.
DensityResult equidistribution_density(const TorusVector& alpha, const Rational& eps, std::uint64_t N);

// Greedy Ostrowski digits of N over the convergent denominators of x.
std::vector<BigInt> ostrowski_digits(const ContinuedFraction& x, const BigInt& N);
// Upper bound on the star discrepancy: 3 * sum(digits) / N.
double ostrowski_discrepancy_bound(const ContinuedFraction& x, std::uint64_t N);

// Smallest-denominator rational within tol of every point of [x.lo, x.hi], if its
// denominator is at most q_max.
std::optional<Rational> is_rational_within(const RationalInterval& x, const BigInt& q_max, const Rational& tol);

}  // namespace hofer
