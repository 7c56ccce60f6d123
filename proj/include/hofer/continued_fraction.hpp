#pragma once

#include "hofer/exact.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hofer {

struct Convergent {
    BigInt p;
    BigInt q;
};

// Simple continued fraction [a0; a1, a2, ...].  Three shapes:
//  finite      the value is rational
//  periodic    quotients repeat after a pre-period (quadratic irrationals)
//  tail-bound  a known prefix followed by an unmaterialised quotient a_{N+1}
//              with a_{N+1} >= e^{tail_log}; the value is irrational
class ContinuedFraction {
public:
    static ContinuedFraction finite(std::vector<BigInt> quotients);
    static ContinuedFraction periodic(std::vector<BigInt> preperiod, std::vector<BigInt> period);
    static ContinuedFraction with_tail_bound(std::vector<BigInt> quotients, Rational tail_log);

    bool is_rational() const { return period_.empty() && !tail_log_; }
    bool has_tail_bound() const { return tail_log_.has_value(); }
    bool is_periodic() const { return !period_.empty(); }

    // Number of quotients that can be produced; SIZE_MAX for periodic expansions.
    std::size_t available() const;
    BigInt quotient(std::size_t i) const;

    const std::vector<BigInt>& prefix() const { return prefix_; }
    const std::vector<BigInt>& period() const { return period_; }
    const std::optional<Rational>& tail_log() const { return tail_log_; }

    // Convergents p_n/q_n for n = 0 .. count-1 (clipped to available()).
    std::vector<Convergent> convergents(std::size_t count) const;
    // Convergents with q_n <= q_max (all of them for finite expansions), at least one.
    std::vector<Convergent> convergents_up_to(const BigInt& q_max) const;

    // Exact value of a finite expansion.
    Rational value() const;

    // An interval containing the value, of width <= 2^-bits when the expansion allows it.
    RationalInterval bracket(unsigned bits) const;

    double to_double() const;
    std::string describe() const;

private:
    std::vector<BigInt> prefix_;
    std::vector<BigInt> period_;
    std::optional<Rational> tail_log_;
};

// Real quadratic irrational (P + sqrt(D)) / Q with D > 0 not a square.
struct QuadraticIrrational {
    BigInt P;
    BigInt D;
    BigInt Q;
};

ContinuedFraction cf_expand(const Rational& x, std::size_t depth = SIZE_MAX);
// Exact expansion with period detection.
ContinuedFraction cf_expand(const QuadraticIrrational& x);

ContinuedFraction golden_mean();    // (sqrt 5 - 1) / 2 = [0; 1, 1, 1, ...]
ContinuedFraction sqrt_two();       // [1; 2, 2, ...]

// Convergent law p_n q_{n-1} - p_{n-1} q_n = (-1)^{n-1}; true when it holds for all listed n >= 1.
bool convergent_law_holds(const std::vector<Convergent>& cs);

}  // namespace hofer
