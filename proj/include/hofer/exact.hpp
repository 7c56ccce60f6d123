#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace hofer {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

struct RationalInterval {
    Rational lo;
    Rational hi;
};

// Exact value of a finite double.
Rational rational_from_double(double x);

// Accepts "p/q", decimal literals ("-0.125", "1e-3") and integers.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& r);
double to_double(const Rational& r);
double to_double(const BigInt& n);

BigInt floor_of(const Rational& r);
BigInt ceil_of(const Rational& r);
Rational frac_of(const Rational& r);          // in [0, 1)
Rational circle_norm(const Rational& r);      // distance to the nearest integer

// Index of the highest set bit plus one; 0 for zero.
std::int64_t bit_length(const BigInt& n);

// log2(e) brackets, 16 significant digits each.
const Rational& log2e_lower();
const Rational& log2e_upper();

// Enclosure of e^x with relative width at most about 2^-rel_bits.
RationalInterval exp_enclosure(const Rational& x, unsigned rel_bits);

// Sign of (d - e^x), decided exactly. d must be positive unless x is 0.
int compare_with_exp(const Rational& d, const Rational& x);

// ceil(e^x) for x > 0.
BigInt ceil_exp(const Rational& x);

// Lower bound on log2(e^x) = x * log2(e), floored to an integer, for x >= 0.
std::int64_t floor_log2_exp_lower(const Rational& x);
// Upper bound ceil(x * log2 e) for x >= 0.
std::int64_t ceil_log2_exp_upper(const Rational& x);

// Natural log of a positive big integer to double precision, for reporting only.
double approx_log(const BigInt& n);

}  // namespace hofer
