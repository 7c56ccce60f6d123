#include "hofer/exact.hpp"

#include <cmath>
#include <stdexcept>

namespace hofer {

namespace {

BigInt pow2(std::int64_t e) {
    BigInt r = 1;
    r <<= static_cast<unsigned>(e);
    return r;
}

// floor(a / b) for b > 0
BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b;
    if (a % b != 0 && a < 0) --q;
    return q;
}

}  // namespace

Rational rational_from_double(double x) {
    if (!std::isfinite(x)) throw std::domain_error("non-finite value has no exact rational form");
    if (x == 0.0) return Rational(0);
    int exp = 0;
    double m = std::frexp(x, &exp);  // x = m * 2^exp, 0.5 <= |m| < 1
    auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));
    exp -= 53;
    Rational r{BigInt(mant)};
    if (exp > 0) r *= Rational(pow2(exp));
    if (exp < 0) r /= Rational(pow2(-exp));
    return r;
}

Rational parse_rational(std::string_view text) {
    std::string s(text);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    std::size_t start = 0;
    while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
    s = s.substr(start);
    if (s.empty()) throw std::invalid_argument("empty rational literal");

    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Rational num = parse_rational(s.substr(0, slash));
        Rational den = parse_rational(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
        return num / den;
    }

    bool neg = false;
    std::size_t i = 0;
    if (s[i] == '+' || s[i] == '-') {
        neg = s[i] == '-';
        ++i;
    }
    BigInt digits = 0;
    std::int64_t scale = 0;
    bool seen_digit = false, seen_point = false;
    for (; i < s.size(); ++i) {
        char ch = s[i];
        if (ch >= '0' && ch <= '9') {
            digits = digits * 10 + (ch - '0');
            if (seen_point) --scale;
            seen_digit = true;
        } else if (ch == '.' && !seen_point) {
            seen_point = true;
        } else if (ch == 'e' || ch == 'E') {
            ++i;
            break;
        } else {
            throw std::invalid_argument("malformed rational literal '" + s + "'");
        }
    }
    if (!seen_digit) throw std::invalid_argument("malformed rational literal '" + s + "'");
    if (i <= s.size() && i > 0 && (s[i - 1] == 'e' || s[i - 1] == 'E')) {
        std::string ex = s.substr(i);
        if (ex.empty()) throw std::invalid_argument("malformed exponent in '" + s + "'");
        std::size_t used = 0;
        long e = std::stol(ex, &used);
        if (used != ex.size()) throw std::invalid_argument("malformed exponent in '" + s + "'");
        scale += e;
    }
    Rational r{digits};
    BigInt ten = 1;
    for (std::int64_t k = 0; k < (scale < 0 ? -scale : scale); ++k) ten *= 10;
    if (scale > 0) r *= Rational(ten);
    if (scale < 0) r /= Rational(ten);
    return neg ? Rational(-r) : r;
}

std::string to_string(const Rational& r) {
    BigInt n = numerator(r), d = denominator(r);
    if (d == 1) return n.str();
    return n.str() + "/" + d.str();
}

double to_double(const BigInt& n) {
    return n.convert_to<double>();
}

double to_double(const Rational& r) {
    // convert_to<double> on the rational is correctly rounded only for moderate sizes;
    // scale both parts so the quotient is formed from 64-bit heads.
    BigInt n = numerator(r), d = denominator(r);
    if (n == 0) return 0.0;
    bool neg = n < 0;
    if (neg) n = -n;
    std::int64_t shift = bit_length(n) - bit_length(d);
    // q = n / d * 2^-shift is in [0.5, 2)
    BigInt scaled_n = n, scaled_d = d;
    if (shift > 0) scaled_d <<= static_cast<unsigned>(shift);
    else if (shift < 0) scaled_n <<= static_cast<unsigned>(-shift);
    BigInt q = (scaled_n << 64) / scaled_d;  // ~65 significant bits
    double head = std::ldexp(q.convert_to<double>(), -64);
    double v = std::ldexp(head, static_cast<int>(std::max<std::int64_t>(std::min<std::int64_t>(shift, 4000), -4000)));
    return neg ? -v : v;
}

BigInt floor_of(const Rational& r) {
    return floor_div(numerator(r), denominator(r));
}

BigInt ceil_of(const Rational& r) {
    return -floor_div(-numerator(r), denominator(r));
}

Rational frac_of(const Rational& r) {
    return r - Rational(floor_of(r));
}

Rational circle_norm(const Rational& r) {
    Rational f = frac_of(r);
    Rational g = Rational(1) - f;
    return f < g ? f : g;
}

std::int64_t bit_length(const BigInt& n) {
    if (n == 0) return 0;
    BigInt a = n < 0 ? BigInt(-n) : n;
    return static_cast<std::int64_t>(boost::multiprecision::msb(a)) + 1;
}

const Rational& log2e_lower() {
    static const Rational v(BigInt("14426950408889634"), BigInt("10000000000000000"));
    return v;
}

const Rational& log2e_upper() {
    static const Rational v(BigInt("14426950408889635"), BigInt("10000000000000000"));
    return v;
}

namespace {

// e^x for x >= 0 in fixed point with P fractional bits: returns [lo, hi] scaled by 2^P.
std::pair<BigInt, BigInt> exp_fixed_nonneg(const Rational& x, std::int64_t P) {
    // halve until x / 2^s <= 1/2
    std::int64_t s = 0;
    Rational y = x;
    while (y > Rational(1, 2)) {
        y /= 2;
        ++s;
    }
    const BigInt one = pow2(P);
    BigInt y_num = numerator(y) << static_cast<unsigned>(P);
    BigInt y_den = denominator(y);
    BigInt y_lo = y_num / y_den;
    BigInt y_hi = y_lo + ((y_num % y_den) != 0 ? 1 : 0);

    BigInt sum_lo = one, sum_hi = one;
    BigInt t_lo = one, t_hi = one;
    for (unsigned k = 1;; ++k) {
        t_lo = (t_lo * y_lo >> static_cast<unsigned>(P)) / k;
        BigInt prod = t_hi * y_hi;
        BigInt shifted = prod >> static_cast<unsigned>(P);
        if ((shifted << static_cast<unsigned>(P)) != prod) shifted += 1;
        t_hi = shifted / k + ((shifted % k) != 0 ? 1 : 0);
        sum_lo += t_lo;
        sum_hi += t_hi;
        if (t_hi == 0 || (k > 4 && t_hi < 2)) {
            // tail after term k is at most t_hi * (y/(k+1)) / (1 - y/(k+1)) <= t_hi
            sum_hi += t_hi + k + 2;
            break;
        }
    }
    for (std::int64_t i = 0; i < s; ++i) {
        sum_lo = (sum_lo * sum_lo) >> static_cast<unsigned>(P);
        BigInt sq = sum_hi * sum_hi;
        BigInt shifted = sq >> static_cast<unsigned>(P);
        if ((shifted << static_cast<unsigned>(P)) != sq) shifted += 1;
        sum_hi = shifted;
    }
    return {sum_lo, sum_hi};
}

}  // namespace

RationalInterval exp_enclosure(const Rational& x, unsigned rel_bits) {
    if (x == 0) return {Rational(1), Rational(1)};
    Rational ax = x < 0 ? Rational(-x) : x;
    std::int64_t s = 0;
    {
        Rational y = ax;
        while (y > Rational(1, 2)) {
            y /= 2;
            ++s;
        }
    }
    std::int64_t P = static_cast<std::int64_t>(rel_bits) + 2 * s + 32;
    auto [lo, hi] = exp_fixed_nonneg(ax, P);
    Rational scale(pow2(P));
    if (x > 0) return {Rational(lo) / scale, Rational(hi) / scale};
    return {scale / Rational(hi), scale / Rational(lo)};
}

int compare_with_exp(const Rational& d, const Rational& x) {
    if (x == 0) return d < 1 ? -1 : (d > 1 ? 1 : 0);
    if (d <= 0) return -1;
    for (unsigned bits = 64; bits <= (1u << 22); bits *= 2) {
        auto iv = exp_enclosure(x, bits);
        if (d < iv.lo) return -1;
        if (d > iv.hi) return 1;
    }
    throw std::runtime_error("compare_with_exp: precision budget exhausted");
}

BigInt ceil_exp(const Rational& x) {
    if (x <= 0) throw std::domain_error("ceil_exp expects a positive exponent");
    std::int64_t mag = ceil_log2_exp_upper(x);
    for (unsigned extra = 64; extra <= (1u << 22); extra *= 2) {
        auto iv = exp_enclosure(x, static_cast<unsigned>(mag) + extra);
        BigInt a = floor_of(iv.lo), b = floor_of(iv.hi);
        if (a == b) return a + 1;  // e^x is never an integer here
    }
    throw std::runtime_error("ceil_exp: precision budget exhausted");
}

std::int64_t floor_log2_exp_lower(const Rational& x) {
    if (x < 0) throw std::domain_error("floor_log2_exp_lower expects x >= 0");
    BigInt f = floor_of(x * log2e_lower());
    return f.convert_to<std::int64_t>();
}

std::int64_t ceil_log2_exp_upper(const Rational& x) {
    if (x < 0) throw std::domain_error("ceil_log2_exp_upper expects x >= 0");
    BigInt c = ceil_of(x * log2e_upper());
    return c.convert_to<std::int64_t>();
}

double approx_log(const BigInt& n) {
    if (n <= 0) throw std::domain_error("approx_log of a non-positive integer");
    std::int64_t bl = bit_length(n);
    if (bl <= 1000) return std::log(n.convert_to<double>());
    BigInt head = n >> static_cast<unsigned>(bl - 64);
    return std::log(head.convert_to<double>()) + static_cast<double>(bl - 64) * std::log(2.0);
}

}  // namespace hofer
