#include "hofer/continued_fraction.hpp"

#include <boost/multiprecision/integer.hpp>

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace hofer {

ContinuedFraction ContinuedFraction::finite(std::vector<BigInt> quotients) {
    if (quotients.empty()) throw std::invalid_argument("continued fraction needs at least a0");
    for (std::size_t i = 1; i < quotients.size(); ++i)
        if (quotients[i] < 1) throw std::invalid_argument("partial quotients beyond a0 must be >= 1");
    ContinuedFraction cf;
    cf.prefix_ = std::move(quotients);
    return cf;
}

ContinuedFraction ContinuedFraction::periodic(std::vector<BigInt> preperiod, std::vector<BigInt> period) {
    if (period.empty()) return finite(std::move(preperiod));
    if (preperiod.empty()) throw std::invalid_argument("periodic expansion needs a0 in the pre-period");
    for (std::size_t i = 1; i < preperiod.size(); ++i)
        if (preperiod[i] < 1) throw std::invalid_argument("partial quotients beyond a0 must be >= 1");
    for (const auto& a : period)
        if (a < 1) throw std::invalid_argument("periodic quotients must be >= 1");
    ContinuedFraction cf;
    cf.prefix_ = std::move(preperiod);
    cf.period_ = std::move(period);
    return cf;
}

ContinuedFraction ContinuedFraction::with_tail_bound(std::vector<BigInt> quotients, Rational tail_log) {
    ContinuedFraction cf = finite(std::move(quotients));
    if (tail_log < 0) tail_log = 0;
    cf.tail_log_ = tail_log;
    return cf;
}

std::size_t ContinuedFraction::available() const {
    return period_.empty() ? prefix_.size() : SIZE_MAX;
}

BigInt ContinuedFraction::quotient(std::size_t i) const {
    if (i < prefix_.size()) return prefix_[i];
    if (period_.empty()) throw std::out_of_range("partial quotient index beyond the known expansion");
    return period_[(i - prefix_.size()) % period_.size()];
}

std::vector<Convergent> ContinuedFraction::convergents(std::size_t count) const {
    count = std::min(count, available());
    std::vector<Convergent> out;
    out.reserve(count);
    BigInt pm2 = 0, pm1 = 1, qm2 = 1, qm1 = 0;
    for (std::size_t n = 0; n < count; ++n) {
        BigInt a = quotient(n);
        BigInt p = a * pm1 + pm2, q = a * qm1 + qm2;
        out.push_back({p, q});
        pm2 = pm1;
        pm1 = p;
        qm2 = qm1;
        qm1 = q;
    }
    return out;
}

std::vector<Convergent> ContinuedFraction::convergents_up_to(const BigInt& q_max) const {
    std::vector<Convergent> out;
    BigInt pm2 = 0, pm1 = 1, qm2 = 1, qm1 = 0;
    for (std::size_t n = 0; n < available(); ++n) {
        BigInt a = quotient(n);
        BigInt p = a * pm1 + pm2, q = a * qm1 + qm2;
        if (!out.empty() && q > q_max) break;
        out.push_back({p, q});
        pm2 = pm1;
        pm1 = p;
        qm2 = qm1;
        qm1 = q;
    }
    return out;
}

Rational ContinuedFraction::value() const {
    if (!is_rational()) throw std::domain_error("value() of an irrational expansion");
    auto cs = convergents(prefix_.size());
    return Rational(cs.back().p, cs.back().q);
}

RationalInterval ContinuedFraction::bracket(unsigned bits) const {
    if (is_rational()) {
        Rational v = value();
        return {v, v};
    }
    BigInt target = 1;
    target <<= bits;
    if (is_periodic()) {
        // value lies strictly between consecutive convergents
        BigInt p_prev = 0, q_prev = 1, p = 1, q = 0;
        for (std::size_t n = 0;; ++n) {
            BigInt a = quotient(n);
            BigInt pn = a * p + p_prev, qn = a * q + q_prev;
            p_prev = p;
            q_prev = q;
            p = pn;
            q = qn;
            if (n >= 1 && q * q_prev >= target) break;
        }
        Rational x(p, q), y(p_prev, q_prev);
        return x < y ? RationalInterval{x, y} : RationalInterval{y, x};
    }
    // tail bound: value = (p_N t + p_{N-1}) / (q_N t + q_{N-1}) with t >= A >= 1
    auto cs = convergents(prefix_.size());
    const Convergent& last = cs.back();
    BigInt pm = cs.size() >= 2 ? cs[cs.size() - 2].p : BigInt(1);
    BigInt qm = cs.size() >= 2 ? cs[cs.size() - 2].q : BigInt(0);
    std::int64_t a_bits = floor_log2_exp_lower(*tail_log_);
    std::int64_t want = static_cast<std::int64_t>(bits) + 2;
    if (a_bits > want) a_bits = want;
    if (a_bits < 0) a_bits = 0;
    BigInt A = 1;
    A <<= static_cast<unsigned>(a_bits);
    Rational x(last.p, last.q), y(A * last.p + pm, A * last.q + qm);
    return x < y ? RationalInterval{x, y} : RationalInterval{y, x};
}

double ContinuedFraction::to_double() const {
    auto b = bracket(80);
    return hofer::to_double((b.lo + b.hi) / 2);
}

std::string ContinuedFraction::describe() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < prefix_.size(); ++i) {
        if (i == 1) os << "; ";
        else if (i > 1) os << ", ";
        os << prefix_[i];
    }
    if (!period_.empty()) {
        os << (prefix_.size() == 1 ? "; " : ", ") << "(";
        for (std::size_t i = 0; i < period_.size(); ++i) os << (i ? ", " : "") << period_[i];
        os << ")*";
    }
    if (tail_log_) os << ", a >= exp(" << to_string(*tail_log_) << "), ...";
    os << "]";
    return os.str();
}

ContinuedFraction cf_expand(const Rational& x, std::size_t depth) {
    std::vector<BigInt> qs;
    BigInt n = numerator(x), d = denominator(x);
    while (qs.size() < depth) {
        BigInt a = floor_of(Rational(n, d));
        qs.push_back(a);
        BigInt r = n - a * d;
        if (r == 0) break;
        n = d;
        d = r;
    }
    // canonical form: last quotient > 1 unless it is a0
    if (qs.size() >= 2 && qs.back() == 1 && depth == SIZE_MAX) {
        qs.pop_back();
        qs.back() += 1;
    }
    return ContinuedFraction::finite(std::move(qs));
}

ContinuedFraction cf_expand(const QuadraticIrrational& x) {
    BigInt P = x.P, D = x.D, Q = x.Q;
    if (D <= 0) throw std::domain_error("quadratic irrational needs D > 0");
    if (Q == 0) throw std::domain_error("quadratic irrational needs Q != 0");
    BigInt s = boost::multiprecision::sqrt(D);
    if (s * s == D) throw std::domain_error("D is a perfect square; the value is rational");
    // make Q divide D - P^2
    if ((D - P * P) % Q != 0) {
        BigInt aq = Q < 0 ? BigInt(-Q) : Q;
        P *= aq;
        D *= aq * aq;
        Q *= aq;
        s = boost::multiprecision::sqrt(D);
    }
    std::vector<BigInt> qs;
    std::vector<std::pair<BigInt, BigInt>> states;
    for (std::size_t guard = 0; guard < 1000000; ++guard) {
        for (std::size_t i = 0; i < states.size(); ++i) {
            if (states[i].first == P && states[i].second == Q) {
                std::vector<BigInt> pre(qs.begin(), qs.begin() + static_cast<std::ptrdiff_t>(i));
                std::vector<BigInt> per(qs.begin() + static_cast<std::ptrdiff_t>(i), qs.end());
                if (pre.empty()) {
                    // a0 must sit in the pre-period
                    pre.push_back(per.front());
                    std::rotate(per.begin(), per.begin() + 1, per.end());
                }
                return ContinuedFraction::periodic(std::move(pre), std::move(per));
            }
        }
        states.emplace_back(P, Q);
        // a = floor((P + sqrt D) / Q), sqrt D irrational
        BigInt num = Q > 0 ? BigInt(P + s) : BigInt(P + s + 1);
        BigInt a = floor_of(Rational(num, Q));
        qs.push_back(a);
        P = a * Q - P;
        Q = (D - P * P) / Q;
    }
    throw std::runtime_error("period detection did not terminate");
}

ContinuedFraction golden_mean() {
    return cf_expand(QuadraticIrrational{BigInt(-1), BigInt(5), BigInt(2)});
}

ContinuedFraction sqrt_two() {
    return cf_expand(QuadraticIrrational{BigInt(0), BigInt(2), BigInt(1)});
}

bool convergent_law_holds(const std::vector<Convergent>& cs) {
    for (std::size_t n = 1; n < cs.size(); ++n) {
        BigInt lhs = cs[n].p * cs[n - 1].q - cs[n - 1].p * cs[n].q;
        BigInt rhs = (n % 2 == 1) ? BigInt(1) : BigInt(-1);
        if (lhs != rhs) return false;
    }
    return true;
}

}  // namespace hofer
