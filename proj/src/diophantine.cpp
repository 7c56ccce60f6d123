#include "hofer/diophantine.hpp"

#include "hofer/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hofer {

namespace {

BigInt abs_big(const BigInt& x) { return x < 0 ? BigInt(-x) : x; }

Rational pow2_rational(std::int64_t e) {
    BigInt p = 1;
    p <<= static_cast<unsigned>(e < 0 ? -e : e);
    return e >= 0 ? Rational(p) : Rational(BigInt(1), p);
}

// Enclosure of ||v|| for v in [lo, hi].
RationalInterval norm_over(const Rational& lo, const Rational& hi) {
    BigInt n = floor_of(lo);
    Rational fl = lo - Rational(n), fh = hi - Rational(n);
    auto tent = [](const Rational& f) {
        Rational g = Rational(1) - f;
        return f < g ? f : g;
    };
    if (fh >= 1) {
        Rational a = circle_norm(lo), b = circle_norm(hi);
        Rational up = a < b ? b : a;
        if (hi - lo >= Rational(1, 2)) up = Rational(1, 2);
        return {Rational(0), up};
    }
    Rational a = tent(fl), b = tent(fh);
    Rational low = a < b ? a : b;
    Rational up = a < b ? b : a;
    if (fl <= Rational(1, 2) && fh >= Rational(1, 2)) up = Rational(1, 2);
    return {low, up};
}

double log2_of(const Rational& r) {
    if (r <= 0) return -INFINITY;
    return (approx_log(numerator(r)) - approx_log(denominator(r))) / std::log(2.0);
}

// symbolic path: multiplier is a multiple of the last materialised q_N and the next
// quotient is only known through its logarithm
std::optional<TorusDistance> symbolic_norm(const TorusComponent& v) {
    const auto& cf = v.cf();
    if (!cf || !cf->has_tail_bound() || v.offset() != 0) return std::nullopt;
    std::int64_t tail_bits = floor_log2_exp_lower(*cf->tail_log());
    if (tail_bits <= 4096) return std::nullopt;
    auto cs = cf->convergents(cf->prefix().size());
    const BigInt& qN = cs.back().q;
    BigInt m = abs_big(v.multiplier());
    if (m % qN != 0) return std::nullopt;
    BigInt mult = m / qN;
    TorusDistance d;
    d.symbolic = true;
    d.positive = true;
    // ||m q_N x|| <= mult / q_{N+1} < mult * 2^-(tail_bits + bitlen(q_N) - 1)
    d.upper_neg_log2 = tail_bits + bit_length(qN) - 1 - bit_length(mult);
    return d;
}

enum class Verdict { Witness, NotWitness, Undecided };

Verdict decide(const TorusDistance& d, const Rational& c, const BigInt& k) {
    if (!d.positive) return d.exact ? Verdict::NotWitness : Verdict::Undecided;
    Rational x = c * Rational(k);
    if (x == 0) return Verdict::Witness;  // ||kx|| <= 1/2 < 1
    std::int64_t G = ceil_log2_exp_upper(x);
    if (d.symbolic) return d.upper_neg_log2 >= G ? Verdict::Witness : Verdict::Undecided;
    if (d.upper < pow2_rational(-G) || d.upper == pow2_rational(-G)) return Verdict::Witness;
    std::int64_t F = floor_log2_exp_lower(x);
    if (d.lower >= pow2_rational(-F)) return Verdict::NotWitness;
    if (compare_with_exp(d.upper, -x) < 0) return Verdict::Witness;
    if (d.lower > 0 && compare_with_exp(d.lower, -x) >= 0) return Verdict::NotWitness;
    return Verdict::Undecided;
}

TorusDistance combine_max(const std::vector<TorusDistance>& ds) {
    TorusDistance out;
    out.exact = true;
    out.positive = false;
    bool have_sym = false;
    std::int64_t sym_D = 0;
    bool have_plain = false;
    for (const auto& d : ds) {
        out.exact = out.exact && d.exact;
        out.positive = out.positive || d.positive;
        if (d.lower > out.lower) out.lower = d.lower;
        if (d.symbolic) {
            sym_D = have_sym ? std::min(sym_D, d.upper_neg_log2) : d.upper_neg_log2;
            have_sym = true;
        } else {
            if (!have_plain || d.upper > out.upper) out.upper = d.upper;
            have_plain = true;
        }
    }
    if (have_sym) {
        bool plain_dominates = have_plain && out.upper > 0 && log2_of(out.upper) - 2.0 > -static_cast<double>(sym_D);
        if (!plain_dominates) {
            if (have_plain && sym_D < (1 << 20)) {
                Rational s = pow2_rational(-sym_D);
                if (s > out.upper) out.upper = s;
            } else {
                out.symbolic = true;
                out.upper_neg_log2 = sym_D;
            }
        }
    }
    return out;
}

}  // namespace

TorusComponent TorusComponent::rational(const Rational& v) {
    TorusComponent c;
    c.offset_ = frac_of(v);
    return c;
}

TorusComponent TorusComponent::irrational(std::shared_ptr<const ContinuedFraction> cf) {
    if (!cf) throw std::invalid_argument("null continued fraction");
    if (cf->is_rational()) return rational(cf->value());
    TorusComponent c;
    c.multiplier_ = 1;
    c.cf_ = std::move(cf);
    return c;
}

TorusComponent TorusComponent::scaled(const BigInt& n) const {
    TorusComponent c = *this;
    c.multiplier_ *= n;
    c.offset_ = frac_of(c.offset_ * Rational(n));
    if (c.multiplier_ == 0) c.cf_.reset();
    return c;
}

TorusComponent TorusComponent::plus(const TorusComponent& other) const {
    if (!is_rational() && !other.is_rational() && cf_ != other.cf_)
        throw std::domain_error("cannot add torus coordinates built on different irrationals");
    TorusComponent c = is_rational() ? other : *this;
    c.multiplier_ = multiplier_ + other.multiplier_;
    c.offset_ = frac_of(offset_ + other.offset_);
    if (c.multiplier_ == 0) c.cf_.reset();
    return c;
}

RationalInterval TorusComponent::bracket(unsigned bits) const {
    if (is_rational()) return {offset_, offset_};
    unsigned extra = static_cast<unsigned>(bit_length(multiplier_)) + 2;
    auto b = cf_->bracket(bits + extra);
    Rational x = Rational(multiplier_) * b.lo + offset_;
    Rational y = Rational(multiplier_) * b.hi + offset_;
    return x < y ? RationalInterval{x, y} : RationalInterval{y, x};
}

double TorusComponent::to_double() const {
    auto b = bracket(64);
    Rational mid = frac_of((b.lo + b.hi) / 2);
    double v = hofer::to_double(mid);
    if (v >= 1.0) v = 0.0;
    return v;
}

std::string TorusComponent::describe() const {
    if (is_rational()) return to_string(offset_);
    std::ostringstream os;
    os << multiplier_.str() << "*" << cf_->describe();
    if (offset_ != 0) os << "+" << to_string(offset_);
    return os.str();
}

TorusVector torus_vector(std::initializer_list<Rational> values) {
    TorusVector v;
    for (const auto& r : values) v.push_back(TorusComponent::rational(r));
    return v;
}

double TorusDistance::approx() const {
    if (symbolic) return std::ldexp(1.0, static_cast<int>(-std::min<std::int64_t>(upper_neg_log2, 1 << 20)));
    if (exact) return to_double(upper);
    return to_double((lower + upper) / 2);
}

double TorusDistance::log2_upper() const {
    if (symbolic) return -static_cast<double>(upper_neg_log2);
    return log2_of(upper);
}

TorusDistance torus_norm(const TorusComponent& v) {
    TorusDistance d;
    if (v.is_rational()) {
        d.lower = d.upper = circle_norm(v.offset());
        d.exact = true;
        d.positive = d.lower > 0;
        return d;
    }
    if (auto s = symbolic_norm(v)) return *s;
    d.positive = true;  // m x + r is never an integer for irrational x and m != 0
    for (unsigned bits = 64; bits <= (1u << 16); bits *= 2) {
        auto b = v.bracket(bits);
        auto n = norm_over(b.lo, b.hi);
        d.lower = n.lo;
        d.upper = n.hi;
        if (n.lo > 0 && (n.hi - n.lo) * pow2_rational(48) <= n.hi) break;
    }
    return d;
}

TorusDistance torus_norm(const TorusVector& v) {
    if (v.empty()) throw std::invalid_argument("empty torus vector");
    std::vector<TorusDistance> ds;
    for (const auto& c : v) ds.push_back(torus_norm(c));
    return combine_max(ds);
}

CSchedule CSchedule::parse(std::string_view text) {
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    CSchedule out;
    out.text = s;
    std::string body = s;
    if (body.rfind("c_n=", 0) == 0) body = body.substr(4);
    static const std::regex linear(R"(^(?:([-+0-9./eE]+)\*?)?n(?:([-+][0-9./eE]+))?$)");
    std::smatch m;
    if (std::regex_match(body, m, linear)) {
        out.slope = m[1].matched ? parse_rational(m[1].str()) : Rational(1);
        out.intercept = m[2].matched ? parse_rational(m[2].str()) : Rational(0);
    } else {
        try {
            out.slope = 0;
            out.intercept = parse_rational(body);
        } catch (const std::exception&) {
            throw std::invalid_argument("unrecognised c_n schedule '" + std::string(text) + "'");
        }
    }
    return out;
}

LiouvilleCertificate exp_liouville_witnesses(const ContinuedFraction& alpha, const Rational& c,
                                             const BigInt& k_max, const BigInt& full_scan_limit) {
    if (c < 0) throw std::domain_error("witness exponent c must be non-negative");
    if (k_max < 1) throw std::domain_error("k_max must be at least 1");
    LiouvilleCertificate cert;
    cert.c = c;
    cert.k_max = k_max;
    cert.full_scan_limit = full_scan_limit;
    auto cfp = std::make_shared<const ContinuedFraction>(alpha);
    TorusComponent base = TorusComponent::irrational(cfp);

    std::set<BigInt> found;
    std::vector<WitnessEntry> scan_hits;
    BigInt K = std::min(k_max, full_scan_limit);
    unsigned bits = static_cast<unsigned>(2 * bit_length(K) + 96);
    auto br = base.bracket(bits);
    for (BigInt k = 1; k <= K; ++k) {
        TorusDistance d;
        if (base.is_rational()) {
            d = torus_norm(base.scaled(k));
        } else {
            auto n = norm_over(Rational(k) * br.lo, Rational(k) * br.hi);
            d.lower = n.lo;
            d.upper = n.hi;
            d.positive = true;
        }
        Verdict v = decide(d, c, k);
        if (v == Verdict::Undecided && !base.is_rational()) {
            d = torus_norm(base.scaled(k));
            v = decide(d, c, k);
        }
        if (v == Verdict::Witness) {
            scan_hits.push_back({k, d, -c * Rational(k), false});
            found.insert(k);
        } else if (v == Verdict::Undecided) {
            cert.undecided.push_back(k);
        }
    }

    std::vector<WitnessEntry> conv_hits;
    auto cs = alpha.convergents_up_to(k_max);
    for (const auto& cv : cs) {
        if (cv.q < 1) continue;
        TorusDistance d = torus_norm(base.scaled(cv.q));
        Verdict v = decide(d, c, cv.q);
        if (v == Verdict::Witness) {
            conv_hits.push_back({cv.q, d, -c * Rational(cv.q), true});
        } else if (v == Verdict::Undecided && cv.q > K) {
            cert.undecided.push_back(cv.q);
        }
    }

    // best approximation: every scanned witness k has a convergent witness q <= k
    for (const auto& w : scan_hits) {
        bool ok = std::any_of(conv_hits.begin(), conv_hits.end(), [&](const WitnessEntry& e) { return e.k <= w.k; });
        if (!ok) throw std::logic_error("witness scan disagrees with the best-approximation property");
    }

    std::set<BigInt> seen;
    for (auto& w : conv_hits) {
        seen.insert(w.k);
        cert.witnesses.push_back(w);
    }
    for (auto& w : scan_hits)
        if (!seen.count(w.k)) cert.witnesses.push_back(w);
    std::sort(cert.witnesses.begin(), cert.witnesses.end(),
              [](const WitnessEntry& a, const WitnessEntry& b) { return a.k < b.k; });

    // the convergent list must reach past k_max for the scan to be complete
    if (!alpha.is_rational() && alpha.has_tail_bound()) {
        auto all = alpha.convergents(alpha.prefix().size());
        const BigInt& qN = all.back().q;
        if (qN <= k_max) {
            std::int64_t lower_bits = floor_log2_exp_lower(*alpha.tail_log()) + bit_length(qN) - 1;
            if (lower_bits < bit_length(k_max)) {
                cert.scan_complete = false;
                cert.note = "expansion not materialised far enough to cover k_max";
            }
        }
    }
    if (!cert.undecided.empty()) cert.scan_complete = false;
    if (cert.note.empty())
        cert.note = "full scan to " + K.str() + ", convergent denominators to " + k_max.str();
    return cert;
}

LiouvilleCertificate exp_liouville_witnesses(const TorusVector& alpha, const Rational& c,
                                             const BigInt& k_max, const BigInt& full_scan_limit) {
    if (alpha.size() == 1 && alpha[0].multiplier() == 1 && alpha[0].offset() == 0)
        return exp_liouville_witnesses(*alpha[0].cf(), c, k_max, full_scan_limit);
    if (alpha.size() == 1 && alpha[0].is_rational())
        return exp_liouville_witnesses(cf_expand(alpha[0].offset()), c, k_max, full_scan_limit);
    LiouvilleCertificate cert;
    cert.c = c;
    cert.k_max = k_max;
    cert.full_scan_limit = full_scan_limit;
    BigInt K = std::min(k_max, full_scan_limit);
    for (BigInt k = 1; k <= K; ++k) {
        TorusVector scaled;
        for (const auto& comp : alpha) scaled.push_back(comp.scaled(k));
        TorusDistance d = torus_norm(scaled);
        Verdict v = decide(d, c, k);
        if (v == Verdict::Witness) cert.witnesses.push_back({k, d, -c * Rational(k), false});
        else if (v == Verdict::Undecided) cert.undecided.push_back(k);
    }
    cert.scan_complete = cert.undecided.empty() && K == k_max;
    cert.note = "scan-complete to " + K.str() + "; no best-approximation reduction for simultaneous approximation";
    return cert;
}

bool verify_certificate(const LiouvilleCertificate& cert, const TorusComponent& alpha) {
    // 30-digit brackets of log2(e), independent of the 16-digit filters
    static const Rational l2_hi(BigInt("1442695040888963407359924681002"), BigInt("1000000000000000000000000000000"));
    for (const auto& w : cert.witnesses) {
        TorusDistance d = torus_norm(alpha.scaled(w.k));
        if (!d.positive) return false;
        Rational x = cert.c * Rational(w.k);
        if (d.symbolic) {
            BigInt need = ceil_of(x * l2_hi);
            if (BigInt(d.upper_neg_log2) < need) return false;
            continue;
        }
        if (x == 0) {
            if (!(d.upper < 1)) return false;
            continue;
        }
        auto e = exp_enclosure(-x, 2 * static_cast<unsigned>(std::max<std::int64_t>(64, bit_length(numerator(d.upper)))));
        if (!(d.upper < e.lo)) {
            if (compare_with_exp(d.upper, -x) >= 0) return false;
        }
    }
    return true;
}

ConstructedLiouville construct_exp_liouville(const CSchedule& schedule, std::vector<BigInt> seed,
                                             std::int64_t stages, std::int64_t materialize_bits) {
    if (seed.empty()) throw std::invalid_argument("seed needs at least a0");
    if (stages < 0) throw std::invalid_argument("stage count must be non-negative");
    for (std::size_t i = 1; i < seed.size(); ++i)
        if (seed[i] < 1) throw std::invalid_argument("seed quotients beyond a0 must be >= 1");
    ConstructedLiouville out;
    out.schedule = schedule;
    out.requested_stages = stages;
    out.schedule_unbounded = schedule.unbounded();
    std::vector<BigInt> qs = std::move(seed);
    std::int64_t s = static_cast<std::int64_t>(qs.size()) - 1;
    std::optional<Rational> symbolic_tail;
    for (std::int64_t j = 1; j <= stages; ++j) {
        std::int64_t n = s + j - 1;
        if (symbolic_tail) {
            std::ostringstream os;
            os << "stage " << j << " needs q_" << n << ", which depends on a partial quotient of about "
               << ceil_log2_exp_upper(*symbolic_tail) << " bits";
            out.infeasible = os.str();
            break;
        }
        auto cs = ContinuedFraction::finite(qs).convergents(static_cast<std::size_t>(n) + 1);
        const BigInt& qn = cs.back().q;
        Rational c = schedule.at(n);
        if (c < 0) throw std::domain_error("schedule produced a negative c_n");
        Rational x = c * Rational(qn);
        LiouvilleStage st{n, c, qn, false};
        if (x == 0) {
            qs.push_back(1);
        } else if (ceil_log2_exp_upper(x) > materialize_bits) {
            symbolic_tail = x;
            st.next_symbolic = true;
        } else {
            qs.push_back(ceil_exp(x));
        }
        out.stages.push_back(st);
    }
    if (!symbolic_tail) {
        // the rule keeps going: a_{N+1} = ceil(exp(c_N q_N)) >= exp(c_N q_N)
        std::int64_t N = static_cast<std::int64_t>(qs.size()) - 1;
        auto cs = ContinuedFraction::finite(qs).convergents(qs.size());
        Rational t = schedule.at(N) * Rational(cs.back().q);
        symbolic_tail = t < 0 ? Rational(0) : t;
    }
    out.cf = ContinuedFraction::with_tail_bound(qs, *symbolic_tail);
    return out;
}

DensityResult equidistribution_density(const TorusVector& alpha, const Rational& eps, std::uint64_t N) {
    if (alpha.empty()) throw std::invalid_argument("empty torus vector");
    if (eps <= 0) throw std::domain_error("density threshold must be positive");
    DensityResult res;
    res.n = N;
    if (N == 0) return res;
    if (eps > Rational(1, 2)) {
        res.count = N;
        return res;
    }
    struct Plan {
        std::uint64_t step, modulus, sure, maybe;
    };
    std::vector<Plan> plans;
    const BigInt limit = BigInt(1) << 62;
    for (const auto& comp : alpha) {
        Plan pl{};
        if (comp.is_rational()) {
            BigInt P = numerator(comp.offset()), Q = denominator(comp.offset());
            if (Q >= limit) throw std::domain_error("denominator too large for the residue kernel");
            BigInt T = ceil_of(eps * Rational(Q));
            pl = {P.convert_to<std::uint64_t>(), Q.convert_to<std::uint64_t>(), T.convert_to<std::uint64_t>(),
                  T.convert_to<std::uint64_t>()};
        } else {
            const auto& cf = *comp.cf();
            BigInt m = abs_big(comp.multiplier());
            BigInt b = denominator(comp.offset()), a = numerator(comp.offset());
            BigInt need = BigInt(4) * BigInt(N) * m * b;
            // smallest n whose successor denominator exceeds need
            BigInt p, q;
            bool ok = false;
            auto cs = cf.convergents(cf.is_periodic() ? 200 : cf.prefix().size());
            for (std::size_t i = 0; i < cs.size(); ++i) {
                BigInt next_q_lower;
                if (i + 1 < cs.size()) {
                    next_q_lower = cs[i + 1].q;
                } else if (cf.has_tail_bound()) {
                    std::int64_t tb = std::min<std::int64_t>(floor_log2_exp_lower(*cf.tail_log()), 256);
                    next_q_lower = (BigInt(1) << static_cast<unsigned>(tb)) * cs[i].q;
                } else {
                    break;
                }
                if (next_q_lower > need) {
                    p = cs[i].p;
                    q = cs[i].q;
                    ok = true;
                    break;
                }
            }
            if (!ok) throw std::domain_error("no convergent deep enough for exact density counting");
            BigInt Pn = comp.multiplier() * p * b + a * q;
            BigInt Q = q * b;
            if (Q >= limit) throw std::domain_error("approximant denominator too large for the residue kernel");
            BigInt Pm = Pn % Q;
            if (Pm < 0) Pm += Q;
            Rational eq = eps * Rational(Q);
            BigInt sure = floor_of(eq - Rational(1, 4)) + 1;
            if (sure < 0) sure = 0;
            BigInt maybe = ceil_of(eq + Rational(1, 4));
            pl = {Pm.convert_to<std::uint64_t>(), Q.convert_to<std::uint64_t>(), sure.convert_to<std::uint64_t>(),
                  maybe.convert_to<std::uint64_t>()};
        }
        plans.push_back(pl);
    }
    const std::uint64_t block = 1u << 20;
    std::vector<std::uint8_t> codes;
    for (std::uint64_t j0 = 1; j0 <= N; j0 += block) {
        std::uint64_t len = std::min<std::uint64_t>(block, N - j0 + 1);
        codes.assign(len, 2);
        for (const auto& pl : plans)
            kernels::classify_returns(pl.step, pl.modulus, j0, pl.sure, pl.maybe, codes);
        for (std::uint64_t i = 0; i < len; ++i) {
            if (codes[i] == 2) {
                ++res.count;
            } else if (codes[i] == 1) {
                // resolve against the exact value
                std::uint64_t j = j0 + i;
                bool inside = true;
                for (const auto& comp : alpha) {
                    TorusComponent v = comp.scaled(BigInt(j));
                    bool decided = false;
                    for (unsigned bits = 96; bits <= (1u << 16) && !decided; bits *= 2) {
                        auto b = v.bracket(bits);
                        auto n = norm_over(b.lo, b.hi);
                        if (n.hi < eps) decided = true;
                        else if (n.lo >= eps) {
                            decided = true;
                            inside = false;
                        }
                    }
                    if (!decided) throw std::runtime_error("density comparison undecided at maximum precision");
                    if (!inside) break;
                }
                ++res.resolved_exactly;
                if (inside) ++res.count;
            }
        }
    }
    return res;
}

std::vector<BigInt> ostrowski_digits(const ContinuedFraction& x, const BigInt& N) {
    auto cs = x.convergents_up_to(N);
    if (!x.is_periodic() && cs.size() == x.available() && !x.is_rational()) {
        const BigInt& qN = cs.back().q;
        std::int64_t lower_bits = floor_log2_exp_lower(*x.tail_log()) + bit_length(qN) - 1;
        if (lower_bits < bit_length(N)) throw std::domain_error("expansion too short for this N");
    }
    std::vector<BigInt> digits(cs.size(), 0);
    BigInt rem = N;
    for (std::size_t i = cs.size(); i-- > 0;) {
        if (cs[i].q == 0) continue;
        digits[i] = rem / cs[i].q;
        rem -= digits[i] * cs[i].q;
    }
    return digits;
}

double ostrowski_discrepancy_bound(const ContinuedFraction& x, std::uint64_t N) {
    if (N == 0) return 1.0;
    auto d = ostrowski_digits(x, BigInt(N));
    BigInt sum = 0;
    for (const auto& b : d) sum += b;
    return 3.0 * to_double(sum) / static_cast<double>(N);
}

namespace {

// simplest rational in the closed interval [a, b], a <= b
Rational simplest_between(Rational a, Rational b) {
    std::vector<BigInt> terms;
    for (int guard = 0; guard < 100000; ++guard) {
        BigInt fl = floor_of(a);
        if (Rational(fl) == a) {
            terms.push_back(fl);
            break;
        }
        if (Rational(fl + 1) <= b) {
            terms.push_back(fl + 1);
            break;
        }
        terms.push_back(fl);
        Rational na = Rational(1) / (b - Rational(fl));
        Rational nb = Rational(1) / (a - Rational(fl));
        a = na;
        b = nb;
    }
    Rational v(terms.back());
    for (std::size_t i = terms.size() - 1; i-- > 0;) v = Rational(terms[i]) + Rational(1) / v;
    return v;
}

}  // namespace

std::optional<Rational> is_rational_within(const RationalInterval& x, const BigInt& q_max, const Rational& tol) {
    if (tol < 0) throw std::domain_error("tolerance must be non-negative");
    Rational a = x.hi - tol, b = x.lo + tol;
    if (a > b) return std::nullopt;
    Rational s = simplest_between(a, b);
    if (denominator(s) > q_max) return std::nullopt;
    return s;
}

}  // namespace hofer
