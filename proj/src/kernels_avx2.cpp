// Compiled with -mavx2 (see CMakeLists.txt).  Only called after a runtime CPU check.

#include "hofer/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hofer::kernels::avx2 {

namespace {

double hmax(__m256d v, double init) {
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, v);
    double m = init;
    for (double x : lanes) m = std::max(m, x);
    return m;
}

}  // namespace

double max_flat_distance(std::span<const double> ax, std::span<const double> ay, std::span<const double> bx,
                         std::span<const double> by, bool periodic_x) {
    const std::size_t n = ax.size();
    const __m256d sign = _mm256_set1_pd(-0.0);
    const __m256d one = _mm256_set1_pd(1.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d dx = _mm256_andnot_pd(sign, _mm256_sub_pd(_mm256_loadu_pd(&ax[i]), _mm256_loadu_pd(&bx[i])));
        if (periodic_x) dx = _mm256_min_pd(_mm256_sub_pd(one, dx), dx);
        __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(&ay[i]), _mm256_loadu_pd(&by[i]));
        __m256d d = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)));
        acc = _mm256_max_pd(acc, d);
    }
    double m = hmax(acc, 0.0);
    if (i < n)
        m = std::max(m, scalar::max_flat_distance(ax.subspan(i), ay.subspan(i), bx.subspan(i), by.subspan(i),
                                                  periodic_x));
    return m;
}

double max_singular_value(const Mat2Soa& m) {
    const std::size_t n = m.a.size();
    const __m256d half = _mm256_set1_pd(0.5);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d a = _mm256_loadu_pd(&m.a[i]), b = _mm256_loadu_pd(&m.b[i]);
        __m256d c = _mm256_loadu_pd(&m.c[i]), d = _mm256_loadu_pd(&m.d[i]);
        __m256d s = _mm256_add_pd(a, d);
        __m256d t = _mm256_sub_pd(c, b);
        __m256d u = _mm256_sub_pd(a, d);
        __m256d v = _mm256_add_pd(b, c);
        __m256d r1 = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(s, s), _mm256_mul_pd(t, t)));
        __m256d r2 = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(u, u), _mm256_mul_pd(v, v)));
        acc = _mm256_max_pd(acc, _mm256_mul_pd(half, _mm256_add_pd(r1, r2)));
    }
    double best = hmax(acc, 0.0);
    if (i < n)
        best = std::max(best, scalar::max_singular_value({m.a.subspan(i), m.b.subspan(i), m.c.subspan(i),
                                                          m.d.subspan(i)}));
    return best;
}

double max_det_defect(const Mat2Soa& m) {
    const std::size_t n = m.a.size();
    const __m256d sign = _mm256_set1_pd(-0.0);
    const __m256d one = _mm256_set1_pd(1.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d det = _mm256_sub_pd(_mm256_mul_pd(_mm256_loadu_pd(&m.a[i]), _mm256_loadu_pd(&m.d[i])),
                                    _mm256_mul_pd(_mm256_loadu_pd(&m.b[i]), _mm256_loadu_pd(&m.c[i])));
        acc = _mm256_max_pd(acc, _mm256_andnot_pd(sign, _mm256_sub_pd(det, one)));
    }
    double best = hmax(acc, 0.0);
    if (i < n)
        best = std::max(best, scalar::max_det_defect({m.a.subspan(i), m.b.subspan(i), m.c.subspan(i),
                                                      m.d.subspan(i)}));
    return best;
}

double max_frobenius_distance(const Mat2Soa& m, const Mat2Soa& o) {
    const std::size_t n = m.a.size();
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d da = _mm256_sub_pd(_mm256_loadu_pd(&m.a[i]), _mm256_loadu_pd(&o.a[i]));
        __m256d db = _mm256_sub_pd(_mm256_loadu_pd(&m.b[i]), _mm256_loadu_pd(&o.b[i]));
        __m256d dc = _mm256_sub_pd(_mm256_loadu_pd(&m.c[i]), _mm256_loadu_pd(&o.c[i]));
        __m256d dd = _mm256_sub_pd(_mm256_loadu_pd(&m.d[i]), _mm256_loadu_pd(&o.d[i]));
        __m256d sum = _mm256_add_pd(_mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(da, da), _mm256_mul_pd(db, db)),
                                                  _mm256_mul_pd(dc, dc)),
                                    _mm256_mul_pd(dd, dd));
        acc = _mm256_max_pd(acc, _mm256_sqrt_pd(sum));
    }
    double best = hmax(acc, 0.0);
    if (i < n)
        best = std::max(best, scalar::max_frobenius_distance(
                                  {m.a.subspan(i), m.b.subspan(i), m.c.subspan(i), m.d.subspan(i)},
                                  {o.a.subspan(i), o.b.subspan(i), o.c.subspan(i), o.d.subspan(i)}));
    return best;
}

double max_value(std::span<const double> v) {
    const std::size_t n = v.size();
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(&v[i]));
    double best = hmax(acc, 0.0);
    for (; i < n; ++i) best = std::max(best, v[i]);
    return best;
}

void classify_returns(std::uint64_t step, std::uint64_t modulus, std::uint64_t first_j, std::uint64_t sure,
                      std::uint64_t maybe, std::span<std::uint8_t> codes) {
    if (modulus == 0 || modulus >= (1ull << 62)) throw std::domain_error("modulus out of kernel range");
    step %= modulus;
    const std::size_t n = codes.size();
    auto mulmod = [&](std::uint64_t j) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(j) * step) % modulus);
    };
    alignas(32) std::int64_t start[4];
    for (int l = 0; l < 4; ++l) start[l] = static_cast<std::int64_t>(mulmod(first_j + static_cast<std::uint64_t>(l)));
    const auto inc = static_cast<std::int64_t>(mulmod(4));
    const __m256i M = _mm256_set1_epi64x(static_cast<std::int64_t>(modulus));
    const __m256i Mm1 = _mm256_set1_epi64x(static_cast<std::int64_t>(modulus) - 1);
    const __m256i INC = _mm256_set1_epi64x(inc);
    const __m256i S = _mm256_set1_epi64x(static_cast<std::int64_t>(std::min<std::uint64_t>(sure, modulus)));
    const __m256i Y = _mm256_set1_epi64x(static_cast<std::int64_t>(std::min<std::uint64_t>(maybe, modulus)));
    __m256i r = _mm256_load_si256(reinterpret_cast<const __m256i*>(start));
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256i mr = _mm256_sub_epi64(M, r);
        __m256i d = _mm256_blendv_epi8(r, mr, _mm256_cmpgt_epi64(r, mr));
        int in_maybe = _mm256_movemask_pd(_mm256_castsi256_pd(_mm256_cmpgt_epi64(Y, d)));
        int in_sure = _mm256_movemask_pd(_mm256_castsi256_pd(_mm256_cmpgt_epi64(S, d)));
        for (int l = 0; l < 4; ++l) {
            auto code = static_cast<std::uint8_t>(((in_maybe >> l) & 1) + ((in_sure >> l) & 1));
            codes[i + static_cast<std::size_t>(l)] = std::min(codes[i + static_cast<std::size_t>(l)], code);
        }
        r = _mm256_add_epi64(r, INC);
        r = _mm256_sub_epi64(r, _mm256_and_si256(M, _mm256_cmpgt_epi64(r, Mm1)));
    }
    if (i < n) scalar::classify_returns(step, modulus, first_j + i, sure, maybe, codes.subspan(i));
}

}  // namespace hofer::kernels::avx2
