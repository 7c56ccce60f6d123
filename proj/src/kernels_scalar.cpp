#include "hofer/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hofer::kernels::scalar {

double max_flat_distance(std::span<const double> ax, std::span<const double> ay, std::span<const double> bx,
                         std::span<const double> by, bool periodic_x) {
    double m = 0.0;
    for (std::size_t i = 0; i < ax.size(); ++i) {
        double dx = std::fabs(ax[i] - bx[i]);
        if (periodic_x) dx = std::min(dx, 1.0 - dx);
        double dy = ay[i] - by[i];
        double d = std::sqrt(dx * dx + dy * dy);
        m = std::max(m, d);
    }
    return m;
}

double max_singular_value(const Mat2Soa& m) {
    double best = 0.0;
    for (std::size_t i = 0; i < m.a.size(); ++i) {
        double s = m.a[i] + m.d[i];
        double t = m.c[i] - m.b[i];
        double u = m.a[i] - m.d[i];
        double v = m.b[i] + m.c[i];
        double sigma = 0.5 * (std::sqrt(s * s + t * t) + std::sqrt(u * u + v * v));
        best = std::max(best, sigma);
    }
    return best;
}

double max_det_defect(const Mat2Soa& m) {
    double best = 0.0;
    for (std::size_t i = 0; i < m.a.size(); ++i) {
        double det = m.a[i] * m.d[i] - m.b[i] * m.c[i];
        best = std::max(best, std::fabs(det - 1.0));
    }
    return best;
}

double max_frobenius_distance(const Mat2Soa& m, const Mat2Soa& n) {
    double best = 0.0;
    for (std::size_t i = 0; i < m.a.size(); ++i) {
        double da = m.a[i] - n.a[i];
        double db = m.b[i] - n.b[i];
        double dc = m.c[i] - n.c[i];
        double dd = m.d[i] - n.d[i];
        double f = std::sqrt(da * da + db * db + dc * dc + dd * dd);
        best = std::max(best, f);
    }
    return best;
}

double max_value(std::span<const double> v) {
    double best = 0.0;
    for (double x : v) best = std::max(best, x);
    return best;
}

void classify_returns(std::uint64_t step, std::uint64_t modulus, std::uint64_t first_j, std::uint64_t sure,
                      std::uint64_t maybe, std::span<std::uint8_t> codes) {
    if (modulus == 0 || modulus >= (1ull << 62)) throw std::domain_error("modulus out of kernel range");
    step %= modulus;
    auto r = static_cast<std::uint64_t>((static_cast<unsigned __int128>(first_j) * step) % modulus);
    for (std::size_t i = 0; i < codes.size(); ++i) {
        std::uint64_t d = std::min(r, modulus - r);
        auto code = static_cast<std::uint8_t>((d < maybe ? 1 : 0) + (d < sure ? 1 : 0));
        codes[i] = std::min(codes[i], code);
        r += step;
        if (r >= modulus) r -= modulus;
    }
}

}  // namespace hofer::kernels::scalar
