#pragma once

// Data-parallel inner loops.  Each kernel has a scalar reference and an AVX2 variant
// that performs the same floating point operations in the same order, so the two agree
// bit for bit.  The dispatching front end picks AVX2 when the CPU has it, unless the
// environment variable HOFERLAB_ISA=scalar is set.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace hofer::kernels {

enum class Isa { Scalar, Avx2 };

Isa detected_isa();
Isa active_isa();
void force_isa(std::optional<Isa> isa);
std::string_view isa_name(Isa isa);

struct Mat2Soa {
    std::span<const double> a, b, c, d;
};

#define HOFERLAB_KERNEL_DECLS                                                                          \
    double max_flat_distance(std::span<const double> ax, std::span<const double> ay,                   \
                             std::span<const double> bx, std::span<const double> by, bool periodic_x); \
    double max_singular_value(const Mat2Soa& m);                                                       \
    double max_det_defect(const Mat2Soa& m);                                                           \
    double max_frobenius_distance(const Mat2Soa& m, const Mat2Soa& n);                                 \
    double max_value(std::span<const double> v);                                                       \
    void classify_returns(std::uint64_t step, std::uint64_t modulus, std::uint64_t first_j,            \
                          std::uint64_t sure, std::uint64_t maybe, std::span<std::uint8_t> codes);

// max_i sqrt(dx^2 + dy^2); dx is taken on the unit circle when periodic_x.
// max_i of the largest singular value of [[a b] [c d]].
// max_i |ad - bc - 1|.
// max_i Frobenius norm of the difference.
// codes[i] <- min(codes[i], code(j)) for j = first_j + i, where with r = j*step mod modulus
// and d = min(r, modulus - r): code 2 if d < sure, 1 if d < maybe, else 0.
HOFERLAB_KERNEL_DECLS

namespace scalar {
HOFERLAB_KERNEL_DECLS
}

namespace avx2 {
HOFERLAB_KERNEL_DECLS
}

}  // namespace hofer::kernels
