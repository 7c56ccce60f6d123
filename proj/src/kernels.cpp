#include "hofer/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace hofer::kernels {

namespace {

std::atomic<int> forced{-1};

Isa from_env() {
    const char* v = std::getenv("HOFERLAB_ISA");
    if (v && std::string(v) == "scalar") return Isa::Scalar;
    return detected_isa();
}

}  // namespace

Isa detected_isa() {
    static const Isa isa = __builtin_cpu_supports("avx2") ? Isa::Avx2 : Isa::Scalar;
    return isa;
}

Isa active_isa() {
    int f = forced.load();
    if (f >= 0) return static_cast<Isa>(f);
    static const Isa env = from_env();
    return env;
}

void force_isa(std::optional<Isa> isa) {
    if (isa && *isa == Isa::Avx2 && detected_isa() != Isa::Avx2) return;
    forced.store(isa ? static_cast<int>(*isa) : -1);
}

std::string_view isa_name(Isa isa) {
    return isa == Isa::Avx2 ? "avx2" : "scalar";
}

#define HOFERLAB_DISPATCH(call) (active_isa() == Isa::Avx2 ? avx2::call : scalar::call)

double max_flat_distance(std::span<const double> ax, std::span<const double> ay, std::span<const double> bx,
                         std::span<const double> by, bool periodic_x) {
    return HOFERLAB_DISPATCH(max_flat_distance(ax, ay, bx, by, periodic_x));
}

double max_singular_value(const Mat2Soa& m) {
    return HOFERLAB_DISPATCH(max_singular_value(m));
}

double max_det_defect(const Mat2Soa& m) {
    return HOFERLAB_DISPATCH(max_det_defect(m));
}

double max_frobenius_distance(const Mat2Soa& m, const Mat2Soa& n) {
    return HOFERLAB_DISPATCH(max_frobenius_distance(m, n));
}

double max_value(std::span<const double> v) {
    return HOFERLAB_DISPATCH(max_value(v));
}

void classify_returns(std::uint64_t step, std::uint64_t modulus, std::uint64_t first_j, std::uint64_t sure,
                      std::uint64_t maybe, std::span<std::uint8_t> codes) {
    if (active_isa() == Isa::Avx2) avx2::classify_returns(step, modulus, first_j, sure, maybe, codes);
    else scalar::classify_returns(step, modulus, first_j, sure, maybe, codes);
}

}  // namespace hofer::kernels
