#include "kanbench/kernels.hpp"

#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string_view>

namespace kanbench::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(KANBENCH_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa probe() {
    if (const char* env = std::getenv("KANBENCH_ISA"); env && std::string_view(env) == "scalar") {
        return Isa::scalar;
    }
    return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{probe()};
    return isa;
}

}  // namespace

std::string_view to_string(Isa isa) {
    return isa == Isa::avx2 ? "avx2" : "scalar";
}

Isa detected_isa() {
    static const Isa isa = probe();
    return isa;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

Isa set_active_isa(Isa isa) {
    if (isa == Isa::avx2 && !cpu_has_avx2()) isa = Isa::scalar;
    current().store(isa, std::memory_order_relaxed);
    return isa;
}

double dot(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    if (active_isa() == Isa::avx2) return avx2::dot(a.data(), b.data(), a.size());
    return scalar::dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    if (active_isa() == Isa::avx2) return avx2::axpy(alpha, x.data(), y.data(), x.size());
    scalar::axpy(alpha, x.data(), y.data(), x.size());
}

Moments moments(std::span<const double> f, std::span<const double> y) {
    assert(f.size() == y.size());
    if (active_isa() == Isa::avx2) return avx2::moments(f.data(), y.data(), f.size());
    return scalar::moments(f.data(), y.data(), f.size());
}

}  // namespace kanbench::kernels
