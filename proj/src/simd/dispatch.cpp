#include <atomic>
#include <cstdlib>
#include <string>

#include "kernel_common.hpp"

namespace rlhmmddm::simd {

#ifndef RLHMMDDM_HAVE_AVX2
void wfpt_log_density_avx2(const WfptShared&, std::span<const double>, std::span<const std::uint8_t>,
                           std::span<const double>, std::span<double>, const WfptGradient*) {
    throw DomainError("wfpt kernel: AVX2 variant not compiled in");
}
#endif

namespace {

Isa detect() {
    if (const char* env = std::getenv("RLHMMDDM_SIMD")) {
        const std::string want(env);
        if (want == "scalar") return Isa::scalar;
        if (want == "avx2" && supported(Isa::avx2)) return Isa::avx2;
    }
    return supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& active() {
    static std::atomic<Isa> isa{detect()};
    return isa;
}

}  // namespace

std::string_view to_string(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
    }
    return "unknown";
}

bool supported(Isa isa) {
    switch (isa) {
        case Isa::scalar: return true;
        case Isa::avx2:
#if defined(RLHMMDDM_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
    }
    return false;
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
    if (!supported(isa))
        throw DomainError("wfpt kernel: instruction set " + std::string(to_string(isa)) + " not available");
    active().store(isa, std::memory_order_relaxed);
}

void wfpt_log_density(const WfptShared& p, std::span<const double> rt,
                      std::span<const std::uint8_t> choice, std::span<const double> drift,
                      std::span<double> out, const WfptGradient* grad) {
    if (active_isa() == Isa::avx2)
        wfpt_log_density_avx2(p, rt, choice, drift, out, grad);
    else
        wfpt_log_density_scalar(p, rt, choice, drift, out, grad);
}

}  // namespace rlhmmddm::simd
