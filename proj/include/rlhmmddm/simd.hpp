#pragma once
// Batched WFPT log-density kernels with runtime instruction-set selection.
//
// All trials in a batch share (alpha, b, tau); response time, choice and
// drift vary per trial. Every variant computes exactly the quantity
// wfpt::log_joint_density returns (floored at log(1e-300)) and, on request,
// its partial derivatives with respect to alpha, b, v and tau. Floored
// entries get zero derivatives.

#include <cstdint>
#include <span>
#include <string_view>

namespace rlhmmddm::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

/// True when the variant was compiled in and the CPU supports it.
bool supported(Isa isa);

/// The variant used by wfpt_log_density. Defaults to the best supported ISA;
/// the RLHMMDDM_SIMD environment variable ("scalar" or "avx2") overrides it.
Isa active_isa();

/// Throws DomainError when the ISA is not supported.
void set_active_isa(Isa isa);

struct WfptShared {
    double alpha = 1.0;
    double b = 0.5;
    double tau = 0.0;
};

struct WfptGradient {
    std::span<double> d_alpha;
    std::span<double> d_b;
    std::span<double> d_v;
    std::span<double> d_tau;
};

/// log f(rt[i], choice[i]; alpha, b, drift[i], tau) for every i.
void wfpt_log_density(const WfptShared& p, std::span<const double> rt,
                      std::span<const std::uint8_t> choice, std::span<const double> drift,
                      std::span<double> out, const WfptGradient* grad = nullptr);

/// Explicit variants, for equivalence testing and benchmarking.
void wfpt_log_density_scalar(const WfptShared& p, std::span<const double> rt,
                             std::span<const std::uint8_t> choice, std::span<const double> drift,
                             std::span<double> out, const WfptGradient* grad = nullptr);
void wfpt_log_density_avx2(const WfptShared& p, std::span<const double> rt,
                           std::span<const std::uint8_t> choice, std::span<const double> drift,
                           std::span<double> out, const WfptGradient* grad = nullptr);

}  // namespace rlhmmddm::simd
