#pragma once
// Pieces shared by the kernel variants: argument checks and the sine/cosine
// tables of the large-time series.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

#include "rlhmmddm/simd.hpp"
#include "rlhmmddm/types.hpp"
#include "rlhmmddm/wfpt.hpp"

namespace rlhmmddm::simd::detail {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kLogPi = 1.1447298858494002;
inline constexpr double kHalfLog2Pi = 0.91893853320467274;

// Large-time series never needs many terms once the cheaper representation
// is selected; the tables cover far more than that.
inline constexpr int kMaxLargeTerms = 48;

struct TrigTables {
    // index k-1 holds sin(k pi w), cos(k pi w); [0] is w = b, [1] is w = 1 - b.
    std::array<std::array<double, kMaxLargeTerms>, 2> sin{};
    std::array<std::array<double, kMaxLargeTerms>, 2> cos{};

    explicit TrigTables(double b) {
        for (int k = 1; k <= kMaxLargeTerms; ++k) {
            const double kk = static_cast<double>(k);
            sin[0][k - 1] = std::sin(kk * kPi * b);
            cos[0][k - 1] = std::cos(kk * kPi * b);
            sin[1][k - 1] = std::sin(kk * kPi * (1.0 - b));
            cos[1][k - 1] = std::cos(kk * kPi * (1.0 - b));
        }
    }
};

inline void check_batch(const WfptShared& p, std::span<const double> rt,
                        std::span<const std::uint8_t> choice, std::span<const double> drift,
                        std::span<double> out, const WfptGradient* grad) {
    wfpt::DdmParams{p.alpha, p.b, 0.0, p.tau}.validate();
    const auto n = rt.size();
    if (choice.size() != n || drift.size() != n || out.size() != n)
        throw DomainError("wfpt kernel: input spans differ in length");
    if (grad && (grad->d_alpha.size() != n || grad->d_b.size() != n || grad->d_v.size() != n ||
                 grad->d_tau.size() != n))
        throw DomainError("wfpt kernel: gradient spans differ in length");
}

}  // namespace rlhmmddm::simd::detail
