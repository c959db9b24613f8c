// Scalar reference variant of the batched WFPT log-density kernel.
//
// The unit series are evaluated with power recurrences instead of one exp()
// per term:
//   large time:  exp(-k^2 pi^2 u / 2) / exp(-pi^2 u / 2) = q^(k^2 - 1),  q = exp(-pi^2 u / 2)
//   small time:  exp(-((w+2k)^2 - w^2) / 2u) = A^(k^2) B^k       (k >= 0)
//                                            = A^(m(m-1)) C^m     (k = -m < 0)
//   with A = exp(-2/u), B = exp(-2w/u), C = exp(-2(1-w)/u); every factor is <= 1.

#include <algorithm>
#include <cmath>

#include "kernel_common.hpp"

namespace rlhmmddm::simd {

namespace {

using detail::kHalfLog2Pi;
using detail::kLogPi;
using detail::kPi;

struct UnitLog {
    double value;  // log f0(u; 1, w, 0)
    double d_u;    // d/du
    double d_w;    // d/dw
};

UnitLog unit_large(double u, int terms, const double* sin_k, const double* cos_k) {
    const double q = std::exp(-kPi * kPi * u / 2.0);
    const double q2 = q * q;
    double e = 1.0;
    double m = q2 * q;
    double s = 0.0, s_u = 0.0, s_w = 0.0;
    for (int k = 1; k <= terms; ++k) {
        const double kk = static_cast<double>(k);
        const double ke = kk * e;
        s += ke * sin_k[k - 1];
        s_u += kk * kk * ke * sin_k[k - 1];
        s_w += kk * ke * cos_k[k - 1];
        e *= m;
        m *= q2;
    }
    if (!(s > 0.0)) return {-HUGE_VAL, 0.0, 0.0};
    return {kLogPi - kPi * kPi * u / 2.0 + std::log(s), -kPi * kPi / 2.0 * s_u / s, kPi * s_w / s};
}

UnitLog unit_small(double u, double w, int terms) {
    const double a = std::exp(-2.0 / u);
    const double a2 = a * a;
    const double bw = std::exp(-2.0 * w / u);
    const double cw = std::exp(-2.0 * (1.0 - w) / u);
    const int last = terms / 2;
    const int first = (terms - 1) / 2;  // number of negative indices

    double s = w, s_u = w * w * w, s_w = 1.0 - w * w / u;
    double e = 1.0, p = a;
    for (int k = 1; k <= last; ++k) {
        e *= p * bw;
        p *= a2;
        const double x = w + 2.0 * k;
        s += x * e;
        s_u += x * x * x * e;
        s_w += (1.0 - x * x / u) * e;
    }
    e = 1.0;
    double r = 1.0;
    for (int m = 1; m <= first; ++m) {
        e *= r * cw;
        r *= a2;
        const double x = w - 2.0 * m;
        s += x * e;
        s_u += x * x * x * e;
        s_w += (1.0 - x * x / u) * e;
    }
    if (!(s > 0.0)) return {-HUGE_VAL, 0.0, 0.0};
    return {-kHalfLog2Pi - 1.5 * std::log(u) - w * w / (2.0 * u) + std::log(s),
            -1.5 / u + s_u / (2.0 * u * u * s), s_w / s};
}

}  // namespace

void wfpt_log_density_scalar(const WfptShared& p, std::span<const double> rt,
                             std::span<const std::uint8_t> choice, std::span<const double> drift,
                             std::span<double> out, const WfptGradient* grad) {
    detail::check_batch(p, rt, choice, drift, out, grad);
    const detail::TrigTables trig(p.b);
    const double alpha = p.alpha;
    const double inv_a2 = 1.0 / (alpha * alpha);
    const double log_a2 = 2.0 * std::log(alpha);

    for (std::size_t i = 0; i < rt.size(); ++i) {
        const double td = rt[i] - p.tau;
        const bool upper = choice[i] != 0;
        double value = wfpt::kLogDensityFloor;
        double g_alpha = 0.0, g_w = 0.0, g_v = 0.0, g_td = 0.0;
        if (td > 0.0) {
            const double w = upper ? 1.0 - p.b : p.b;
            const double v = upper ? -drift[i] : drift[i];
            const double u = td * inv_a2;
            const wfpt::TermCounts tc = wfpt::term_counts(u);
            UnitLog unit;
            if (tc.prefer_small()) {
                unit = unit_small(u, w, std::max(tc.small, 1));
            } else {
                const int terms = std::min(std::max(tc.large, 1), detail::kMaxLargeTerms);
                const int row = upper ? 1 : 0;
                unit = unit_large(u, terms, trig.sin[row].data(), trig.cos[row].data());
            }
            const double lf = -log_a2 - alpha * w * v - 0.5 * v * v * td + unit.value;
            if (lf > wfpt::kLogDensityFloor) {
                value = lf;
                g_alpha = -2.0 / alpha - w * v - 2.0 * u / alpha * unit.d_u;
                g_w = -alpha * v + unit.d_w;
                g_v = -alpha * w - v * td;
                g_td = -0.5 * v * v + unit.d_u * inv_a2;
            }
        }
        out[i] = value;
        if (grad) {
            grad->d_alpha[i] = g_alpha;
            grad->d_b[i] = upper ? -g_w : g_w;
            grad->d_v[i] = upper ? -g_v : g_v;
            grad->d_tau[i] = -g_td;
        }
    }
}

}  // namespace rlhmmddm::simd
