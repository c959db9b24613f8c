#include "rlhmmddm/wfpt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rlhmmddm/types.hpp"

namespace rlhmmddm::wfpt {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLogPi = 1.1447298858494002;        // log(pi)
constexpr double kHalfLog2Pi = 0.91893853320467274;  // 0.5 * log(2 pi)

void check_unit_args(double u, double b) {
    if (!std::isfinite(u) || u <= 0.0)
        throw DomainError("wfpt: decision time must be finite and positive, got " + std::to_string(u));
    if (!(b > 0.0 && b < 1.0))
        throw DomainError("wfpt: relative bias must lie in (0,1), got " + std::to_string(b));
}

int small_first(int terms) { return -((terms - 1) / 2); }
int small_last(int terms) { return terms / 2; }  // ceil((terms-1)/2)

// log f0(u; 1, b, 0) with the leading exponential factored out so that very
// small and very large u do not underflow. Returns -inf when the truncated
// sum is not positive.
double log_f0_unit(double u, double b, const TermCounts& counts) {
    if (counts.prefer_small()) {
        const int terms = std::max(counts.small, 1);
        double sum = 0.0;
        for (int k = small_first(terms); k <= small_last(terms); ++k) {
            const double x = b + 2.0 * k;
            sum += x * std::exp(-(x * x - b * b) / (2.0 * u));
        }
        if (!(sum > 0.0)) return -HUGE_VAL;
        return -kHalfLog2Pi - 1.5 * std::log(u) - b * b / (2.0 * u) + std::log(sum);
    }
    const int terms = std::max(counts.large, 1);
    double sum = 0.0;
    for (int k = 1; k <= terms; ++k) {
        const double kk = static_cast<double>(k);
        sum += kk * std::exp(-(kk * kk - 1.0) * kPi * kPi * u / 2.0) * std::sin(kk * kPi * b);
    }
    if (!(sum > 0.0)) return -HUGE_VAL;
    return kLogPi - kPi * kPi * u / 2.0 + std::log(sum);
}

// Lower-boundary log density for the already-reflected parameters.
double log_lower(double td, double alpha, double b, double v) {
    const double u = td / (alpha * alpha);
    const double unit = log_f0_unit(u, b, term_counts(u));
    return -2.0 * std::log(alpha) - alpha * b * v - 0.5 * v * v * td + unit;
}

}  // namespace

void DdmParams::validate() const {
    if (!std::isfinite(alpha) || alpha <= 0.0)
        throw DomainError("wfpt: boundary separation must be positive, got " + std::to_string(alpha));
    if (!(b > 0.0 && b < 1.0))
        throw DomainError("wfpt: relative bias must lie in (0,1), got " + std::to_string(b));
    if (!std::isfinite(v)) throw DomainError("wfpt: drift rate must be finite");
    if (!std::isfinite(tau) || tau < 0.0)
        throw DomainError("wfpt: non-decision time must be >= 0, got " + std::to_string(tau));
}

// Navarro & Fuss (2009) bounds on the number of terms.
TermCounts term_counts(double u, double eps) {
    TermCounts tc;
    double kl;
    if (kPi * u * eps < 1.0) {
        kl = std::sqrt(-2.0 * std::log(kPi * u * eps) / (kPi * kPi * u));
        kl = std::max(kl, 1.0 / (kPi * std::sqrt(u)));
    } else {
        kl = 1.0 / (kPi * std::sqrt(u));
    }
    double ks;
    const double c = 2.0 * std::sqrt(2.0 * kPi * u) * eps;
    if (c < 1.0) {
        ks = 2.0 + std::sqrt(-2.0 * u * std::log(c));
        ks = std::max(ks, std::sqrt(u) + 1.0);
    } else {
        ks = 2.0;
    }
    tc.small = static_cast<int>(std::ceil(ks));
    tc.large = static_cast<int>(std::ceil(kl));
    return tc;
}

double f0_unit_terms(double u, double b, Representation rep, int terms) {
    check_unit_args(u, b);
    if (terms < 1) throw DomainError("wfpt: term count must be positive");
    if (rep == Representation::automatic)
        throw DomainError("wfpt: f0_unit_terms needs an explicit representation");
    if (rep == Representation::small) {
        double sum = 0.0;
        for (int k = small_first(terms); k <= small_last(terms); ++k) {
            const double x = b + 2.0 * k;
            sum += x * std::exp(-x * x / (2.0 * u));
        }
        return std::max(sum / std::sqrt(2.0 * kPi * u * u * u), 0.0);
    }
    double sum = 0.0;
    for (int k = 1; k <= terms; ++k) {
        const double kk = static_cast<double>(k);
        sum += kk * std::exp(-kk * kk * kPi * kPi * u / 2.0) * std::sin(kk * kPi * b);
    }
    return std::max(kPi * sum, 0.0);
}

double f0_unit(double u, double b, Representation rep, double eps) {
    check_unit_args(u, b);
    const TermCounts tc = term_counts(u, eps);
    switch (rep) {
        case Representation::small:
            return f0_unit_terms(u, b, Representation::small, tc.small);
        case Representation::large:
            return f0_unit_terms(u, b, Representation::large, tc.large);
        case Representation::automatic:
            break;
    }
    return tc.prefer_small() ? f0_unit_terms(u, b, Representation::small, tc.small)
                             : f0_unit_terms(u, b, Representation::large, tc.large);
}

double joint_density(double t, int a, const DdmParams& p) {
    p.validate();
    if (!std::isfinite(t)) throw DomainError("wfpt: response time must be finite");
    if (a != 0 && a != 1) throw DomainError("wfpt: choice must be 0 or 1");
    const double td = t - p.tau;
    if (td <= 0.0) return 0.0;
    const double b = a == 1 ? 1.0 - p.b : p.b;
    const double v = a == 1 ? -p.v : p.v;
    const double u = td / (p.alpha * p.alpha);
    return std::exp(-p.alpha * b * v - 0.5 * v * v * td) * f0_unit(u, b) / (p.alpha * p.alpha);
}

double log_joint_density(double t, int a, const DdmParams& p) {
    p.validate();
    if (!std::isfinite(t)) throw DomainError("wfpt: response time must be finite");
    if (a != 0 && a != 1) throw DomainError("wfpt: choice must be 0 or 1");
    const double td = t - p.tau;
    if (td <= 0.0) return kLogDensityFloor;
    const double value = a == 1 ? log_lower(td, p.alpha, 1.0 - p.b, -p.v)
                                : log_lower(td, p.alpha, p.b, p.v);
    return std::max(value, kLogDensityFloor);
}

double choice_prob(const DdmParams& p) {
    p.validate();
    const double va = p.v * p.alpha;
    if (std::fabs(va) < 1e-6) return p.b + p.b * (1.0 - p.b) * va;
    // (exp(b x) - 1) / (exp(x) - 1) with x = -2 v alpha
    const double x = -2.0 * va;
    if (x <= 0.0) return std::expm1(p.b * x) / std::expm1(x);
    return std::exp((p.b - 1.0) * x) * std::expm1(-p.b * x) / std::expm1(-x);
}

double mean_decision_time(const DdmParams& p) {
    p.validate();
    const double z = p.b * p.alpha;
    if (std::fabs(p.v * p.alpha) < 1e-5) return z * (p.alpha - z);
    return (p.alpha * choice_prob(p) - z) / p.v;
}

Draw sample(const DdmParams& p, std::mt19937_64& rng, const SamplerOptions& opts) {
    p.validate();
    if (!(opts.dt > 0.0)) throw DomainError("wfpt: sampler step must be positive");
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    const double alpha = p.alpha;
    const double dt = opts.dt;
    const double sd = std::sqrt(dt);
    const double mean_step = p.v * dt;
    const auto max_steps = static_cast<std::uint64_t>(std::ceil(opts.max_decision_time / dt));
    // Bridge crossing probabilities below exp(-40) are not worth a uniform draw.
    constexpr double kBridgeCutoff = 40.0;

    double w = p.b * alpha;
    for (std::uint64_t n = 1; n <= max_steps; ++n) {
        const double w2 = w + mean_step + sd * normal(rng);
        const double t = p.tau + static_cast<double>(n) * dt;
        if (w2 >= alpha) return {t, 1};
        if (w2 <= 0.0) return {t, 0};
        const double eu = 2.0 * (alpha - w) * (alpha - w2) / dt;
        const double el = 2.0 * w * w2 / dt;
        if (eu < kBridgeCutoff || el < kBridgeCutoff) {
            const double pu = eu < kBridgeCutoff ? std::exp(-eu) : 0.0;
            const double pl = el < kBridgeCutoff ? std::exp(-el) : 0.0;
            const double x = unif(rng);
            if (x < pu) return {t, 1};
            if (x < pu + pl) return {t, 0};
        }
        w = w2;
    }
    throw SamplingError("wfpt: path did not reach a boundary within " +
                            std::to_string(opts.max_decision_time) + " s",
                        max_steps);
}

}  // namespace rlhmmddm::wfpt
