#pragma once
// Wiener first-passage time (WFPT) distribution of (response time, choice)
// for a unit-variance diffusion between absorbing boundaries 0 and alpha.
//
// The lower-boundary sub-density factorises as
//
//   f0(t; alpha, b, v) = alpha^-2 * exp(-alpha*b*v - v^2 t / 2) * f0(t / alpha^2; 1, b, 0)
//
// and the upper one follows by reflection, f1(t; alpha, b, v) = f0(t; alpha, 1-b, -v).
// Non-decision time enters by substituting t - tau for t.

#include <cstdint>
#include <random>
#include <stdexcept>

namespace rlhmmddm::wfpt {

/// Truncation accuracy of the unit series.
inline constexpr double kSeriesEpsilon = 1e-10;
/// Densities below this value are treated as zero; log-densities are floored at its log.
inline constexpr double kDensityFloor = 1e-300;
inline const double kLogDensityFloor = -690.77552789821368;  // log(1e-300)

struct DdmParams {
    double alpha = 1.0;  // boundary separation
    double b = 0.5;      // relative starting point z / alpha
    double v = 0.0;      // drift rate
    double tau = 0.0;    // non-decision time, seconds

    /// Throws DomainError unless alpha > 0, 0 < b < 1, tau >= 0 and v finite.
    void validate() const;
};

enum class Representation { small, large, automatic };

/// Term counts needed by each series at accuracy eps for normalised time u.
struct TermCounts {
    int small = 0;
    int large = 0;
    bool prefer_small() const { return small < large; }
};
TermCounts term_counts(double u, double eps = kSeriesEpsilon);

/// f0(u; 1, b, 0): lower-boundary first-passage density of the unit
/// zero-drift process started at b, at normalised decision time u.
double f0_unit(double u, double b, Representation rep = Representation::automatic,
               double eps = kSeriesEpsilon);

/// Same, truncated at an explicit number of terms (large: k = 1..terms;
/// small: the `terms` integers centred on zero).
double f0_unit_terms(double u, double b, Representation rep, int terms);

/// Joint density f(t, a) of response time and choice; 0 for t <= tau.
double joint_density(double t, int a, const DdmParams& p);

/// log f(t, a), evaluated in the log domain and floored at log(1e-300).
double log_joint_density(double t, int a, const DdmParams& p);

/// Pr(a = 1).
double choice_prob(const DdmParams& p);

/// Expected decision time E[T - tau] (both boundaries).
double mean_decision_time(const DdmParams& p);

class SamplingError : public std::runtime_error {
public:
    SamplingError(const std::string& what, std::uint64_t steps)
        : std::runtime_error(what), steps_(steps) {}
    std::uint64_t steps() const { return steps_; }

private:
    std::uint64_t steps_;
};

struct SamplerOptions {
    double dt = 1e-4;           // Euler step, seconds
    double max_decision_time = 60.0;
};

struct Draw {
    double t = 0.0;
    int a = 0;
};

/// Euler-Maruyama path simulation with a Brownian-bridge boundary-crossing
/// correction inside each step.
Draw sample(const DdmParams& p, std::mt19937_64& rng, const SamplerOptions& opts = {});

}  // namespace rlhmmddm::wfpt
