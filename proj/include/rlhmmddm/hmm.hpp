#pragma once
// Covariate-dependent two-state chain over lapsed (0) / engaged (1)
// strategies, WFPT emission densities, and scaled forward-backward smoothing.

#include <array>
#include <span>
#include <vector>

#include "rlhmmddm/params.hpp"
#include "rlhmmddm/rl.hpp"
#include "rlhmmddm/types.hpp"

namespace rlhmmddm::hmm {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<Vec2, 2>;  // m[from][to]

double logistic(double x);

/// Row k is [1 - p_k, p_k], p_k = logistic(zeta_k0 + zeta_k1' x).
Mat2 transition_matrix(const ChainParams& chain, std::span<const double> x);

/// eta[j][k] = f(t_j, a_j | U_j = k): lapsed (alpha0, 1/2, 0, tau),
/// engaged (alpha1, b, c Z_j, tau). Entries are floored at 1e-300.
std::vector<Vec2> emissions(const SubjectData& subject, const ModelParams& theta, double q_init = 0.0);

/// Same in the log domain (floored at log(1e-300)); this is what the fitters use.
std::vector<Vec2> log_emissions(const SubjectData& subject, const ModelParams& theta, double q_init = 0.0);

struct SubjectPosteriors {
    std::vector<Vec2> gamma;  // J x 2
    std::vector<Mat2> xi;     // (J-1) x 2 x 2, transition j -> j+1
    double loglik = 0.0;
};

struct Posteriors {
    std::vector<SubjectPosteriors> subjects;
    double loglik() const;  // summed in subject order
};

/// Scaled forward-backward on emission densities eta (entries > 0).
SubjectPosteriors forward_backward(std::span<const Vec2> eta, const Vec2& pi, const Mat2& P);

/// Same on log emissions; each row is rescaled by its maximum before the
/// recursion and the offsets are added back to the log-likelihood.
SubjectPosteriors forward_backward_log(std::span<const Vec2> log_eta, const Vec2& pi, const Mat2& P);

struct ActionPosterior {
    Vec2 prob{0.5, 0.5};      // Pr(A = a | T = t, U = k, history)
    bool degenerate = false;  // both densities floored
};

/// Pr(A = a | T = t, U = k) = f(t, a) / (f(t, a) + f(t, 1 - a)) for the
/// state-k emission, with Z taken from q in state s.
ActionPosterior posterior_action(double t, int k, int s, const rl::QTable& q, const ModelParams& theta);

}  // namespace rlhmmddm::hmm
