#pragma once
// Parameter estimation: generalized EM for the RL-HMM-DDM, direct maximum
// likelihood for the single-state RL-DDM, EM for the softmax RL-HMM, and
// per-subject softmax RL fits used for screening.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rlhmmddm/hmm.hpp"
#include "rlhmmddm/params.hpp"
#include "rlhmmddm/types.hpp"

namespace rlhmmddm::fit {

enum class Model { rl_hmm_ddm, rl_ddm, rl_hmm };

std::string to_string(Model m);
Model parse_model(const std::string& name);

// Emission/learning block, transformed coordinates in this order.
enum ThetaIndex : int { kAlpha0 = 0, kAlpha1, kB, kC, kTau, kBeta, kThetaDim };
using ThetaVec = std::array<double, kThetaDim>;
using ThetaMask = std::array<bool, kThetaDim>;  // true = held fixed

inline constexpr double kTauMargin = 1e-4;  // tau_max = min RT - kTauMargin

/// Upper bound for tau given the data.
double tau_upper_bound(const Dataset& data);

/// log for alpha0, alpha1, c; logit for b, beta; logit(tau / tau_max) for tau.
ThetaVec transform(const ModelParams& p, double tau_max);
/// Inverse of transform; chain and rho are copied from `base`.
ModelParams untransform(const ThetaVec& x, double tau_max, const ModelParams& base);

struct FitConfig {
    int max_em_iter = 500;
    double em_tol = 1e-6;          // relative change in observed log-likelihood
    int inner_max_iter = 100;
    double inner_grad_tol = 1e-8;  // ||g||_inf <= tol * (1 + |f|)
    int restarts = 5;
    std::uint64_t seed = 1;
    bool analytic_gradient = true;
    double fd_step = 1e-6;
    int threads = 1;
    double q_init = 0.0;
    // Chain frozen at Pr(U_1 = 1) = 1 with engaged absorbing; only the
    // emission block is estimated. Used to cross-check the RL-DDM fitter.
    bool freeze_engaged = false;
    ThetaMask fixed{};                // emission coordinates held at their initial value
    std::optional<ModelParams> init;  // start of restart 0 (warm start)
    int direct_max_iter = 2000;       // BFGS budget of the single-state fit

    void validate() const;
};

struct RestartSummary {
    double loglik = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> loglik_trace;
};

struct FitResult {
    Model model = Model::rl_hmm_ddm;
    ModelParams params;
    double loglik = 0.0;
    std::vector<double> loglik_trace;  // observed-data log-likelihood per iteration
    bool converged = false;
    int iterations = 0;
    hmm::Posteriors posteriors;        // at the final parameters
    std::vector<std::string> warnings;
    int best_restart = 0;
    std::vector<RestartSummary> restarts;
    int mstep_violations = 0;          // M-step components that failed to improve
};

/// Initial (lapsed, engaged) distribution and transition matrix for a subject.
hmm::Vec2 initial_distribution(const ModelParams& theta, bool freeze_engaged = false);
hmm::Mat2 subject_transitions(const ModelParams& theta, const SubjectData& subject, bool freeze_engaged = false);

double observed_loglik(const Dataset& data, const ModelParams& theta, const FitConfig& cfg = {});
hmm::Posteriors e_step(const Dataset& data, const ModelParams& theta, const FitConfig& cfg = {});

double m_step_pi(const hmm::Posteriors& post);

/// Weighted logistic objective for zeta_k and its gradient.
double zeta_objective(const hmm::Posteriors& post, const Dataset& data, int k, std::span<const double> zeta,
                      std::span<double> grad = {});

struct MStepOutcome {
    std::vector<double> value;
    double objective_before = 0.0;
    double objective_after = 0.0;
    bool improved = true;
    std::string warning;
};

MStepOutcome m_step_zeta(const hmm::Posteriors& post, const Dataset& data, int k,
                         const std::vector<double>& zeta_init, const FitConfig& cfg = {});

/// -sum_i sum_j [gamma_0 log f_lapsed + gamma_1 log f_engaged] on the
/// transformed scale; gradient with respect to the transformed coordinates.
double theta_objective(const Dataset& data, const std::vector<std::vector<double>>& engaged_weight,
                       const ModelParams& theta, double tau_max, const FitConfig& cfg,
                       ThetaVec* grad = nullptr);

struct ThetaStep {
    ModelParams params;
    double objective_before = 0.0;
    double objective_after = 0.0;
    bool improved = true;
    std::vector<double> inv_hessian;
};

/// Engaged weights gamma_{i,j,1}; the lapsed weight is 1 - gamma.
ThetaStep m_step_theta(const Dataset& data, const std::vector<std::vector<double>>& engaged_weight,
                       const ModelParams& init, double tau_max, const FitConfig& cfg,
                       std::span<const double> inv_hessian = {});

std::vector<std::vector<double>> engaged_weights(const hmm::Posteriors& post);

/// Draw of a starting point for restart r.
ModelParams random_init(const Dataset& data, std::uint64_t seed, int restart, Model model);

FitResult fit_rl_hmm_ddm(const Dataset& data, const FitConfig& cfg = {});
FitResult fit_rl_ddm(const Dataset& data, const FitConfig& cfg = {});
FitResult fit_rl_hmm(const Dataset& data, const FitConfig& cfg = {});
FitResult fit_model(Model m, const Dataset& data, const FitConfig& cfg = {});

/// Smoothed posteriors of a model at fixed parameters (the RL-DDM uses the
/// frozen chain, so every trial is engaged).
hmm::Posteriors model_posteriors(Model m, const Dataset& data, const ModelParams& theta, const FitConfig& cfg = {});

// Softmax RL-HMM pieces, exposed for testing.
std::vector<hmm::Vec2> softmax_log_emissions(const SubjectData& subject, const ModelParams& theta, double q_init = 0.0);
double softmax_observed_loglik(const Dataset& data, const ModelParams& theta, const FitConfig& cfg = {});

struct SoftmaxFit {
    double beta = 0.0;
    double rho = 0.0;
    double loglik = 0.0;
    bool boundary = false;  // likelihood flat in beta (no learning signal)
    bool converged = false;
};

/// Maximum likelihood fit of Pr(A = 1) = logistic(rho Z) with Rescorla-Wagner Z.
SoftmaxFit fit_rl_softmax_subject(const SubjectData& subject, double q_init = 0.0);

}  // namespace rlhmmddm::fit
