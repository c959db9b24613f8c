#pragma once
// Synthetic datasets from the RL-HMM-DDM with ground-truth latent states.

#include <cstdint>
#include <vector>

#include "rlhmmddm/params.hpp"
#include "rlhmmddm/types.hpp"
#include "rlhmmddm/wfpt.hpp"

namespace rlhmmddm::sim {

enum class RewardSetting {
    bernoulli = 1,  // rich Bern(0.75), lean Bern(0.3)
    beta = 2,       // rich Beta(3,1), lean Beta(1,3)
};

/// Parameters used by the simulation study: alpha0 = 1, alpha1 = 1.5,
/// b = 0.6, c = 2, tau = 0.1, pi1 = 0.8, zeta0 = (-0.5, -0.5), zeta1 = (1, 1).
ModelParams default_true_params();

struct SimConfig {
    int n = 100;
    int J = 100;
    RewardSetting setting = RewardSetting::bernoulli;
    bool switching = true;
    ModelParams true_params = default_true_params();
    double covariate_prob = 0.6;  // X_i ~ Bern(covariate_prob), one covariate
    double q_init = 0.0;
    std::uint64_t seed = 1;
    wfpt::SamplerOptions sampler;
    int max_redraws = 100;

    void validate() const;
};

struct SimOutput {
    Dataset dataset;
    std::vector<std::vector<int>> true_u;
    std::vector<std::vector<double>> true_z;
};

/// Subjects are generated independently, each from its own stream seeded by
/// (seed, subject index), so the output does not depend on `threads`.
SimOutput generate(const SimConfig& cfg, int threads = 1);

std::string subject_id(int index);

}  // namespace rlhmmddm::sim
