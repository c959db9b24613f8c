#pragma once
// Post-fit behavioural summaries, classification accuracy, bootstrap
// standard errors and correlation screening with BH q-values.

#include <cstdint>
#include <string>
#include <vector>

#include "rlhmmddm/fit.hpp"
#include "rlhmmddm/hmm.hpp"
#include "rlhmmddm/types.hpp"

namespace rlhmmddm::metrics {

inline constexpr double kGammaClip = 1e-8;

struct EngagementSummary {
    std::vector<std::vector<double>> gamma1;  // [subject][trial]
    std::vector<double> group_rate;           // [trial], mean over subjects present at that trial
    std::vector<double> score;                // [subject], mean logit of clipped gamma1
    std::vector<std::vector<int>> u_hat;      // [subject][trial], 1{gamma1 >= 0.5}
    std::vector<double> rt_engaged;           // [subject], NaN when no engaged trials
    std::vector<double> rt_lapsed;            // [subject], NaN when no lapsed trials
};

EngagementSummary engagement_summary(const hmm::Posteriors& post, const Dataset& data);

/// Mean response time by state; NaN when the state never occurs.
std::pair<double, double> rt_by_state(const SubjectData& subject, const std::vector<int>& u);

struct Accuracy {
    std::vector<double> per_trial;  // NaN where no subject contributes
    double overall = 0.0;           // pooled over every contributing (subject, trial)
    std::size_t count = 0;
};

/// Agreement of pred with truth over the first `window` trials. With a mask,
/// only cells where mask == 1 count.
Accuracy classification_accuracy(const std::vector<std::vector<int>>& pred,
                                 const std::vector<std::vector<int>>& truth, int window,
                                 const std::vector<std::vector<int>>* mask = nullptr);

/// Predicted action in the engaged state: the more likely boundary given the
/// observed response time (DDM models) or the softmax choice (RL-HMM).
std::vector<std::vector<int>> predict_engaged_actions(fit::Model model, const ModelParams& theta,
                                                      const Dataset& data, double q_init = 0.0);

std::vector<std::vector<int>> observed_actions(const Dataset& data);

/// Names of the estimated parameters of a model, in output order.
std::vector<std::string> parameter_names(fit::Model model, std::size_t num_covariates);
std::vector<double> parameter_vector(fit::Model model, const ModelParams& p);

struct BootstrapConfig {
    int replicates = 50;
    std::uint64_t seed = 1;
    int threads = 1;
    double max_drop_fraction = 0.2;
};

struct BootstrapResult {
    std::vector<std::string> names;
    std::vector<double> estimate;
    std::vector<double> bse;
    std::vector<double> ci_lower;
    std::vector<double> ci_upper;
    std::vector<std::vector<double>> replicates;  // kept replicates x parameters
    std::vector<int> replicate_index;             // original replicate number of each kept row
    int dropped = 0;
};

/// Resamples subjects with replacement and refits each replicate from the
/// full-data estimate. BSE uses the n-1 denominator; CIs are est +/- 1.96 BSE
/// except pi1, whose interval is built on the logit scale.
BootstrapResult bootstrap(const Dataset& data, fit::Model model, const fit::FitResult& estimate,
                          const fit::FitConfig& fit_cfg, const BootstrapConfig& cfg);

struct AssocRow {
    std::string label;
    std::size_t n = 0;
    double r = 0.0;
    double p = 1.0;
    double q = 1.0;
    double ci_lower = 0.0;
    double ci_upper = 0.0;
    bool skipped = false;
    std::string note;
};

/// Pearson correlation of `measure` with each column of `variables` after
/// pairwise deletion of NaNs; two-sided t-test p-values, BH q-values across
/// the non-skipped variables and Fisher-z 95% intervals.
std::vector<AssocRow> assoc(const std::vector<double>& measure, const std::vector<std::vector<double>>& variables,
                            const std::vector<std::string>& labels);

/// Benjamini-Hochberg adjusted p-values (q-values), returned in input order.
std::vector<double> bh_qvalues(const std::vector<double>& p);

}  // namespace rlhmmddm::metrics
