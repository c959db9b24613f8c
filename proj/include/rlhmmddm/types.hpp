#pragma once
// Observed-data containers and the error types shared by every module.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace rlhmmddm {

/// Raised when a parameter or argument lies outside its mathematical domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised for malformed or inconsistent observed data.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One trial: state shown, action taken, response time (seconds) and reward.
struct TrialRecord {
    int j = 0;        // 1-based trial index
    int s = 0;        // stimulus / state in {0,1}
    int a = 0;        // action in {0,1}
    double t = 0.0;   // response time, seconds
    double r = 0.0;   // reward, >= 0
};

struct SubjectData {
    std::string id;
    std::vector<double> covariates;
    std::vector<TrialRecord> trials;
};

struct Dataset {
    std::vector<SubjectData> subjects;

    std::size_t num_covariates() const {
        return subjects.empty() ? 0 : subjects.front().covariates.size();
    }
    std::size_t num_trials() const {
        std::size_t total = 0;
        for (const auto& s : subjects) total += s.trials.size();
        return total;
    }
    double min_rt() const;
};

/// Checks the Dataset invariants: trials numbered 1..J without gaps, binary
/// states/actions, positive finite response times, finite non-negative
/// rewards, and a common covariate dimension. Throws DataError.
void validate(const Dataset& data);
void validate(const SubjectData& subject);

}  // namespace rlhmmddm
