#include "rlhmmddm/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rlhmmddm {

double Dataset::min_rt() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& s : subjects)
        for (const auto& tr : s.trials) m = std::min(m, tr.t);
    return m;
}

void validate(const SubjectData& subject) {
    const std::string who = "subject '" + subject.id + "': ";
    if (subject.trials.empty()) throw DataError(who + "no trials");
    for (double x : subject.covariates)
        if (!std::isfinite(x)) throw DataError(who + "non-finite covariate");
    for (std::size_t i = 0; i < subject.trials.size(); ++i) {
        const TrialRecord& tr = subject.trials[i];
        const std::string at = who + "trial " + std::to_string(i + 1) + ": ";
        if (tr.j != static_cast<int>(i) + 1) throw DataError(at + "trial indices must run 1..J in order");
        if (tr.s != 0 && tr.s != 1) throw DataError(at + "state must be 0 or 1");
        if (tr.a != 0 && tr.a != 1) throw DataError(at + "action must be 0 or 1");
        if (!std::isfinite(tr.t) || tr.t <= 0.0) throw DataError(at + "response time must be positive");
        if (!std::isfinite(tr.r) || tr.r < 0.0) throw DataError(at + "reward must be finite and >= 0");
    }
}

void validate(const Dataset& data) {
    if (data.subjects.empty()) throw DataError("dataset has no subjects");
    const std::size_t p = data.num_covariates();
    for (const auto& s : data.subjects) {
        if (s.covariates.size() != p)
            throw DataError("subject '" + s.id + "': covariate dimension differs from the first subject");
        validate(s);
    }
}

}  // namespace rlhmmddm
