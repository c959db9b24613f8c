#include "rlhmmddm/rl.hpp"

#include <cmath>
#include <string>

namespace rlhmmddm::rl {

namespace {

void check_beta(double beta) {
    if (!(beta > 0.0 && beta < 1.0))
        throw DomainError("rl: learning rate must lie in (0,1), got " + std::to_string(beta));
}

void check_trial(const TrialRecord& tr, std::size_t index) {
    if ((tr.s != 0 && tr.s != 1) || (tr.a != 0 && tr.a != 1) || !std::isfinite(tr.r))
        throw DataError("rl: trial " + std::to_string(index + 1) + " has an invalid state, action or reward");
}

}  // namespace

QTable init_q(double initial) {
    QTable t;
    for (auto& row : t.q) row.fill(initial);
    return t;
}

QTable update(const QTable& q, int s, int a, double r, double beta) {
    check_beta(beta);
    QTable out = q;
    out.q[a][s] = (1.0 - beta) * q.q[a][s] + beta * r;
    return out;
}

double contrast(const QTable& q, int s) { return q.q[1][s] - q.q[0][s]; }

std::vector<double> trajectory_contrasts(const SubjectData& subject, double beta, double initial) {
    check_beta(beta);
    std::vector<double> z;
    z.reserve(subject.trials.size());
    QTable q = init_q(initial);
    for (std::size_t j = 0; j < subject.trials.size(); ++j) {
        const TrialRecord& tr = subject.trials[j];
        check_trial(tr, j);
        z.push_back(contrast(q, tr.s));
        q.q[tr.a][tr.s] = (1.0 - beta) * q.q[tr.a][tr.s] + beta * tr.r;
    }
    return z;
}

ContrastPath trajectory_contrasts_with_derivative(const SubjectData& subject, double beta, double initial) {
    check_beta(beta);
    ContrastPath out;
    out.z.reserve(subject.trials.size());
    out.dz_dbeta.reserve(subject.trials.size());
    QTable q = init_q(initial);
    QTable dq = init_q(0.0);
    for (std::size_t j = 0; j < subject.trials.size(); ++j) {
        const TrialRecord& tr = subject.trials[j];
        check_trial(tr, j);
        out.z.push_back(contrast(q, tr.s));
        out.dz_dbeta.push_back(contrast(dq, tr.s));
        double& cell = q.q[tr.a][tr.s];
        double& dcell = dq.q[tr.a][tr.s];
        // d/dbeta of (1 - beta) Q + beta r
        dcell = (1.0 - beta) * dcell + (tr.r - cell);
        cell = (1.0 - beta) * cell + beta * tr.r;
    }
    return out;
}

}  // namespace rlhmmddm::rl
