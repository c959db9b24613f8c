#pragma once
// Rescorla-Wagner expected-reward tables and the reward contrast that drives
// the engaged-state drift rate.

#include <array>
#include <vector>

#include "rlhmmddm/types.hpp"

namespace rlhmmddm::rl {

/// q[a][s]: expected reward for action a in state s.
struct QTable {
    std::array<std::array<double, 2>, 2> q{};
};

QTable init_q(double initial = 0.0);

/// Moves only the visited cell: q[a][s] <- (1 - beta) q[a][s] + beta r.
QTable update(const QTable& q, int s, int a, double r, double beta);

/// Z = q[1][s] - q[0][s].
double contrast(const QTable& q, int s);

/// Z_j before trial j's update, for j = 1..J. Learning happens on every trial.
std::vector<double> trajectory_contrasts(const SubjectData& subject, double beta, double initial = 0.0);

/// Contrasts together with dZ_j / dbeta, propagated through the recursion.
struct ContrastPath {
    std::vector<double> z;
    std::vector<double> dz_dbeta;
};
ContrastPath trajectory_contrasts_with_derivative(const SubjectData& subject, double beta,
                                                  double initial = 0.0);

}  // namespace rlhmmddm::rl
