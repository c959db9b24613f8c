#pragma once
// Model parameters shared by the chain, the emission model and the fitters.

#include <cstddef>
#include <vector>

namespace rlhmmddm {

/// Two-state chain: state 0 is lapsed, 1 is engaged.
struct ChainParams {
    double pi1 = 0.8;            // Pr(U_1 = engaged)
    std::vector<double> zeta0;   // intercept then slopes, transitions out of lapsed
    std::vector<double> zeta1;   // intercept then slopes, transitions out of engaged

    /// Throws DomainError unless 0 < pi1 < 1 (or exactly 0/1 when allow_degenerate),
    /// both vectors have length p + 1 and all entries are finite.
    void validate(std::size_t p, bool allow_degenerate = false) const;
};

struct ModelParams {
    double alpha0 = 1.0;  // lapsed boundary separation
    double alpha1 = 1.5;  // engaged boundary separation
    double b = 0.6;       // engaged relative bias
    double c = 2.0;       // drift scaling, v = c Z
    double tau = 0.1;     // non-decision time, seconds
    double beta = 0.05;   // learning rate
    double rho = 0.0;     // softmax reward sensitivity (RL-HMM only)
    ChainParams chain;

    /// Checks the bounds of the emission and learning parameters.
    void validate() const;
};

}  // namespace rlhmmddm
