#include "rlhmmddm/params.hpp"

#include <cmath>
#include <string>

#include "rlhmmddm/types.hpp"

namespace rlhmmddm {

void ChainParams::validate(std::size_t p, bool allow_degenerate) const {
    const bool ok_pi = allow_degenerate ? (pi1 >= 0.0 && pi1 <= 1.0) : (pi1 > 0.0 && pi1 < 1.0);
    if (!ok_pi) throw DomainError("chain: initial engaged probability out of range: " + std::to_string(pi1));
    if (zeta0.size() != p + 1 || zeta1.size() != p + 1)
        throw DomainError("chain: transition coefficients need " + std::to_string(p + 1) + " entries");
    for (double z : zeta0)
        if (!std::isfinite(z)) throw DomainError("chain: non-finite transition coefficient");
    for (double z : zeta1)
        if (!std::isfinite(z)) throw DomainError("chain: non-finite transition coefficient");
}

void ModelParams::validate() const {
    auto positive = [](double x, const char* name) {
        if (!std::isfinite(x) || x <= 0.0) throw DomainError(std::string("params: ") + name + " must be positive");
    };
    positive(alpha0, "alpha0");
    positive(alpha1, "alpha1");
    if (!(b > 0.0 && b < 1.0)) throw DomainError("params: b must lie in (0,1)");
    if (!std::isfinite(c) || c < 0.0) throw DomainError("params: c must be >= 0");
    if (!std::isfinite(tau) || tau < 0.0) throw DomainError("params: tau must be >= 0");
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("params: beta must lie in (0,1)");
    if (!std::isfinite(rho)) throw DomainError("params: rho must be finite");
}

}  // namespace rlhmmddm
