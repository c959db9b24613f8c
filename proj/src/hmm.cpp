#include "rlhmmddm/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "rlhmmddm/simd.hpp"
#include "rlhmmddm/wfpt.hpp"

namespace rlhmmddm::hmm {

double logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

Mat2 transition_matrix(const ChainParams& chain, std::span<const double> x) {
    if (chain.zeta0.size() != x.size() + 1 || chain.zeta1.size() != x.size() + 1)
        throw DomainError("hmm: covariate dimension " + std::to_string(x.size()) +
                          " does not match the transition coefficients");
    Mat2 P{};
    const std::vector<double>* zeta[2] = {&chain.zeta0, &chain.zeta1};
    for (int k = 0; k < 2; ++k) {
        double eta = (*zeta[k])[0];
        for (std::size_t m = 0; m < x.size(); ++m) eta += (*zeta[k])[m + 1] * x[m];
        const double p = logistic(eta);
        P[k] = {1.0 - p, p};
    }
    return P;
}

std::vector<Vec2> log_emissions(const SubjectData& subject, const ModelParams& theta, double q_init) {
    theta.validate();
    const std::size_t J = subject.trials.size();
    std::vector<double> rt(J), drift(J), engaged(J), lapsed(J);
    std::vector<std::uint8_t> choice(J);
    const std::vector<double> z = rl::trajectory_contrasts(subject, theta.beta, q_init);
    for (std::size_t j = 0; j < J; ++j) {
        rt[j] = subject.trials[j].t;
        choice[j] = static_cast<std::uint8_t>(subject.trials[j].a);
        drift[j] = theta.c * z[j];
    }
    simd::wfpt_log_density({theta.alpha1, theta.b, theta.tau}, rt, choice, drift, engaged);
    std::fill(drift.begin(), drift.end(), 0.0);
    simd::wfpt_log_density({theta.alpha0, 0.5, theta.tau}, rt, choice, drift, lapsed);
    std::vector<Vec2> out(J);
    for (std::size_t j = 0; j < J; ++j) out[j] = {lapsed[j], engaged[j]};
    return out;
}

std::vector<Vec2> emissions(const SubjectData& subject, const ModelParams& theta, double q_init) {
    std::vector<Vec2> out = log_emissions(subject, theta, q_init);
    for (auto& row : out)
        for (double& e : row) e = std::max(std::exp(e), wfpt::kDensityFloor);
    return out;
}

double Posteriors::loglik() const {
    double total = 0.0;
    for (const auto& s : subjects) total += s.loglik;
    return total;
}

namespace {

void check_chain(const Vec2& pi, const Mat2& P) {
    auto stochastic = [](const Vec2& r) {
        return r[0] >= 0.0 && r[1] >= 0.0 && std::fabs(r[0] + r[1] - 1.0) < 1e-12;
    };
    if (!stochastic(pi) || !stochastic(P[0]) || !stochastic(P[1]))
        throw DomainError("hmm: initial distribution and transition rows must be stochastic");
}

}  // namespace

SubjectPosteriors forward_backward(std::span<const Vec2> eta, const Vec2& pi, const Mat2& P) {
    const std::size_t J = eta.size();
    if (J == 0) throw DataError("hmm: forward-backward needs at least one trial");
    check_chain(pi, P);

    std::vector<Vec2> fwd(J);
    std::vector<double> scale(J);
    SubjectPosteriors out;

    for (std::size_t j = 0; j < J; ++j) {
        Vec2 a;
        if (j == 0) {
            a = {pi[0] * eta[0][0], pi[1] * eta[0][1]};
        } else {
            const Vec2& prev = fwd[j - 1];
            for (int k = 0; k < 2; ++k) a[k] = eta[j][k] * (prev[0] * P[0][k] + prev[1] * P[1][k]);
        }
        const double c = a[0] + a[1];
        if (!(c > 0.0) || !std::isfinite(c))
            throw DomainError("hmm: forward normaliser vanished at trial " + std::to_string(j + 1));
        fwd[j] = {a[0] / c, a[1] / c};
        scale[j] = c;
        out.loglik += std::log(c);
    }

    std::vector<Vec2> bwd(J);
    bwd[J - 1] = {1.0, 1.0};
    for (std::size_t j = J - 1; j-- > 0;) {
        for (int k = 0; k < 2; ++k)
            bwd[j][k] = (P[k][0] * eta[j + 1][0] * bwd[j + 1][0] + P[k][1] * eta[j + 1][1] * bwd[j + 1][1]) /
                        scale[j + 1];
    }

    out.gamma.resize(J);
    for (std::size_t j = 0; j < J; ++j) {
        const double g0 = fwd[j][0] * bwd[j][0], g1 = fwd[j][1] * bwd[j][1];
        const double s = g0 + g1;  // 1 up to rounding
        out.gamma[j] = {g0 / s, g1 / s};
    }
    out.xi.resize(J - 1);
    for (std::size_t j = 0; j + 1 < J; ++j) {
        Mat2 x{};
        double s = 0.0;
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) {
                x[k][l] = fwd[j][k] * P[k][l] * eta[j + 1][l] * bwd[j + 1][l];
                s += x[k][l];
            }
        for (auto& row : x)
            for (double& v : row) v /= s;
        out.xi[j] = x;
    }
    return out;
}

SubjectPosteriors forward_backward_log(std::span<const Vec2> log_eta, const Vec2& pi, const Mat2& P) {
    std::vector<Vec2> eta(log_eta.size());
    double offset = 0.0;
    for (std::size_t j = 0; j < log_eta.size(); ++j) {
        const double m = std::max(log_eta[j][0], log_eta[j][1]);
        eta[j] = {std::exp(log_eta[j][0] - m), std::exp(log_eta[j][1] - m)};
        offset += m;
    }
    SubjectPosteriors out = forward_backward(eta, pi, P);
    out.loglik += offset;
    return out;
}

ActionPosterior posterior_action(double t, int k, int s, const rl::QTable& q, const ModelParams& theta) {
    if (k != 0 && k != 1) throw DomainError("hmm: latent state must be 0 or 1");
    if (s != 0 && s != 1) throw DomainError("hmm: state must be 0 or 1");
    const wfpt::DdmParams p = k == 0 ? wfpt::DdmParams{theta.alpha0, 0.5, 0.0, theta.tau}
                                     : wfpt::DdmParams{theta.alpha1, theta.b, theta.c * rl::contrast(q, s), theta.tau};
    const double l0 = wfpt::log_joint_density(t, 0, p);
    const double l1 = wfpt::log_joint_density(t, 1, p);
    ActionPosterior out;
    if (l0 <= wfpt::kLogDensityFloor && l1 <= wfpt::kLogDensityFloor) {
        out.degenerate = true;
        return out;
    }
    const double p1 = logistic(l1 - l0);
    out.prob = {1.0 - p1, p1};
    return out;
}

}  // namespace rlhmmddm::hmm
