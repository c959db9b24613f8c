#include "rlhmmddm/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "rlhmmddm/optimize.hpp"
#include "rlhmmddm/parallel.hpp"
#include "rlhmmddm/rl.hpp"
#include "rlhmmddm/simd.hpp"
#include "rlhmmddm/wfpt.hpp"

namespace rlhmmddm::fit {

namespace {

constexpr double kPiClip = 1e-8;
constexpr double kInf = std::numeric_limits<double>::infinity();

double logit(double p) { return std::log(p / (1.0 - p)); }

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

// log logistic(x)
double log_sigmoid(double x) { return -softplus(-x); }

bool relative_converged(double before, double after, double tol) {
    return std::fabs(after - before) / (std::fabs(before) + 1.0) < tol;
}

std::size_t covariate_dim(const Dataset& data) { return data.num_covariates(); }

std::vector<double> zeros(std::size_t n) { return std::vector<double>(n, 0.0); }

void check_dataset(const Dataset& data) {
    validate(data);
    if (data.subjects.empty()) throw DataError("fit: empty dataset");
}

}  // namespace

std::string to_string(Model m) {
    switch (m) {
        case Model::rl_hmm_ddm: return "rl-hmm-ddm";
        case Model::rl_ddm: return "rl-ddm";
        case Model::rl_hmm: return "rl-hmm";
    }
    return "unknown";
}

Model parse_model(const std::string& name) {
    if (name == "rl-hmm-ddm") return Model::rl_hmm_ddm;
    if (name == "rl-ddm") return Model::rl_ddm;
    if (name == "rl-hmm") return Model::rl_hmm;
    throw DomainError("unknown model '" + name + "' (expected rl-hmm-ddm, rl-ddm or rl-hmm)");
}

void FitConfig::validate() const {
    if (max_em_iter < 1 || inner_max_iter < 1 || restarts < 1 || direct_max_iter < 1)
        throw DomainError("fit config: iteration counts and restarts must be positive");
    if (!(em_tol > 0.0) || !(inner_grad_tol > 0.0) || !(fd_step > 0.0))
        throw DomainError("fit config: tolerances must be positive");
    if (threads < 1) throw DomainError("fit config: threads must be >= 1");
    if (!std::isfinite(q_init)) throw DomainError("fit config: q_init must be finite");
}

double tau_upper_bound(const Dataset& data) {
    const double m = data.min_rt() - kTauMargin;
    if (!(m > 0.0)) throw DataError("fit: minimum response time must exceed 1e-4 s");
    return m;
}

ThetaVec transform(const ModelParams& p, double tau_max) {
    if (!(p.alpha0 > 0.0) || !(p.alpha1 > 0.0) || !(p.c > 0.0))
        throw DomainError("transform: alpha0, alpha1 and c must be positive");
    if (!(p.b > 0.0 && p.b < 1.0) || !(p.beta > 0.0 && p.beta < 1.0))
        throw DomainError("transform: b and beta must lie strictly inside (0,1)");
    if (!(p.tau > 0.0 && p.tau < tau_max))
        throw DomainError("transform: tau must lie strictly inside (0, tau_max)");
    ThetaVec x{};
    x[kAlpha0] = std::log(p.alpha0);
    x[kAlpha1] = std::log(p.alpha1);
    x[kB] = logit(p.b);
    x[kC] = std::log(p.c);
    x[kTau] = logit(p.tau / tau_max);
    x[kBeta] = logit(p.beta);
    return x;
}

ModelParams untransform(const ThetaVec& x, double tau_max, const ModelParams& base) {
    ModelParams p = base;
    p.alpha0 = std::exp(x[kAlpha0]);
    p.alpha1 = std::exp(x[kAlpha1]);
    p.b = hmm::logistic(x[kB]);
    p.c = std::exp(x[kC]);
    p.tau = tau_max * hmm::logistic(x[kTau]);
    p.beta = hmm::logistic(x[kBeta]);
    return p;
}

hmm::Vec2 initial_distribution(const ModelParams& theta, bool freeze_engaged) {
    if (freeze_engaged) return {0.0, 1.0};
    return {1.0 - theta.chain.pi1, theta.chain.pi1};
}

hmm::Mat2 subject_transitions(const ModelParams& theta, const SubjectData& subject, bool freeze_engaged) {
    if (freeze_engaged) return {hmm::Vec2{0.5, 0.5}, hmm::Vec2{0.0, 1.0}};
    return hmm::transition_matrix(theta.chain, subject.covariates);
}

hmm::Posteriors e_step(const Dataset& data, const ModelParams& theta, const FitConfig& cfg) {
    if (data.subjects.empty()) throw DataError("fit: empty dataset");
    hmm::Posteriors post;
    post.subjects.resize(data.subjects.size());
    const hmm::Vec2 pi = initial_distribution(theta, cfg.freeze_engaged);
    parallel_for(data.subjects.size(), cfg.threads, [&](std::size_t i) {
        const SubjectData& s = data.subjects[i];
        const auto log_eta = hmm::log_emissions(s, theta, cfg.q_init);
        post.subjects[i] = hmm::forward_backward_log(log_eta, pi, subject_transitions(theta, s, cfg.freeze_engaged));
    });
    return post;
}

double observed_loglik(const Dataset& data, const ModelParams& theta, const FitConfig& cfg) {
    return e_step(data, theta, cfg).loglik();
}

double m_step_pi(const hmm::Posteriors& post) {
    if (post.subjects.empty()) throw DataError("fit: no posteriors");
    double sum = 0.0;
    for (const auto& s : post.subjects) sum += s.gamma.front()[1];
    const double pi1 = sum / static_cast<double>(post.subjects.size());
    return std::clamp(pi1, kPiClip, 1.0 - kPiClip);
}

double zeta_objective(const hmm::Posteriors& post, const Dataset& data, int k, std::span<const double> zeta,
                      std::span<double> grad) {
    const std::size_t p = covariate_dim(data);
    if (zeta.size() != p + 1) throw DomainError("fit: zeta has the wrong length");
    std::fill(grad.begin(), grad.end(), 0.0);
    double f = 0.0;
    for (std::size_t i = 0; i < data.subjects.size(); ++i) {
        double w0 = 0.0, w1 = 0.0;
        for (const auto& x : post.subjects[i].xi) {
            w0 += x[k][0];
            w1 += x[k][1];
        }
        const auto& cov = data.subjects[i].covariates;
        double eta = zeta[0];
        for (std::size_t m = 0; m < p; ++m) eta += zeta[m + 1] * cov[m];
        f += -w1 * eta + (w0 + w1) * softplus(eta);
        if (!grad.empty()) {
            const double r = -w1 + (w0 + w1) * hmm::logistic(eta);
            grad[0] += r;
            for (std::size_t m = 0; m < p; ++m) grad[m + 1] += r * cov[m];
        }
    }
    return f;
}

MStepOutcome m_step_zeta(const hmm::Posteriors& post, const Dataset& data, int k,
                         const std::vector<double>& zeta_init, const FitConfig& cfg) {
    MStepOutcome out;
    out.value = zeta_init;
    double total = 0.0;
    for (const auto& s : post.subjects)
        for (const auto& x : s.xi) total += x[k][0] + x[k][1];
    out.objective_before = zeta_objective(post, data, k, zeta_init);
    out.objective_after = out.objective_before;
    if (!(total > 0.0)) {
        out.warning = "no transitions out of state " + std::to_string(k) + "; zeta left at its initial value";
        return out;
    }
    opt::BfgsOptions o;
    o.max_iter = cfg.inner_max_iter;
    o.grad_tol = cfg.inner_grad_tol;
    auto obj = [&](std::span<const double> z, std::span<double> g) { return zeta_objective(post, data, k, z, g); };
    const opt::BfgsResult r = opt::bfgs(obj, zeta_init, o);
    if (std::isfinite(r.f) && r.f <= out.objective_before) {
        out.value = r.x;
        out.objective_after = r.f;
    } else {
        out.improved = false;
        out.warning = "zeta update did not improve its objective; kept the previous value";
    }
    return out;
}

std::vector<std::vector<double>> engaged_weights(const hmm::Posteriors& post) {
    std::vector<std::vector<double>> w(post.subjects.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        const auto& g = post.subjects[i].gamma;
        w[i].resize(g.size());
        for (std::size_t j = 0; j < g.size(); ++j) w[i][j] = g[j][1];
    }
    return w;
}

namespace {

struct SubjectTerm {
    double f = 0.0;
    ThetaVec g{};  // natural-scale partial derivatives
};

SubjectTerm theta_subject_term(const SubjectData& s, std::span<const double> w1, const ModelParams& th,
                               double q_init, bool want_grad) {
    const std::size_t J = s.trials.size();
    std::vector<double> rt(J), drift(J), ll(J);
    std::vector<std::uint8_t> ch(J);
    for (std::size_t j = 0; j < J; ++j) {
        rt[j] = s.trials[j].t;
        ch[j] = static_cast<std::uint8_t>(s.trials[j].a);
    }
    SubjectTerm out;
    std::vector<double> ga, gb, gv, gt;
    simd::WfptGradient grad;
    if (want_grad) {
        ga.resize(J), gb.resize(J), gv.resize(J), gt.resize(J);
        grad = {ga, gb, gv, gt};
    }

    bool any_engaged = false, any_lapsed = false;
    for (double w : w1) {
        any_engaged = any_engaged || w > 0.0;
        any_lapsed = any_lapsed || w < 1.0;
    }

    if (any_engaged) {
        rl::ContrastPath path;
        if (want_grad)
            path = rl::trajectory_contrasts_with_derivative(s, th.beta, q_init);
        else
            path.z = rl::trajectory_contrasts(s, th.beta, q_init);
        for (std::size_t j = 0; j < J; ++j) drift[j] = th.c * path.z[j];
        simd::wfpt_log_density({th.alpha1, th.b, th.tau}, rt, ch, drift, ll, want_grad ? &grad : nullptr);
        for (std::size_t j = 0; j < J; ++j) {
            const double w = w1[j];
            out.f -= w * ll[j];
            if (want_grad) {
                out.g[kAlpha1] -= w * ga[j];
                out.g[kB] -= w * gb[j];
                out.g[kC] -= w * gv[j] * path.z[j];
                out.g[kBeta] -= w * gv[j] * th.c * path.dz_dbeta[j];
                out.g[kTau] -= w * gt[j];
            }
        }
    }
    if (any_lapsed) {
        std::fill(drift.begin(), drift.end(), 0.0);
        simd::wfpt_log_density({th.alpha0, 0.5, th.tau}, rt, ch, drift, ll, want_grad ? &grad : nullptr);
        for (std::size_t j = 0; j < J; ++j) {
            const double w = 1.0 - w1[j];
            out.f -= w * ll[j];
            if (want_grad) {
                out.g[kAlpha0] -= w * ga[j];
                out.g[kTau] -= w * gt[j];
            }
        }
    }
    return out;
}

}  // namespace

double theta_objective(const Dataset& data, const std::vector<std::vector<double>>& engaged_weight,
                       const ModelParams& theta, double tau_max, const FitConfig& cfg, ThetaVec* grad) {
    if (engaged_weight.size() != data.subjects.size()) throw DomainError("fit: weight matrix has the wrong shape");
    std::vector<SubjectTerm> terms(data.subjects.size());
    parallel_for(data.subjects.size(), cfg.threads, [&](std::size_t i) {
        if (engaged_weight[i].size() != data.subjects[i].trials.size())
            throw DomainError("fit: weight matrix has the wrong shape");
        terms[i] = theta_subject_term(data.subjects[i], engaged_weight[i], theta, cfg.q_init, grad != nullptr);
    });
    double f = 0.0;
    ThetaVec g{};
    for (const auto& t : terms) {
        f += t.f;
        for (int k = 0; k < kThetaDim; ++k) g[k] += t.g[k];
    }
    if (grad) {
        g[kAlpha0] *= theta.alpha0;
        g[kAlpha1] *= theta.alpha1;
        g[kB] *= theta.b * (1.0 - theta.b);
        g[kC] *= theta.c;
        g[kTau] *= theta.tau * (1.0 - theta.tau / tau_max);
        g[kBeta] *= theta.beta * (1.0 - theta.beta);
        *grad = g;
    }
    return f;
}

namespace {

std::vector<int> free_indices(const ThetaMask& fixed) {
    std::vector<int> idx;
    for (int k = 0; k < kThetaDim; ++k)
        if (!fixed[k]) idx.push_back(k);
    return idx;
}

// Transformed value of coordinate k (only called for free coordinates).
double to_free(const ModelParams& p, int k, double tau_max) {
    switch (k) {
        case kAlpha0: return std::log(p.alpha0);
        case kAlpha1: return std::log(p.alpha1);
        case kB: return logit(p.b);
        case kC: return std::log(p.c);
        case kTau: return logit(p.tau / tau_max);
        case kBeta: return logit(p.beta);
        default: break;
    }
    throw std::logic_error("bad theta index");
}

void set_free(ModelParams& p, int k, double x, double tau_max) {
    switch (k) {
        case kAlpha0: p.alpha0 = std::exp(x); break;
        case kAlpha1: p.alpha1 = std::exp(x); break;
        case kB: p.b = hmm::logistic(x); break;
        case kC: p.c = std::exp(x); break;
        case kTau: p.tau = tau_max * hmm::logistic(x); break;
        case kBeta: p.beta = hmm::logistic(x); break;
        default: throw std::logic_error("bad theta index");
    }
}

}  // namespace

ThetaStep m_step_theta(const Dataset& data, const std::vector<std::vector<double>>& engaged_weight,
                       const ModelParams& init, double tau_max, const FitConfig& cfg,
                       std::span<const double> inv_hessian) {
    const std::vector<int> idx = free_indices(cfg.fixed);
    ThetaStep out;
    out.params = init;
    std::vector<double> x0(idx.size());
    for (std::size_t m = 0; m < idx.size(); ++m) x0[m] = to_free(init, idx[m], tau_max);

    auto build = [&](std::span<const double> x) {
        ModelParams p = init;
        for (std::size_t m = 0; m < idx.size(); ++m) set_free(p, idx[m], x[m], tau_max);
        return p;
    };
    auto value = [&](std::span<const double> x) {
        try {
            return theta_objective(data, engaged_weight, build(x), tau_max, cfg);
        } catch (const DomainError&) {
            return kInf;  // saturated transform, e.g. b rounded to 1
        }
    };
    opt::Objective obj;
    if (cfg.analytic_gradient) {
        obj = [&](std::span<const double> x, std::span<double> g) {
            try {
                if (g.empty()) return theta_objective(data, engaged_weight, build(x), tau_max, cfg);
                ThetaVec full{};
                const double f = theta_objective(data, engaged_weight, build(x), tau_max, cfg, &full);
                for (std::size_t m = 0; m < idx.size(); ++m) g[m] = full[idx[m]];
                return f;
            } catch (const DomainError&) {
                return kInf;
            }
        };
    } else {
        obj = opt::with_central_differences(value, cfg.fd_step);
    }

    opt::BfgsOptions o;
    o.max_iter = cfg.inner_max_iter;
    o.grad_tol = cfg.inner_grad_tol;
    const opt::BfgsResult r = opt::bfgs(obj, x0, o, inv_hessian);
    out.objective_before = r.f_initial;
    out.inv_hessian = r.inv_hessian;
    if (std::isfinite(r.f) && r.f <= r.f_initial) {
        out.params = build(r.x);
        out.objective_after = r.f;
    } else {
        out.improved = false;
        out.objective_after = r.f_initial;
    }
    return out;
}

ModelParams random_init(const Dataset& data, std::uint64_t seed, int restart, Model model) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(restart), 0x5eedu};
    std::mt19937_64 rng(seq);
    auto unif = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    std::normal_distribution<double> normal(0.0, 1.0);
    const double min_rt = data.min_rt();

    ModelParams p;
    p.beta = unif(0.01, 0.2);
    p.alpha0 = unif(0.5, 2.5);
    p.alpha1 = unif(0.5, 2.5);
    p.b = unif(0.4, 0.6);
    p.c = unif(0.5, 4.0);
    p.tau = unif(0.2, 0.8) * min_rt;
    p.chain.pi1 = unif(0.7, 0.99);
    const std::size_t dim = data.num_covariates();
    p.chain.zeta0 = zeros(dim + 1);
    p.chain.zeta1 = zeros(dim + 1);
    p.chain.zeta0[0] = normal(rng);
    p.chain.zeta1[0] = normal(rng);
    p.rho = unif(1.0, 6.0);
    if (model == Model::rl_ddm) {
        p.rho = 0.0;
        p.chain.pi1 = 1.0;
        std::fill(p.chain.zeta0.begin(), p.chain.zeta0.end(), 0.0);
        std::fill(p.chain.zeta1.begin(), p.chain.zeta1.end(), 0.0);
    }
    return p;
}

namespace {

// Puts a warm start back inside the feasible region of this dataset.
ModelParams prepare_init(ModelParams p, const Dataset& data, double tau_max) {
    if (!(p.tau > 0.0 && p.tau < tau_max)) p.tau = 0.5 * tau_max;
    const std::size_t dim = data.num_covariates();
    if (p.chain.zeta0.size() != dim + 1) p.chain.zeta0 = zeros(dim + 1);
    if (p.chain.zeta1.size() != dim + 1) p.chain.zeta1 = zeros(dim + 1);
    p.chain.pi1 = std::clamp(p.chain.pi1, kPiClip, 1.0 - kPiClip);
    return p;
}

bool better(const FitResult& a, const FitResult& b) {
    if (!std::isfinite(b.loglik)) return std::isfinite(a.loglik);
    return a.loglik > b.loglik;
}

template <class RunOne>
FitResult best_of_restarts(Model model, const Dataset& data, const FitConfig& cfg, double tau_max, RunOne&& run) {
    FitResult best;
    best.loglik = -kInf;
    std::vector<RestartSummary> summaries;
    std::vector<std::string> failures;
    bool have = false;
    for (int r = 0; r < cfg.restarts; ++r) {
        ModelParams init = (r == 0 && cfg.init) ? *cfg.init : random_init(data, cfg.seed, r, model);
        init = prepare_init(init, data, tau_max);
        try {
            FitResult cand = run(init);
            summaries.push_back({cand.loglik, cand.iterations, cand.converged, cand.loglik_trace});
            if (!have || better(cand, best)) {
                best = std::move(cand);
                best.best_restart = r;
                have = true;
            }
        } catch (const DomainError& e) {
            summaries.push_back({-kInf, 0, false, {}});
            failures.push_back("restart " + std::to_string(r) + " failed: " + e.what());
        }
    }
    if (!have) throw DomainError("fit: every restart failed");
    best.model = model;
    best.restarts = std::move(summaries);
    best.warnings.insert(best.warnings.end(), failures.begin(), failures.end());
    return best;
}

void add_warning(std::vector<std::string>& w, const std::string& msg) {
    if (!msg.empty() && std::find(w.begin(), w.end(), msg) == w.end()) w.push_back(msg);
}

}  // namespace

FitResult fit_rl_hmm_ddm(const Dataset& data, const FitConfig& cfg) {
    check_dataset(data);
    cfg.validate();
    const double tau_max = tau_upper_bound(data);

    auto run = [&](const ModelParams& init) {
        FitResult res;
        ModelParams theta = init;
        hmm::Posteriors post = e_step(data, theta, cfg);
        double L = post.loglik();
        res.loglik_trace.push_back(L);
        std::vector<double> H;
        for (int it = 1; it <= cfg.max_em_iter; ++it) {
            ModelParams next = theta;
            if (!cfg.freeze_engaged) {
                next.chain.pi1 = m_step_pi(post);
                for (int k = 0; k < 2; ++k) {
                    auto& zeta = k == 0 ? next.chain.zeta0 : next.chain.zeta1;
                    const MStepOutcome z = m_step_zeta(post, data, k, zeta, cfg);
                    zeta = z.value;
                    if (!z.improved) ++res.mstep_violations;
                    add_warning(res.warnings, z.warning);
                }
            }
            const ThetaStep ts = m_step_theta(data, engaged_weights(post), theta, tau_max, cfg, H);
            H = ts.inv_hessian;
            if (!ts.improved) ++res.mstep_violations;
            next.alpha0 = ts.params.alpha0;
            next.alpha1 = ts.params.alpha1;
            next.b = ts.params.b;
            next.c = ts.params.c;
            next.tau = ts.params.tau;
            next.beta = ts.params.beta;

            hmm::Posteriors next_post = e_step(data, next, cfg);
            const double L_next = next_post.loglik();
            res.loglik_trace.push_back(L_next);
            theta = next;
            post = std::move(next_post);
            res.iterations = it;
            const bool done = relative_converged(L, L_next, cfg.em_tol);
            L = L_next;
            if (done) {
                res.converged = true;
                break;
            }
        }
        if (!res.converged) add_warning(res.warnings, "EM reached the iteration limit before converging");
        res.params = theta;
        res.loglik = L;
        res.posteriors = std::move(post);
        return res;
    };
    return best_of_restarts(Model::rl_hmm_ddm, data, cfg, tau_max, run);
}

FitResult fit_rl_ddm(const Dataset& data, const FitConfig& cfg) {
    check_dataset(data);
    cfg.validate();
    const double tau_max = tau_upper_bound(data);
    std::vector<std::vector<double>> ones(data.subjects.size());
    for (std::size_t i = 0; i < ones.size(); ++i) ones[i].assign(data.subjects[i].trials.size(), 1.0);

    FitConfig inner = cfg;
    inner.fixed[kAlpha0] = true;
    inner.inner_max_iter = cfg.direct_max_iter;

    auto run = [&](const ModelParams& init) {
        FitResult res;
        ModelParams start = init;
        start.chain.pi1 = 1.0;
        const std::vector<int> idx = free_indices(inner.fixed);
        std::vector<double> x0(idx.size());
        for (std::size_t m = 0; m < idx.size(); ++m) x0[m] = to_free(start, idx[m], tau_max);
        auto build = [&](std::span<const double> x) {
            ModelParams p = start;
            for (std::size_t m = 0; m < idx.size(); ++m) set_free(p, idx[m], x[m], tau_max);
            return p;
        };
        opt::Objective obj;
        auto value = [&](std::span<const double> x) {
            try {
                return theta_objective(data, ones, build(x), tau_max, inner);
            } catch (const DomainError&) {
                return kInf;
            }
        };
        if (cfg.analytic_gradient) {
            obj = [&](std::span<const double> x, std::span<double> g) {
                try {
                    if (g.empty()) return theta_objective(data, ones, build(x), tau_max, inner);
                    ThetaVec full{};
                    const double f = theta_objective(data, ones, build(x), tau_max, inner, &full);
                    for (std::size_t m = 0; m < idx.size(); ++m) g[m] = full[idx[m]];
                    return f;
                } catch (const DomainError&) {
                    return kInf;
                }
            };
        } else {
            obj = opt::with_central_differences(value, cfg.fd_step);
        }
        opt::BfgsOptions o;
        o.max_iter = cfg.direct_max_iter;
        o.grad_tol = cfg.inner_grad_tol;
        o.record_trace = true;
        const opt::BfgsResult r = opt::bfgs(obj, x0, o);
        if (!std::isfinite(r.f)) throw DomainError("rl-ddm: objective not finite at the starting point");
        res.loglik_trace.push_back(-r.f_initial);
        for (double f : r.trace) res.loglik_trace.push_back(-f);
        res.params = build(r.x);
        res.loglik = -r.f;
        res.iterations = r.iterations;
        res.converged = r.converged;
        if (!r.converged) add_warning(res.warnings, "optimizer stopped: " + r.message);
        FitConfig frozen = cfg;
        frozen.freeze_engaged = true;
        res.posteriors = e_step(data, res.params, frozen);
        return res;
    };
    return best_of_restarts(Model::rl_ddm, data, cfg, tau_max, run);
}

// ---------------------------------------------------------------------------
// Softmax RL-HMM

std::vector<hmm::Vec2> softmax_log_emissions(const SubjectData& subject, const ModelParams& theta, double q_init) {
    const std::vector<double> z = rl::trajectory_contrasts(subject, theta.beta, q_init);
    std::vector<hmm::Vec2> out(z.size());
    const double log_half = -std::log(2.0);
    for (std::size_t j = 0; j < z.size(); ++j) {
        const double sign = subject.trials[j].a == 1 ? 1.0 : -1.0;
        out[j] = {log_half, log_sigmoid(sign * theta.rho * z[j])};
    }
    return out;
}

namespace {

hmm::Posteriors softmax_e_step(const Dataset& data, const ModelParams& theta, const FitConfig& cfg) {
    hmm::Posteriors post;
    post.subjects.resize(data.subjects.size());
    const hmm::Vec2 pi = initial_distribution(theta, cfg.freeze_engaged);
    parallel_for(data.subjects.size(), cfg.threads, [&](std::size_t i) {
        const SubjectData& s = data.subjects[i];
        post.subjects[i] = hmm::forward_backward_log(softmax_log_emissions(s, theta, cfg.q_init), pi,
                                                     subject_transitions(theta, s, cfg.freeze_engaged));
    });
    return post;
}

// -sum gamma_1 log Pr(a | engaged) over (logit beta, rho), with gradient.
double softmax_objective(const Dataset& data, const std::vector<std::vector<double>>& w1, double beta, double rho,
                         double q_init, std::span<double> grad) {
    double f = 0.0, g_beta = 0.0, g_rho = 0.0;
    for (std::size_t i = 0; i < data.subjects.size(); ++i) {
        const SubjectData& s = data.subjects[i];
        const rl::ContrastPath path = rl::trajectory_contrasts_with_derivative(s, beta, q_init);
        for (std::size_t j = 0; j < s.trials.size(); ++j) {
            const double w = w1[i][j];
            if (w == 0.0) continue;
            const double sign = s.trials[j].a == 1 ? 1.0 : -1.0;
            const double x = sign * rho * path.z[j];
            f -= w * log_sigmoid(x);
            const double r = 1.0 - hmm::logistic(x);  // d log_sigmoid / dx
            g_rho -= w * r * sign * path.z[j];
            g_beta -= w * r * sign * rho * path.dz_dbeta[j];
        }
    }
    if (!grad.empty()) {
        grad[0] = g_beta * beta * (1.0 - beta);
        grad[1] = g_rho;
    }
    return f;
}

}  // namespace

double softmax_observed_loglik(const Dataset& data, const ModelParams& theta, const FitConfig& cfg) {
    return softmax_e_step(data, theta, cfg).loglik();
}

FitResult fit_rl_hmm(const Dataset& data, const FitConfig& cfg) {
    check_dataset(data);
    cfg.validate();
    const double tau_max = tau_upper_bound(data);

    auto run = [&](const ModelParams& init) {
        FitResult res;
        ModelParams theta = init;
        hmm::Posteriors post = softmax_e_step(data, theta, cfg);
        double L = post.loglik();
        res.loglik_trace.push_back(L);
        std::vector<double> H;
        for (int it = 1; it <= cfg.max_em_iter; ++it) {
            ModelParams next = theta;
            if (!cfg.freeze_engaged) {
                next.chain.pi1 = m_step_pi(post);
                for (int k = 0; k < 2; ++k) {
                    auto& zeta = k == 0 ? next.chain.zeta0 : next.chain.zeta1;
                    const MStepOutcome z = m_step_zeta(post, data, k, zeta, cfg);
                    zeta = z.value;
                    if (!z.improved) ++res.mstep_violations;
                    add_warning(res.warnings, z.warning);
                }
            }
            const auto w1 = engaged_weights(post);
            auto obj = [&](std::span<const double> x, std::span<double> g) {
                return softmax_objective(data, w1, hmm::logistic(x[0]), x[1], cfg.q_init, g);
            };
            opt::BfgsOptions o;
            o.max_iter = cfg.inner_max_iter;
            o.grad_tol = cfg.inner_grad_tol;
            const opt::BfgsResult r = opt::bfgs(obj, {logit(theta.beta), theta.rho}, o, H);
            H = r.inv_hessian;
            const double new_beta = hmm::logistic(r.x[0]);
            if (std::isfinite(r.f) && r.f <= r.f_initial && new_beta > 0.0 && new_beta < 1.0) {
                next.beta = new_beta;
                next.rho = r.x[1];
            } else {
                ++res.mstep_violations;
            }
            hmm::Posteriors next_post = softmax_e_step(data, next, cfg);
            const double L_next = next_post.loglik();
            res.loglik_trace.push_back(L_next);
            theta = next;
            post = std::move(next_post);
            res.iterations = it;
            const bool done = relative_converged(L, L_next, cfg.em_tol);
            L = L_next;
            if (done) {
                res.converged = true;
                break;
            }
        }
        if (!res.converged) add_warning(res.warnings, "EM reached the iteration limit before converging");
        res.params = theta;
        res.loglik = L;
        res.posteriors = std::move(post);
        return res;
    };
    return best_of_restarts(Model::rl_hmm, data, cfg, tau_max, run);
}

hmm::Posteriors model_posteriors(Model m, const Dataset& data, const ModelParams& theta, const FitConfig& cfg) {
    check_dataset(data);
    FitConfig c = cfg;
    switch (m) {
        case Model::rl_hmm_ddm: return e_step(data, theta, c);
        case Model::rl_ddm:
            c.freeze_engaged = true;
            return e_step(data, theta, c);
        case Model::rl_hmm: return softmax_e_step(data, theta, c);
    }
    throw DomainError("fit: unknown model");
}

FitResult fit_model(Model m, const Dataset& data, const FitConfig& cfg) {
    switch (m) {
        case Model::rl_hmm_ddm: return fit_rl_hmm_ddm(data, cfg);
        case Model::rl_ddm: return fit_rl_ddm(data, cfg);
        case Model::rl_hmm: return fit_rl_hmm(data, cfg);
    }
    throw DomainError("fit: unknown model");
}

SoftmaxFit fit_rl_softmax_subject(const SubjectData& subject, double q_init) {
    validate(subject);
    Dataset one;
    one.subjects.push_back(subject);
    const std::vector<std::vector<double>> w1{std::vector<double>(subject.trials.size(), 1.0)};

    SoftmaxFit best;
    best.loglik = -kInf;
    auto obj = [&](std::span<const double> x, std::span<double> g) {
        return softmax_objective(one, w1, hmm::logistic(x[0]), x[1], q_init, g);
    };
    opt::BfgsOptions o;
    o.max_iter = 500;
    o.grad_tol = 1e-9;
    for (double b0 : {0.01, 0.05, 0.2, 0.5}) {
        const opt::BfgsResult r = opt::bfgs(obj, {logit(b0), 1.0}, o);
        if (std::isfinite(r.f) && -r.f > best.loglik) {
            best.loglik = -r.f;
            best.beta = hmm::logistic(r.x[0]);
            best.rho = r.x[1];
            best.converged = r.converged;
        }
    }
    bool same_action = true, same_reward = true;
    for (const auto& tr : subject.trials) {
        same_action = same_action && tr.a == subject.trials.front().a;
        same_reward = same_reward && tr.r == subject.trials.front().r;
    }
    best.boundary = same_action || same_reward;
    return best;
}

}  // namespace rlhmmddm::fit
