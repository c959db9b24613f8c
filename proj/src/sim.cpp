#include "rlhmmddm/sim.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "rlhmmddm/hmm.hpp"
#include "rlhmmddm/parallel.hpp"
#include "rlhmmddm/rl.hpp"

namespace rlhmmddm::sim {

ModelParams default_true_params() {
    ModelParams p;
    p.alpha0 = 1.0;
    p.alpha1 = 1.5;
    p.b = 0.6;
    p.c = 2.0;
    p.tau = 0.1;
    p.beta = 0.05;
    p.chain.pi1 = 0.8;
    p.chain.zeta0 = {-0.5, -0.5};
    p.chain.zeta1 = {1.0, 1.0};
    return p;
}

void SimConfig::validate() const {
    if (n < 1 || J < 1) throw DomainError("sim: n and J must be >= 1");
    true_params.validate();
    true_params.chain.validate(1);
    if (!(covariate_prob >= 0.0 && covariate_prob <= 1.0)) throw DomainError("sim: covariate_prob outside [0,1]");
    if (max_redraws < 1) throw DomainError("sim: max_redraws must be >= 1");
}

std::string subject_id(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "S%04d", index + 1);
    return buf;
}

namespace {

double draw_beta(std::mt19937_64& rng, double a, double b) {
    const double x = std::gamma_distribution<double>(a, 1.0)(rng);
    const double y = std::gamma_distribution<double>(b, 1.0)(rng);
    return x / (x + y);
}

void generate_subject(const SimConfig& cfg, int i, SubjectData& subject, std::vector<int>& u_out,
                      std::vector<double>& z_out) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const ModelParams& th = cfg.true_params;

    subject.id = subject_id(i);
    subject.covariates = {unif(rng) < cfg.covariate_prob ? 1.0 : 0.0};
    const hmm::Mat2 P = hmm::transition_matrix(th.chain, subject.covariates);

    rl::QTable q = rl::init_q(cfg.q_init);
    subject.trials.resize(cfg.J);
    u_out.resize(cfg.J);
    z_out.resize(cfg.J);
    int u = 1;
    for (int j = 0; j < cfg.J; ++j) {
        TrialRecord& tr = subject.trials[j];
        tr.j = j + 1;
        tr.s = unif(rng) < 0.5 ? 1 : 0;
        if (cfg.switching) {
            const double p_engaged = j == 0 ? th.chain.pi1 : P[u][1];
            u = unif(rng) < p_engaged ? 1 : 0;
        }
        const double z = rl::contrast(q, tr.s);
        const wfpt::DdmParams ddm = u == 1 ? wfpt::DdmParams{th.alpha1, th.b, th.c * z, th.tau}
                                           : wfpt::DdmParams{th.alpha0, 0.5, 0.0, th.tau};
        for (int attempt = 1;; ++attempt) {
            try {
                const wfpt::Draw d = wfpt::sample(ddm, rng, cfg.sampler);
                tr.t = d.t;
                tr.a = d.a;
                break;
            } catch (const wfpt::SamplingError&) {
                if (attempt >= cfg.max_redraws) throw;
            }
        }
        if (tr.a != tr.s) {
            tr.r = 0.0;
        } else if (cfg.setting == RewardSetting::bernoulli) {
            tr.r = unif(rng) < (tr.s == 1 ? 0.75 : 0.3) ? 1.0 : 0.0;
        } else {
            tr.r = tr.s == 1 ? draw_beta(rng, 3.0, 1.0) : draw_beta(rng, 1.0, 3.0);
        }
        u_out[j] = u;
        z_out[j] = z;
        q = rl::update(q, tr.s, tr.a, tr.r, th.beta);
    }
}

}  // namespace

SimOutput generate(const SimConfig& cfg, int threads) {
    cfg.validate();
    SimOutput out;
    out.dataset.subjects.resize(cfg.n);
    out.true_u.resize(cfg.n);
    out.true_z.resize(cfg.n);
    parallel_for(static_cast<std::size_t>(cfg.n), threads, [&](std::size_t i) {
        generate_subject(cfg, static_cast<int>(i), out.dataset.subjects[i], out.true_u[i], out.true_z[i]);
    });
    return out;
}

}  // namespace rlhmmddm::sim
