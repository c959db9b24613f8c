#include "rlhmmddm/metrics.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <tuple>

#include "rlhmmddm/parallel.hpp"
#include "rlhmmddm/rl.hpp"

namespace rlhmmddm::metrics {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kZ975 = 1.96;

double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace

std::pair<double, double> rt_by_state(const SubjectData& subject, const std::vector<int>& u) {
    if (u.size() != subject.trials.size()) throw DomainError("metrics: state vector length differs from trials");
    double sum[2] = {0.0, 0.0};
    int count[2] = {0, 0};
    for (std::size_t j = 0; j < u.size(); ++j) {
        sum[u[j]] += subject.trials[j].t;
        ++count[u[j]];
    }
    return {count[1] ? sum[1] / count[1] : kNaN, count[0] ? sum[0] / count[0] : kNaN};
}

EngagementSummary engagement_summary(const hmm::Posteriors& post, const Dataset& data) {
    if (post.subjects.size() != data.subjects.size())
        throw DomainError("metrics: posteriors and dataset have different subject counts");
    EngagementSummary s;
    const std::size_t n = data.subjects.size();
    s.gamma1.resize(n);
    s.u_hat.resize(n);
    s.score.resize(n);
    s.rt_engaged.resize(n);
    s.rt_lapsed.resize(n);
    std::size_t max_j = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& g = post.subjects[i].gamma;
        if (g.size() != data.subjects[i].trials.size())
            throw DomainError("metrics: posterior length differs from the subject's trials");
        max_j = std::max(max_j, g.size());
        double acc = 0.0;
        for (const auto& row : g) {
            s.gamma1[i].push_back(row[1]);
            s.u_hat[i].push_back(row[1] >= 0.5 ? 1 : 0);
            acc += logit(std::clamp(row[1], kGammaClip, 1.0 - kGammaClip));
        }
        s.score[i] = g.empty() ? kNaN : acc / static_cast<double>(g.size());
        std::tie(s.rt_engaged[i], s.rt_lapsed[i]) = rt_by_state(data.subjects[i], s.u_hat[i]);
    }
    s.group_rate.assign(max_j, 0.0);
    for (std::size_t j = 0; j < max_j; ++j) {
        double acc = 0.0;
        std::size_t m = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (j < s.gamma1[i].size()) {
                acc += s.gamma1[i][j];
                ++m;
            }
        }
        s.group_rate[j] = acc / static_cast<double>(m);
    }
    return s;
}

Accuracy classification_accuracy(const std::vector<std::vector<int>>& pred,
                                 const std::vector<std::vector<int>>& truth, int window,
                                 const std::vector<std::vector<int>>* mask) {
    if (pred.size() != truth.size() || (mask && mask->size() != truth.size()))
        throw DomainError("metrics: prediction, truth and mask must cover the same subjects");
    if (window < 1) throw DomainError("metrics: accuracy window must be >= 1");
    Accuracy acc;
    acc.per_trial.assign(static_cast<std::size_t>(window), kNaN);
    std::size_t hits = 0;
    for (std::size_t j = 0; j < static_cast<std::size_t>(window); ++j) {
        std::size_t m = 0, h = 0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            if (pred[i].size() != truth[i].size() || (mask && (*mask)[i].size() != truth[i].size()))
                throw DomainError("metrics: prediction, truth and mask rows differ in length");
            if (j >= truth[i].size()) continue;
            if (mask && (*mask)[i][j] != 1) continue;
            ++m;
            h += pred[i][j] == truth[i][j] ? 1 : 0;
        }
        if (m > 0) acc.per_trial[j] = static_cast<double>(h) / static_cast<double>(m);
        acc.count += m;
        hits += h;
    }
    acc.overall = acc.count ? static_cast<double>(hits) / static_cast<double>(acc.count) : kNaN;
    return acc;
}

std::vector<std::vector<int>> observed_actions(const Dataset& data) {
    std::vector<std::vector<int>> a(data.subjects.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (const auto& tr : data.subjects[i].trials) a[i].push_back(tr.a);
    return a;
}

std::vector<std::vector<int>> predict_engaged_actions(fit::Model model, const ModelParams& theta,
                                                      const Dataset& data, double q_init) {
    std::vector<std::vector<int>> out(data.subjects.size());
    for (std::size_t i = 0; i < data.subjects.size(); ++i) {
        const SubjectData& s = data.subjects[i];
        rl::QTable q = rl::init_q(q_init);
        for (const auto& tr : s.trials) {
            double p1;
            if (model == fit::Model::rl_hmm)
                p1 = hmm::logistic(theta.rho * rl::contrast(q, tr.s));
            else
                p1 = hmm::posterior_action(tr.t, 1, tr.s, q, theta).prob[1];
            out[i].push_back(p1 >= 0.5 ? 1 : 0);
            q = rl::update(q, tr.s, tr.a, tr.r, theta.beta);
        }
    }
    return out;
}

std::vector<std::string> parameter_names(fit::Model model, std::size_t num_covariates) {
    std::vector<std::string> names;
    auto chain = [&] {
        names.push_back("pi1");
        for (int k = 0; k < 2; ++k)
            for (std::size_t m = 0; m <= num_covariates; ++m)
                names.push_back("zeta" + std::to_string(k) + "_" + std::to_string(m));
    };
    switch (model) {
        case fit::Model::rl_hmm_ddm:
            names = {"beta", "alpha1", "b", "c", "tau", "alpha0"};
            chain();
            break;
        case fit::Model::rl_ddm:
            names = {"beta", "alpha1", "b", "c", "tau"};
            break;
        case fit::Model::rl_hmm:
            names = {"beta", "rho"};
            chain();
            break;
    }
    return names;
}

std::vector<double> parameter_vector(fit::Model model, const ModelParams& p) {
    std::vector<double> v;
    auto chain = [&] {
        v.push_back(p.chain.pi1);
        v.insert(v.end(), p.chain.zeta0.begin(), p.chain.zeta0.end());
        v.insert(v.end(), p.chain.zeta1.begin(), p.chain.zeta1.end());
    };
    switch (model) {
        case fit::Model::rl_hmm_ddm:
            v = {p.beta, p.alpha1, p.b, p.c, p.tau, p.alpha0};
            chain();
            break;
        case fit::Model::rl_ddm:
            v = {p.beta, p.alpha1, p.b, p.c, p.tau};
            break;
        case fit::Model::rl_hmm:
            v = {p.beta, p.rho};
            chain();
            break;
    }
    return v;
}

BootstrapResult bootstrap(const Dataset& data, fit::Model model, const fit::FitResult& estimate,
                          const fit::FitConfig& fit_cfg, const BootstrapConfig& cfg) {
    if (cfg.replicates < 2) throw DomainError("bootstrap: need at least 2 replicates");
    if (data.subjects.empty()) throw DataError("bootstrap: empty dataset");
    const std::size_t n = data.subjects.size();
    const int B = cfg.replicates;

    fit::FitConfig inner = fit_cfg;
    inner.init = estimate.params;
    inner.restarts = 1;
    if (cfg.threads > 1) inner.threads = 1;

    std::vector<std::vector<double>> rows(B);
    std::vector<char> ok(B, 0);
    parallel_for(static_cast<std::size_t>(B), cfg.threads, [&](std::size_t b) {
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                          static_cast<std::uint32_t>(b), 0xb007u};
        std::mt19937_64 rng(seq);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        Dataset resampled;
        resampled.subjects.reserve(n);
        for (std::size_t i = 0; i < n; ++i) resampled.subjects.push_back(data.subjects[pick(rng)]);
        try {
            const fit::FitResult r = fit::fit_model(model, resampled, inner);
            if (r.converged) {
                rows[b] = parameter_vector(model, r.params);
                ok[b] = 1;
            }
        } catch (const DomainError&) {
        } catch (const DataError&) {
        }
    });

    BootstrapResult res;
    res.names = parameter_names(model, data.num_covariates());
    res.estimate = parameter_vector(model, estimate.params);
    for (int b = 0; b < B; ++b) {
        if (ok[b]) {
            res.replicates.push_back(rows[b]);
            res.replicate_index.push_back(b);
        } else {
            ++res.dropped;
        }
    }
    if (res.dropped > cfg.max_drop_fraction * B)
        throw DomainError("bootstrap: " + std::to_string(res.dropped) + " of " + std::to_string(B) +
                          " replicates failed to converge");
    if (res.replicates.size() < 2) throw DomainError("bootstrap: fewer than two usable replicates");

    const std::size_t dim = res.names.size();
    const double kept = static_cast<double>(res.replicates.size());
    res.bse.resize(dim);
    res.ci_lower.resize(dim);
    res.ci_upper.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        const bool is_pi = res.names[k] == "pi1";
        auto scale = [&](double x) {
            return is_pi ? logit(std::clamp(x, kGammaClip, 1.0 - kGammaClip)) : x;
        };
        double mean = 0.0;
        for (const auto& r : res.replicates) mean += scale(r[k]);
        mean /= kept;
        double ss = 0.0;
        for (const auto& r : res.replicates) ss += (scale(r[k]) - mean) * (scale(r[k]) - mean);
        const double sd = std::sqrt(ss / (kept - 1.0));
        if (is_pi) {
            const double centre = scale(res.estimate[k]);
            res.ci_lower[k] = hmm::logistic(centre - kZ975 * sd);
            res.ci_upper[k] = hmm::logistic(centre + kZ975 * sd);
            // Report the natural-scale standard error alongside the logit-scale interval.
            double m2 = 0.0, s2 = 0.0;
            for (const auto& r : res.replicates) m2 += r[k];
            m2 /= kept;
            for (const auto& r : res.replicates) s2 += (r[k] - m2) * (r[k] - m2);
            res.bse[k] = std::sqrt(s2 / (kept - 1.0));
        } else {
            res.bse[k] = sd;
            res.ci_lower[k] = res.estimate[k] - kZ975 * sd;
            res.ci_upper[k] = res.estimate[k] + kZ975 * sd;
        }
    }
    return res;
}

std::vector<double> bh_qvalues(const std::vector<double>& p) {
    const std::size_t m = p.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
    std::vector<double> q(m);
    double running = 1.0;
    for (std::size_t r = m; r-- > 0;) {
        const std::size_t idx = order[r];
        const double adj = p[idx] * static_cast<double>(m) / static_cast<double>(r + 1);
        running = std::min(running, adj);
        q[idx] = running;
    }
    return q;
}

std::vector<AssocRow> assoc(const std::vector<double>& measure, const std::vector<std::vector<double>>& variables,
                            const std::vector<std::string>& labels) {
    if (variables.size() != labels.size()) throw DomainError("assoc: one label per variable required");
    std::vector<AssocRow> rows(variables.size());
    std::vector<double> pvals;
    std::vector<std::size_t> tested;
    for (std::size_t v = 0; v < variables.size(); ++v) {
        AssocRow& row = rows[v];
        row.label = labels[v];
        if (variables[v].size() != measure.size()) throw DomainError("assoc: variable '" + labels[v] + "' has the wrong length");
        std::vector<double> x, y;
        for (std::size_t i = 0; i < measure.size(); ++i) {
            if (std::isnan(measure[i]) || std::isnan(variables[v][i])) continue;
            x.push_back(variables[v][i]);
            y.push_back(measure[i]);
        }
        row.n = x.size();
        if (row.n < 3) {
            row.skipped = true;
            row.note = "fewer than 3 complete pairs";
            continue;
        }
        const double nn = static_cast<double>(row.n);
        const double mx = std::accumulate(x.begin(), x.end(), 0.0) / nn;
        const double my = std::accumulate(y.begin(), y.end(), 0.0) / nn;
        double sxx = 0.0, syy = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            sxx += (x[i] - mx) * (x[i] - mx);
            syy += (y[i] - my) * (y[i] - my);
            sxy += (x[i] - mx) * (y[i] - my);
        }
        if (!(sxx > 0.0) || !(syy > 0.0)) {
            row.skipped = true;
            row.note = "zero variance";
            continue;
        }
        row.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
        const double df = nn - 2.0;
        if (std::fabs(row.r) >= 1.0 || df <= 0.0) {
            row.p = std::fabs(row.r) >= 1.0 ? 0.0 : 1.0;
        } else {
            const double t = row.r * std::sqrt(df / (1.0 - row.r * row.r));
            boost::math::students_t dist(df);
            row.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
        }
        if (row.n > 3) {
            const double z = std::atanh(std::clamp(row.r, -1.0 + 1e-15, 1.0 - 1e-15));
            const double se = 1.0 / std::sqrt(nn - 3.0);
            row.ci_lower = std::tanh(z - kZ975 * se);
            row.ci_upper = std::tanh(z + kZ975 * se);
        } else {
            row.ci_lower = -1.0;
            row.ci_upper = 1.0;
        }
        pvals.push_back(row.p);
        tested.push_back(v);
    }
    const std::vector<double> q = bh_qvalues(pvals);
    for (std::size_t k = 0; k < tested.size(); ++k) rows[tested[k]].q = q[k];
    return rows;
}

}  // namespace rlhmmddm::metrics
