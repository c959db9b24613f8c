#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <cstring>
#include <random>

#include "doctest.h"
#include "oracles/bh.hpp"
#include "rlhmmddm/metrics.hpp"
#include "rlhmmddm/sim.hpp"

using namespace rlhmmddm;

namespace {

hmm::Posteriors constant_posteriors(const Dataset& data, double g1) {
    hmm::Posteriors p;
    for (const auto& s : data.subjects) {
        hmm::SubjectPosteriors sp;
        sp.gamma.assign(s.trials.size(), {1.0 - g1, g1});
        p.subjects.push_back(sp);
    }
    return p;
}

Dataset small_dataset(int n, int J, std::uint64_t seed) {
    sim::SimConfig c;
    c.n = n;
    c.J = J;
    c.seed = seed;
    return sim::generate(c).dataset;
}

}  // namespace

TEST_CASE("engagement score and threshold conventions") {
    const Dataset data = small_dataset(3, 10, 1);
    const auto half = metrics::engagement_summary(constant_posteriors(data, 0.5), data);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(half.score[i] == 0.0);
        for (int u : half.u_hat[i]) CHECK(u == 1);
        CHECK(std::isnan(half.rt_lapsed[i]));
    }
    const auto sat = metrics::engagement_summary(constant_posteriors(data, 1.0), data);
    CHECK(sat.score[0] == doctest::Approx(std::log((1.0 - 1e-8) / 1e-8)).epsilon(1e-7));
    CHECK(sat.score[0] == doctest::Approx(18.42).epsilon(1e-3));
}

TEST_CASE("group rate is the column mean and response times split by state") {
    const Dataset data = small_dataset(4, 12, 2);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    hmm::Posteriors post;
    for (const auto& s : data.subjects) {
        hmm::SubjectPosteriors sp;
        for (std::size_t j = 0; j < s.trials.size(); ++j) {
            const double g = u(rng);
            sp.gamma.push_back({1.0 - g, g});
        }
        post.subjects.push_back(sp);
    }
    const auto e = metrics::engagement_summary(post, data);
    for (std::size_t j = 0; j < 12; ++j) {
        double m = 0.0;
        for (std::size_t i = 0; i < 4; ++i) m += post.subjects[i].gamma[j][1];
        CHECK(e.group_rate[j] == doctest::Approx(m / 4.0).epsilon(1e-12));
    }
    for (std::size_t i = 0; i < 4; ++i) {
        double s1 = 0, n1 = 0, s0 = 0, n0 = 0;
        for (std::size_t j = 0; j < 12; ++j) {
            const double t = data.subjects[i].trials[j].t;
            if (post.subjects[i].gamma[j][1] >= 0.5) s1 += t, n1 += 1;
            else s0 += t, n0 += 1;
        }
        if (n1 > 0) CHECK(e.rt_engaged[i] == doctest::Approx(s1 / n1).epsilon(1e-14));
        if (n0 > 0) CHECK(e.rt_lapsed[i] == doctest::Approx(s0 / n0).epsilon(1e-14));
    }

    SubjectData hand;
    for (int j = 1; j <= 4; ++j) hand.trials.push_back({j, 0, 0, 0.1 * j, 0.0});
    const auto [eng, lap] = metrics::rt_by_state(hand, {1, 0, 1, 0});
    CHECK(eng == doctest::Approx(0.2));
    CHECK(lap == doctest::Approx(0.3));
}

TEST_CASE("state-conditional response times with the true states match the generator") {
    sim::SimConfig c;
    c.n = 20;
    c.J = 50;
    const auto out = sim::generate(c);
    for (std::size_t i = 0; i < out.true_u.size(); ++i) {
        const auto [eng, lap] = metrics::rt_by_state(out.dataset.subjects[i], out.true_u[i]);
        double s[2] = {0, 0}, n[2] = {0, 0};
        for (std::size_t j = 0; j < out.true_u[i].size(); ++j) {
            s[out.true_u[i][j]] += out.dataset.subjects[i].trials[j].t;
            n[out.true_u[i][j]] += 1;
        }
        if (n[1] > 0) CHECK(eng == doctest::Approx(s[1] / n[1]).epsilon(1e-14));
        if (n[0] > 0) CHECK(lap == doctest::Approx(s[0] / n[0]).epsilon(1e-14));
    }
}

TEST_CASE("classification accuracy") {
    std::vector<std::vector<int>> truth{{1, 0, 1, 1}, {0, 0, 1}, {1, 1, 1, 0, 1}};
    const auto perfect = metrics::classification_accuracy(truth, truth, 4);
    for (double a : perfect.per_trial) CHECK(a == 1.0);
    CHECK(perfect.overall == 1.0);
    CHECK(perfect.count == 11);

    std::vector<std::vector<int>> mask{{0, 0, 0, 1}, {0, 0, 0}, {0, 0, 0, 0, 0}};
    const auto masked = metrics::classification_accuracy(truth, truth, 4, &mask);
    CHECK(std::isnan(masked.per_trial[0]));
    CHECK(masked.per_trial[3] == 1.0);
    CHECK(masked.count == 1);

    std::mt19937_64 rng(8);
    std::vector<std::vector<int>> t(300), p(300);
    for (int i = 0; i < 300; ++i)
        for (int j = 0; j < 100; ++j) {
            t[i].push_back(static_cast<int>(rng() & 1));
            p[i].push_back(static_cast<int>(rng() & 1));
        }
    const auto coin = metrics::classification_accuracy(p, t, 100);
    CHECK(std::fabs(coin.overall - 0.5) < 3 * std::sqrt(0.25 / 30000));
    CHECK_THROWS_AS(metrics::classification_accuracy(p, truth, 4), DomainError);
}

TEST_CASE("BH q-values: worked example, monotonicity and rejection sets") {
    const auto q = metrics::bh_qvalues({0.01, 0.02, 0.03});
    for (double v : q) CHECK(v == doctest::Approx(0.03).epsilon(1e-15));
    CHECK(metrics::bh_qvalues({}).empty());
    CHECK(metrics::bh_qvalues({0.7}) == std::vector<double>{0.7});
}

TEST_CASE("BH q-values equal the definition on 100 random vectors") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t m = 1 + rep % 40;
        std::vector<double> p(m);
        for (auto& v : p) {
            v = u(rng);
            v = v < 0.3 ? v * v * v : v;         // a cluster of small p-values
            if (rep % 3 == 0) v = std::round(v * 20.0) / 20.0;  // ties
        }
        const auto q = metrics::bh_qvalues(p);
        const auto ref = oracle::bh_definition(p);
        for (std::size_t i = 0; i < m; ++i) {
            CHECK(std::memcmp(&q[i], &ref[i], sizeof(double)) == 0);
            CHECK(q[i] >= p[i] * (1.0 - 1e-15));  // p*m/m may round down one ulp
            CHECK(q[i] <= 1.0);
        }
        for (double alpha : {0.01, 0.05, 0.2}) {
            const auto rej = oracle::bh_reject(p, alpha);
            for (std::size_t i = 0; i < m; ++i) CHECK((q[i] <= alpha) == rej[i]);
        }
        std::vector<std::size_t> order(m);
        for (std::size_t i = 0; i < m; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
        for (std::size_t k = 1; k < m; ++k) CHECK(q[order[k]] >= q[order[k - 1]]);
    }
}

TEST_CASE("association screening") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n01(0.0, 1.0);
    std::vector<double> y(40), x1(40), x2(40), same(40), flat(40, 2.0);
    for (int i = 0; i < 40; ++i) {
        x1[i] = n01(rng);
        x2[i] = n01(rng);
        y[i] = 0.5 * x1[i] + n01(rng);
        same[i] = y[i];
    }
    x2[5] = std::nan("");
    const auto rows = metrics::assoc(y, {x1, x2, same, flat}, {"x1", "x2", "same", "flat"});
    REQUIRE(rows.size() == 4);
    CHECK(rows[1].n == 39);
    CHECK(rows[2].r == doctest::Approx(1.0));
    CHECK(rows[2].p < 1e-12);
    CHECK(rows[3].skipped);

    // p-value through the incomplete beta identity of the t distribution.
    for (int k = 0; k < 2; ++k) {
        const auto& r = rows[k];
        const double df = r.n - 2.0;
        const double t2 = r.r * r.r * df / (1.0 - r.r * r.r);
        const double p = boost::math::ibeta(df / 2.0, 0.5, df / (df + t2));
        CHECK(r.p == doctest::Approx(p).epsilon(1e-10));
        const double z = std::atanh(r.r), se = 1.0 / std::sqrt(r.n - 3.0);
        CHECK(r.ci_lower == doctest::Approx(std::tanh(z - 1.96 * se)).epsilon(1e-12));
        CHECK(r.ci_upper == doctest::Approx(std::tanh(z + 1.96 * se)).epsilon(1e-12));
    }
    const auto q = metrics::bh_qvalues({rows[0].p, rows[1].p, rows[2].p});
    CHECK(rows[0].q == q[0]);
    CHECK(rows[2].q == q[2]);

    const auto tiny = metrics::assoc({1.0, 2.0}, {{1.0, 3.0}}, {"two"});
    CHECK(tiny[0].skipped);
}

TEST_CASE("bootstrap: single subject has zero spread, fixed seed is reproducible") {
    const Dataset one = small_dataset(1, 150, 5);
    fit::FitConfig fc;
    fc.restarts = 2;
    const auto est = fit::fit_rl_ddm(one, fc);
    REQUIRE(est.converged);
    metrics::BootstrapConfig bc;
    bc.replicates = 4;
    const auto b = metrics::bootstrap(one, fit::Model::rl_ddm, est, fc, bc);
    CHECK(b.dropped == 0);
    for (double s : b.bse) CHECK(s == 0.0);
    for (std::size_t k = 0; k < b.names.size(); ++k) {
        CHECK(b.ci_lower[k] == b.estimate[k]);
        CHECK(b.ci_upper[k] == b.estimate[k]);
    }

    const Dataset data = small_dataset(12, 60, 6);
    const auto full = fit::fit_rl_ddm(data, fc);
    bc.replicates = 5;
    bc.seed = 17;
    const auto r1 = metrics::bootstrap(data, fit::Model::rl_ddm, full, fc, bc);
    bc.threads = 2;
    const auto r2 = metrics::bootstrap(data, fit::Model::rl_ddm, full, fc, bc);
    REQUIRE(r1.replicates.size() == r2.replicates.size());
    for (std::size_t r = 0; r < r1.replicates.size(); ++r)
        for (std::size_t k = 0; k < r1.names.size(); ++k)
            CHECK(std::memcmp(&r1.replicates[r][k], &r2.replicates[r][k], sizeof(double)) == 0);
    for (std::size_t k = 0; k < r1.names.size(); ++k) {
        CHECK(r1.bse[k] > 0.0);
        CHECK(r1.ci_upper[k] - r1.estimate[k] == doctest::Approx(1.96 * r1.bse[k]).epsilon(1e-12));
    }
}

TEST_CASE("bootstrap: pi1 interval on the logit scale, failures counted") {
    const Dataset data = small_dataset(10, 40, 9);
    fit::FitConfig fc;
    fc.restarts = 1;
    fc.max_em_iter = 300;
    const auto est = fit::fit_rl_hmm_ddm(data, fc);
    metrics::BootstrapConfig bc;
    bc.replicates = 3;
    const auto b = metrics::bootstrap(data, fit::Model::rl_hmm_ddm, est, fc, bc);
    const auto it = std::find(b.names.begin(), b.names.end(), "pi1");
    REQUIRE(it != b.names.end());
    const std::size_t k = it - b.names.begin();
    CHECK(b.ci_lower[k] > 0.0);
    CHECK(b.ci_upper[k] < 1.0);
    CHECK(b.ci_lower[k] <= b.estimate[k]);
    CHECK(b.ci_upper[k] >= b.estimate[k]);

    fit::FitConfig starved = fc;
    starved.max_em_iter = 1;
    CHECK_THROWS_AS(metrics::bootstrap(data, fit::Model::rl_hmm_ddm, est, starved, bc), DomainError);
}

TEST_CASE("parameter naming and engaged-action prediction") {
    CHECK(metrics::parameter_names(fit::Model::rl_ddm, 1).size() == 5);
    CHECK(metrics::parameter_names(fit::Model::rl_hmm_ddm, 1).size() == 11);
    CHECK(metrics::parameter_names(fit::Model::rl_hmm, 2).size() == 9);
    ModelParams p = sim::default_true_params();
    CHECK(metrics::parameter_vector(fit::Model::rl_hmm_ddm, p).size() == 11);

    SubjectData s;
    s.id = "S";
    s.covariates = {0.0};
    for (int j = 1; j <= 30; ++j) s.trials.push_back({j, 1, 1, 0.6, 1.0});
    Dataset d;
    d.subjects.push_back(s);
    p.rho = 2.0;
    const auto soft = metrics::predict_engaged_actions(fit::Model::rl_hmm, p, d);
    CHECK(soft[0][0] == 1);   // Z = 0: tie goes to action 1
    CHECK(soft[0][29] == 1);  // Z > 0
    p.b = 0.5;
    const auto ddm = metrics::predict_engaged_actions(fit::Model::rl_hmm_ddm, p, d);
    CHECK(ddm[0][29] == 1);
}
