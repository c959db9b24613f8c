// Acceptance run: one PASS/FAIL line per criterion. Tolerances are fixed
// here and not configurable. Exit status is nonzero if any criterion fails.
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/bh.hpp"
#include "oracles/hmm_paths.hpp"
#include "oracles/quadrature.hpp"
#include "rlhmmddm/fit.hpp"
#include "rlhmmddm/hmm.hpp"
#include "rlhmmddm/io.hpp"
#include "rlhmmddm/metrics.hpp"
#include "rlhmmddm/parallel.hpp"
#include "rlhmmddm/sim.hpp"
#include "rlhmmddm/wfpt.hpp"

namespace fs = std::filesystem;
using namespace rlhmmddm;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Verdict {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const char* title, const Verdict& v) {
    std::cout << "criterion " << id << (id < 10 ? "  " : " ") << (v.pass ? "PASS" : "FAIL") << "  " << title
              << ": " << v.detail << std::endl;
    if (!v.pass) ++failures;
}

// ---------------------------------------------------------------------------
// Shared simulated replicates (n = 100, J = 100, setting 1).

constexpr int kReplicates = 20;
constexpr int kN = 100, kJ = 100;
constexpr std::uint64_t kSwitchSeedBase = 710000, kStaticSeedBase = 720000;

struct Replicate {
    sim::SimOutput data;
    fit::FitResult hmm_ddm, ddm, hmm_soft;
};

sim::SimOutput simulate(std::uint64_t seed, bool switching) {
    sim::SimConfig c;
    c.n = kN;
    c.J = kJ;
    c.seed = seed;
    c.switching = switching;
    return sim::generate(c, default_threads());
}

fit::FitConfig fit_config(std::uint64_t seed) {
    fit::FitConfig f;
    f.seed = seed;
    f.threads = default_threads();
    return f;
}

std::vector<Replicate> switching_replicates() {
    std::vector<Replicate> out(kReplicates);
    for (int r = 0; r < kReplicates; ++r) {
        out[r].data = simulate(kSwitchSeedBase + r, true);
        const auto cfg = fit_config(1 + r);
        out[r].hmm_ddm = fit::fit_rl_hmm_ddm(out[r].data.dataset, cfg);
        out[r].ddm = fit::fit_rl_ddm(out[r].data.dataset, cfg);
        out[r].hmm_soft = fit::fit_rl_hmm(out[r].data.dataset, cfg);
    }
    return out;
}

// Emission parameters checked for recovery, in this order.
const char* const kEmissionNames[] = {"beta", "alpha1", "b", "c", "tau"};

std::vector<double> emission(const ModelParams& p) { return {p.beta, p.alpha1, p.b, p.c, p.tau}; }

std::vector<double> mean_bias(const std::vector<const fit::FitResult*>& fits, const ModelParams& truth) {
    const auto t = emission(truth);
    std::vector<double> bias(t.size(), 0.0);
    for (const auto* f : fits) {
        const auto e = emission(f->params);
        for (std::size_t k = 0; k < t.size(); ++k) bias[k] += (e[k] - t[k]) / fits.size();
    }
    return bias;
}

std::string describe(const std::vector<double>& bias) {
    std::string s;
    for (std::size_t k = 0; k < bias.size(); ++k)
        s += fmt("%s%s %+.4f", k ? ", " : "", kEmissionNames[k], bias[k]);
    return s;
}

std::vector<double> empirical_se(const std::vector<const fit::FitResult*>& fits) {
    std::vector<double> mean(5, 0.0), ss(5, 0.0);
    for (const auto* f : fits) {
        const auto e = emission(f->params);
        for (int k = 0; k < 5; ++k) mean[k] += e[k] / fits.size();
    }
    for (const auto* f : fits) {
        const auto e = emission(f->params);
        for (int k = 0; k < 5; ++k) ss[k] += (e[k] - mean[k]) * (e[k] - mean[k]);
    }
    for (auto& v : ss) v = std::sqrt(v / (fits.size() - 1));
    return ss;
}

int converged_count(const std::vector<const fit::FitResult*>& fits) {
    int c = 0;
    for (const auto* f : fits) c += f->converged;
    return c;
}

// ---------------------------------------------------------------------------
// 1. WFPT validity on a 5x5x5x2 grid.

Verdict criterion_wfpt() {
    const auto t0 = Clock::now();
    double norm_err = 0, rep_err = 0, choice_err = 0, refl_err = 0;
    for (int ia = 0; ia < 5; ++ia)
        for (int ib = 0; ib < 5; ++ib)
            for (int iv = 0; iv < 5; ++iv)
                for (double tau : {0.0, 0.1}) {
                    const wfpt::DdmParams p{0.5 + 0.5 * ia, 0.3 + 0.1 * ib, -3.0 + 1.5 * iv, tau};
                    // Quadrature tolerance 1e-11: far below the 1e-6 criterion, and cheap.
                    const double m0 = oracle::density_mass(0, p, 0.0, 200.0, 1e-11);
                    const double m1 = oracle::density_mass(1, p, 0.0, 200.0, 1e-11);
                    norm_err = std::max(norm_err, std::fabs(m0 + m1 - 1.0));
                    choice_err = std::max(choice_err, std::fabs(wfpt::choice_prob(p) - m1));
                    for (int k = 1; k <= 40; ++k) {
                        const double t = tau + 0.025 * k * p.alpha * p.alpha;
                        const double u = (t - tau) / (p.alpha * p.alpha);
                        for (double bb : {p.b, 1.0 - p.b}) {
                            const double s = wfpt::f0_unit(u, bb, wfpt::Representation::small);
                            const double l = wfpt::f0_unit(u, bb, wfpt::Representation::large);
                            rep_err = std::max(rep_err, std::fabs(s - l));
                        }
                        const wfpt::DdmParams mirror{p.alpha, 1.0 - p.b, -p.v, tau};
                        refl_err = std::max(refl_err, std::fabs(wfpt::joint_density(t, 1, p) -
                                                                wfpt::joint_density(t, 0, mirror)));
                    }
                }
    const double secs = seconds_since(t0);
    const bool ok = norm_err <= 1e-6 && rep_err <= 1e-9 && choice_err <= 1e-6 && refl_err <= 1e-12 && secs < 60.0;
    return {ok, fmt("normalisation %.1e (<=1e-6), small/large %.1e (<=1e-9), choice %.1e (<=1e-6), "
                    "reflection %.1e (<=1e-12), %.1f s (<60)",
                    norm_err, rep_err, choice_err, refl_err, secs)};
}

// ---------------------------------------------------------------------------
// 2. Sampler fidelity.

Verdict criterion_sampler() {
    const auto t0 = Clock::now();
    const wfpt::DdmParams points[] = {{1.0, 0.5, 0.0, 0.1}, {1.5, 0.6, 1.5, 0.2}, {2.0, 0.35, -1.0, 0.05}};
    constexpr int kDraws = 100000;
    bool ok = true;
    std::string detail;
    std::mt19937_64 rng(424242);
    for (const auto& p : points) {
        double ones = 0, sum_t = 0;
        for (int i = 0; i < kDraws; ++i) {
            const auto d = wfpt::sample(p, rng);
            ones += d.a;
            sum_t += d.t;
        }
        const double pc = wfpt::choice_prob(p);
        const double z = (ones / kDraws - pc) / std::sqrt(pc * (1 - pc) / kDraws);
        const double mean_q = p.tau + oracle::density_first_moment(0, p) + oracle::density_first_moment(1, p);
        const double rel = (sum_t / kDraws - mean_q) / mean_q;
        ok = ok && std::fabs(z) <= 3.0 && std::fabs(rel) <= 0.01;
        detail += fmt("%s[a=%.2g b=%.2g v=%.2g] choice z %+.2f, mean RT %+.2f%%", detail.empty() ? "" : "; ", p.alpha,
                      p.b, p.v, z, 100 * rel);
    }
    const double secs = seconds_since(t0);
    ok = ok && secs < 120.0;
    return {ok, detail + fmt(" (|z|<=3, |RT|<=1%%), %.1f s (<120)", secs)};
}

// ---------------------------------------------------------------------------
// 3. Forward-backward against path enumeration.

Verdict criterion_hmm() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> u(0.02, 0.98), e(0.01, 5.0);
    std::uniform_int_distribution<int> len(1, 10);
    double worst = 0;
    for (int inst = 0; inst < 100; ++inst) {
        const int J = len(rng);
        std::vector<hmm::Vec2> eta(J);
        for (auto& x : eta) x = {e(rng), e(rng)};
        const double p1 = u(rng);
        const hmm::Vec2 pi{1 - p1, p1};
        const double a = u(rng), b = u(rng);
        const hmm::Mat2 P{{{1 - a, a}, {1 - b, b}}};
        const auto ref = oracle::enumerate_paths(eta, pi, P);
        std::vector<hmm::Vec2> log_eta(J);
        for (int j = 0; j < J; ++j) log_eta[j] = {std::log(eta[j][0]), std::log(eta[j][1])};
        for (const auto& fb : {hmm::forward_backward(eta, pi, P), hmm::forward_backward_log(log_eta, pi, P)}) {
            worst = std::max(worst, std::fabs(fb.loglik - ref.loglik));
            for (int j = 0; j < J; ++j)
                for (int k = 0; k < 2; ++k) worst = std::max(worst, std::fabs(fb.gamma[j][k] - ref.gamma[j][k]));
            for (int j = 0; j + 1 < J; ++j)
                for (int k = 0; k < 2; ++k)
                    for (int l = 0; l < 2; ++l)
                        worst = std::max(worst, std::fabs(fb.xi[j][k][l] - ref.xi[j][k][l]));
        }
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-10 && secs < 30.0,
            fmt("max |difference| %.1e over gamma, xi, loglik (<=1e-10), %.2f s (<30)", worst, secs)};
}

// ---------------------------------------------------------------------------
// 4. EM monotonicity (first 10 switching replicates, every restart).

Verdict criterion_monotone(const std::vector<Replicate>& reps) {
    double worst_drop = 0;
    int traces = 0;
    for (int r = 0; r < 10; ++r)
        for (const auto& rs : reps[r].hmm_ddm.restarts) {
            ++traces;
            for (std::size_t i = 1; i < rs.loglik_trace.size(); ++i)
                worst_drop = std::max(worst_drop, rs.loglik_trace[i - 1] - rs.loglik_trace[i]);
        }
    return {worst_drop <= 1e-8, fmt("%d EM traces on 10 datasets, largest decrease %.2e (<=1e-8)", traces, worst_drop)};
}

// ---------------------------------------------------------------------------
// 5 and 6. Recovery on switching data, and misspecified RL-DDM bias.

Verdict criterion_recovery(const std::vector<Replicate>& reps) {
    std::vector<const fit::FitResult*> fits;
    for (const auto& r : reps) fits.push_back(&r.hmm_ddm);
    const auto bias = mean_bias(fits, sim::default_true_params());
    const double limit[] = {0.005, 0.05, 0.01, 0.15, 0.003};
    bool ok = true;
    for (int k = 0; k < 5; ++k) ok = ok && std::fabs(bias[k]) <= limit[k];
    const auto ese = empirical_se(fits);
    return {ok, "RL-HMM-DDM mean bias " + describe(bias) +
                    fmt(" (limits .005/.05/.01/.15/.003); empirical SE %.4f/%.4f/%.4f/%.4f/%.4f; %d/%d converged",
                        ese[0], ese[1], ese[2], ese[3], ese[4], converged_count(fits), kReplicates)};
}

Verdict criterion_misspecified(const std::vector<Replicate>& reps) {
    std::vector<const fit::FitResult*> fits;
    for (const auto& r : reps) fits.push_back(&r.ddm);
    const auto bias = mean_bias(fits, sim::default_true_params());
    const bool ok = bias[1] <= -0.25 && bias[3] <= -0.8 && bias[2] <= -0.04;
    return {ok, fmt("RL-DDM mean bias alpha1 %+.4f (<=-0.25), c %+.4f (<=-0.8), b %+.4f (<=-0.04); %d/%d converged",
                    bias[1], bias[3], bias[2], converged_count(fits), kReplicates)};
}

// ---------------------------------------------------------------------------
// 7. Both fitters recover the truth on data without switching.

Verdict criterion_well_specified() {
    std::vector<fit::FitResult> a(kReplicates), b(kReplicates);
    for (int r = 0; r < kReplicates; ++r) {
        const auto d = simulate(kStaticSeedBase + r, false);
        const auto cfg = fit_config(101 + r);
        a[r] = fit::fit_rl_hmm_ddm(d.dataset, cfg);
        b[r] = fit::fit_rl_ddm(d.dataset, cfg);
    }
    std::vector<const fit::FitResult*> fa, fb;
    for (int r = 0; r < kReplicates; ++r) fa.push_back(&a[r]), fb.push_back(&b[r]);
    const auto truth = sim::default_true_params();
    const auto ba = mean_bias(fa, truth), bb = mean_bias(fb, truth);
    const double ese[] = {0.0016, 0.0100, 0.0027, 0.0297, 0.0010};
    bool ok = true;
    for (int k = 0; k < 5; ++k) ok = ok && std::fabs(ba[k]) <= 3 * ese[k] && std::fabs(bb[k]) <= 3 * ese[k];
    return {ok, "RL-HMM-DDM " + describe(ba) + "; RL-DDM " + describe(bb) +
                    fmt(" (limits 3x .0016/.0100/.0027/.0297/.0010); converged %d+%d/%d", converged_count(fa),
                        converged_count(fb), 2 * kReplicates)};
}

// ---------------------------------------------------------------------------
// 8. Classification accuracy ordering.

struct AccuracyPair {
    double u = 0, a = 0;
};

AccuracyPair model_accuracy(fit::Model m, const fit::FitResult& f, const sim::SimOutput& d) {
    const auto post = fit::model_posteriors(m, d.dataset, f.params);
    const auto summary = metrics::engagement_summary(post, d.dataset);
    const auto u = metrics::classification_accuracy(summary.u_hat, d.true_u, 100);
    const auto a = metrics::classification_accuracy(metrics::predict_engaged_actions(m, f.params, d.dataset),
                                                    metrics::observed_actions(d.dataset), 100, &d.true_u);
    return {u.overall, a.overall};
}

Verdict criterion_accuracy(const std::vector<Replicate>& reps) {
    AccuracyPair full, soft, ddm;
    for (const auto& r : reps) {
        const auto x = model_accuracy(fit::Model::rl_hmm_ddm, r.hmm_ddm, r.data);
        const auto y = model_accuracy(fit::Model::rl_hmm, r.hmm_soft, r.data);
        const auto z = model_accuracy(fit::Model::rl_ddm, r.ddm, r.data);
        full.u += x.u / kReplicates, full.a += x.a / kReplicates;
        soft.u += y.u / kReplicates, soft.a += y.a / kReplicates;
        ddm.u += z.u / kReplicates, ddm.a += z.a / kReplicates;
    }
    const bool ok = full.u > soft.u && soft.u > ddm.u && std::fabs(soft.u - 0.80) <= 0.07 &&
                    std::fabs(ddm.u - 0.65) <= 0.07 && full.a >= soft.a && full.a >= ddm.a;
    return {ok, fmt("U accuracy RL-HMM-DDM %.3f > RL-HMM %.3f (0.80+-0.07) > RL-DDM %.3f (0.65+-0.07); "
                    "engaged A accuracy %.3f vs %.3f, %.3f",
                    full.u, soft.u, ddm.u, full.a, soft.a, ddm.a)};
}

// ---------------------------------------------------------------------------
// 9. Bootstrap on one replicate.

Verdict criterion_bootstrap(const Replicate& rep) {
    metrics::BootstrapConfig bc;
    bc.replicates = 50;
    bc.seed = 9001;
    bc.threads = default_threads();
    const auto cfg = fit_config(1);
    const auto first = metrics::bootstrap(rep.data.dataset, fit::Model::rl_hmm_ddm, rep.hmm_ddm, cfg, bc);
    bc.threads = bc.threads == 1 ? 2 : 1;
    const auto second = metrics::bootstrap(rep.data.dataset, fit::Model::rl_hmm_ddm, rep.hmm_ddm, cfg, bc);

    auto same = [](const std::vector<double>& x, const std::vector<double>& y) {
        return x.size() == y.size() && std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0;
    };
    bool identical = first.names == second.names && first.dropped == second.dropped &&
                     first.replicate_index == second.replicate_index && same(first.bse, second.bse) &&
                     same(first.ci_lower, second.ci_lower) && same(first.ci_upper, second.ci_upper) &&
                     first.replicates.size() == second.replicates.size();
    for (std::size_t i = 0; identical && i < first.replicates.size(); ++i)
        identical = same(first.replicates[i], second.replicates[i]);
    const double bse_beta = first.bse[0];
    const double reference = 0.0025;
    const bool ok = identical && bse_beta >= reference / 2 && bse_beta <= reference * 2;
    return {ok, fmt("BSE(beta) %.4f (within [%.5f, %.4f]); rerun %s; %d of 50 replicates dropped", bse_beta,
                    reference / 2, reference * 2, identical ? "bit-identical" : "DIFFERS", first.dropped)};
}

// ---------------------------------------------------------------------------
// 10. BH q-values against an independent oracle.

Verdict criterion_bh() {
    std::mt19937_64 rng(555);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int mismatches = 0, reject_mismatch = 0;
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> p(1 + rep % 50);
        for (auto& v : p) {
            v = u(rng);
            if (v < 0.4) v = v * v * v / 8;
            if (rep % 4 == 0) v = std::round(v * 50) / 50;
        }
        const auto q = metrics::bh_qvalues(p), ref = oracle::bh_definition(p);
        for (std::size_t i = 0; i < p.size(); ++i) mismatches += std::memcmp(&q[i], &ref[i], sizeof(double)) != 0;
        const auto rej = oracle::bh_reject(p, 0.05);
        for (std::size_t i = 0; i < p.size(); ++i) reject_mismatch += (q[i] <= 0.05) != rej[i];
    }
    return {mismatches == 0 && reject_mismatch == 0,
            fmt("100 vectors, %d q-value mismatches (exact), %d rejection-set mismatches", mismatches, reject_mismatch)};
}

// ---------------------------------------------------------------------------
// 11. Real-data pipeline exercised on a simulated stand-in.

const fs::path kCli = RLHMMDDM_CLI_PATH;

int run_cli(const fs::path& dir, const std::string& args) {
    const std::string cmd = kCli.string() + " " + args + " >> " + (dir / "log.txt").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Verdict criterion_pipeline() {
    const fs::path dir = fs::temp_directory_path() / ("rlhmmddm_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::vector<std::string> problems;
    auto need = [&](bool cond, const std::string& what) {
        if (!cond) problems.push_back(what);
        return cond;
    };
    const std::string d = dir.string();
    try {
        need(run_cli(dir, "simulate --seed 77 --set sim.n=40 --set sim.J=80 --out " + d + "/sim") == 0, "simulate");
        need(run_cli(dir, "preprocess --input " + d + "/sim --out " + d + "/pre") == 0, "preprocess");
        const int fit_status = run_cli(dir, "fit --model rl-hmm-ddm --seed 5 --input " + d + "/pre --out " + d + "/fit");
        need(fit_status == 0, "fit exit status");
        need(run_cli(dir, "metrics --input " + d + "/pre --fit " + d + "/fit/fit.json --out " + d + "/met") == 0,
             "metrics");
        need(run_cli(dir, "metrics --config " + d + "/met/manifest.conf --out " + d + "/met2") == 0, "metrics rerun");
        need(run_cli(dir, "bootstrap --replicates 4 --seed 3 --input " + d + "/pre --fit " + d +
                              "/fit/fit.json --out " + d + "/boot") == 0,
             "bootstrap");
        need(run_cli(dir, "assoc --scores " + d + "/met/subjects.csv --variables " + d + "/pre/covariates.csv --out " +
                              d + "/assoc") == 0,
             "assoc");
        if (!problems.empty()) throw std::runtime_error("command failed");

        // Formats and round trips.
        const Dataset pre = io::read_dataset(dir / "pre");
        io::write_dataset(dir / "rt", pre);
        need(slurp(dir / "pre/trials.csv") == slurp(dir / "rt/trials.csv"), "trials round trip");
        for (const char* f : {"gamma.csv", "engagement.csv", "subjects.csv"})
            need(slurp(dir / "met" / f) == slurp(dir / "met2" / f), std::string("manifest rerun ") + f);

        // Group rate is the column mean of the posterior table.
        const auto gamma = io::read_table(dir / "met/gamma.csv");
        const auto eng = io::read_table(dir / "met/engagement.csv");
        std::vector<double> sum(eng.rows.size(), 0.0), count(eng.rows.size(), 0.0);
        for (const auto& row : gamma.rows) {
            const auto j = static_cast<std::size_t>(io::parse_int(row[gamma.column("trial")])) - 1;
            sum.at(j) += io::parse_double(row[gamma.column("gamma_engaged")]);
            count.at(j) += 1;
        }
        double worst = 0;
        for (std::size_t j = 0; j < eng.rows.size(); ++j)
            worst = std::max(worst, std::fabs(io::parse_double(eng.rows[j][eng.column("group_rate")]) - sum[j] / count[j]));
        need(worst <= 1e-12, fmt("group rate vs column mean %.1e", worst));

        const auto subjects = io::read_table(dir / "met/subjects.csv");
        need(subjects.rows.size() == pre.subjects.size(), "one score row per subject");
        for (const auto& row : subjects.rows)
            need(std::isfinite(io::parse_double(row[subjects.column("score")])), "finite engagement score");

        const auto boot = io::read_table(dir / "boot/bootstrap.csv");
        for (const auto& row : boot.rows) {
            const double est = io::parse_double(row[boot.column("estimate")]);
            need(io::parse_double(row[boot.column("bse")]) >= 0.0, "bse >= 0");
            need(io::parse_double(row[boot.column("ci_lower")]) <= est &&
                     est <= io::parse_double(row[boot.column("ci_upper")]),
                 "interval covers estimate for " + row[0]);
        }

        const auto assoc = io::read_table(dir / "assoc/assoc.csv");
        need(!assoc.rows.empty(), "assoc rows");
        for (const auto& row : assoc.rows) {
            const double r = io::parse_double(row[assoc.column("r")]), p = io::parse_double(row[assoc.column("p")]),
                         q = io::parse_double(row[assoc.column("q")]);
            if (std::isnan(r)) continue;
            need(std::fabs(r) <= 1 && p >= 0 && p <= 1 && q >= p * (1 - 1e-15) && q <= 1, "assoc ranges");
            need(io::parse_double(row[assoc.column("ci_lower")]) <= r &&
                     r <= io::parse_double(row[assoc.column("ci_upper")]),
                 "Fisher interval covers r");
        }
    } catch (const std::exception& e) {
        problems.push_back(e.what());
    }
    fs::remove_all(dir);
    std::string detail = "simulate -> preprocess -> fit -> metrics -> bootstrap -> assoc on a stand-in (n=40, J=80); ";
    if (problems.empty()) return {true, detail + "formats, round trips and invariants hold"};
    for (const auto& p : problems) detail += p + "; ";
    return {false, detail};
}

}  // namespace

int main() {
    const auto t0 = Clock::now();
    std::cout << "acceptance run, " << default_threads() << " thread(s)" << std::endl;
    report(1, "WFPT validity", criterion_wfpt());
    report(2, "sampler fidelity", criterion_sampler());
    report(3, "HMM oracle equivalence", criterion_hmm());

    const auto fits_t0 = Clock::now();
    const auto reps = switching_replicates();
    std::cout << "  (fitted 3 models to " << kReplicates << " switching replicates in "
              << fmt("%.0f", seconds_since(fits_t0)) << " s)" << std::endl;
    report(4, "EM monotonicity", criterion_monotone(reps));
    report(5, "parameter recovery", criterion_recovery(reps));
    report(6, "misspecification bias direction", criterion_misspecified(reps));
    report(7, "well-specified equivalence", criterion_well_specified());
    report(8, "classification accuracy ordering", criterion_accuracy(reps));
    report(9, "bootstrap sanity", criterion_bootstrap(reps[0]));
    report(10, "BH q-values", criterion_bh());
    report(11, "stand-in pipeline", criterion_pipeline());
    std::cout << (failures == 0 ? "all criteria pass" : fmt("%d criteria fail", failures)) << " ("
              << fmt("%.0f", seconds_since(t0)) << " s)" << std::endl;
    return failures == 0 ? 0 : 1;
}
