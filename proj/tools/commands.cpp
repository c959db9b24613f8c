#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <cstdio>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>

#include "rlhmmddm/fit.hpp"
#include "rlhmmddm/io.hpp"
#include "rlhmmddm/metrics.hpp"
#include "rlhmmddm/parallel.hpp"
#include "rlhmmddm/sim.hpp"
#include "rlhmmddm/version.hpp"

namespace rlhmmddm::cli {

namespace fs = std::filesystem;
using config::Config;
using config::Key;
using config::Kind;
using config::Schema;

namespace {

int threads(const Config& c) { return std::max(1, static_cast<int>(c.get_int("threads"))); }

// ---------------------------------------------------------------------------
// Schemas

void add(Schema& s, std::initializer_list<Key> keys) { s.insert(s.end(), keys); }

void add_common(Schema& s) {
    add(s, {{"out", Kind::text, "out", "output directory"},
            {"threads", Kind::uinteger, std::to_string(default_threads()), "worker threads (RLHMMDDM_THREADS)"}});
}

void add_fit_keys(Schema& s) {
    add(s, {{"fit.max_em_iter", Kind::uinteger, "500", "EM iteration limit"},
            {"fit.em_tol", Kind::real, "1e-06", "relative log-likelihood change for EM convergence"},
            {"fit.inner_max_iter", Kind::uinteger, "100", "BFGS iterations per M-step"},
            {"fit.inner_grad_tol", Kind::real, "1e-08", "BFGS gradient tolerance, relative to 1 + |f|"},
            {"fit.restarts", Kind::uinteger, "5", "random restarts"},
            {"fit.analytic_gradient", Kind::boolean, "true", "analytic emission gradients (false: central differences)"},
            {"fit.fd_step", Kind::real, "1e-06", "finite-difference step"},
            {"fit.q_init", Kind::real, "0", "initial expected reward in every cell"},
            {"fit.direct_max_iter", Kind::uinteger, "2000", "BFGS iterations of the single-state fit"}});
}

void add_true_keys(Schema& s) {
    const ModelParams p = sim::default_true_params();
    using io::format_double;
    add(s, {{"true.alpha0", Kind::real, format_double(p.alpha0), "lapsed boundary separation"},
            {"true.alpha1", Kind::real, format_double(p.alpha1), "engaged boundary separation"},
            {"true.b", Kind::real, format_double(p.b), "engaged relative bias"},
            {"true.c", Kind::real, format_double(p.c), "drift scaling"},
            {"true.tau", Kind::real, format_double(p.tau), "non-decision time (s)"},
            {"true.beta", Kind::real, format_double(p.beta), "learning rate"},
            {"true.pi1", Kind::real, format_double(p.chain.pi1), "initial engaged probability"},
            {"true.zeta0", Kind::real_list, config::format_list(p.chain.zeta0), "lapsed-row logistic coefficients"},
            {"true.zeta1", Kind::real_list, config::format_list(p.chain.zeta1), "engaged-row logistic coefficients"}});
}

ModelParams true_params(const Config& c) {
    ModelParams p;
    p.alpha0 = c.get_double("true.alpha0");
    p.alpha1 = c.get_double("true.alpha1");
    p.b = c.get_double("true.b");
    p.c = c.get_double("true.c");
    p.tau = c.get_double("true.tau");
    p.beta = c.get_double("true.beta");
    p.chain.pi1 = c.get_double("true.pi1");
    p.chain.zeta0 = c.get_list("true.zeta0");
    p.chain.zeta1 = c.get_list("true.zeta1");
    return p;
}

fit::FitConfig fit_config(const Config& c) {
    fit::FitConfig f;
    f.max_em_iter = static_cast<int>(c.get_int("fit.max_em_iter"));
    f.em_tol = c.get_double("fit.em_tol");
    f.inner_max_iter = static_cast<int>(c.get_int("fit.inner_max_iter"));
    f.inner_grad_tol = c.get_double("fit.inner_grad_tol");
    f.restarts = static_cast<int>(c.get_int("fit.restarts"));
    f.analytic_gradient = c.get_bool("fit.analytic_gradient");
    f.fd_step = c.get_double("fit.fd_step");
    f.q_init = c.get_double("fit.q_init");
    f.direct_max_iter = static_cast<int>(c.get_int("fit.direct_max_iter"));
    f.seed = c.get_u64("seed");
    f.threads = threads(c);
    f.validate();
    return f;
}

fs::path required_path(const Config& c, const std::string& key) {
    if (!c.is_set(key)) throw DomainError("missing required setting '" + key + "'");
    return c.get(key);
}

fs::path prepare_out(const Config& c) {
    const fs::path out = c.get("out");
    io::ensure_output_dir(out);
    return out;
}

void finish(const Config& c, const fs::path& out, const std::vector<std::string>& notes = {}) {
    c.write_manifest(out / "manifest.conf", kVersion, notes);
}

std::vector<std::string> fit_notes(const std::vector<std::string>& warnings) {
    std::vector<std::string> notes;
    for (const auto& w : warnings) notes.push_back("warning: " + w);
    return notes;
}

// ---------------------------------------------------------------------------
// simulate

int run_simulate(const Config& c) {
    sim::SimConfig s;
    s.n = static_cast<int>(c.get_int("sim.n"));
    s.J = static_cast<int>(c.get_int("sim.J"));
    const long long setting = c.get_int("sim.setting");
    if (setting != 1 && setting != 2) throw DomainError("sim.setting must be 1 or 2");
    s.setting = setting == 1 ? sim::RewardSetting::bernoulli : sim::RewardSetting::beta;
    s.switching = c.get_bool("sim.switching");
    s.covariate_prob = c.get_double("sim.covariate_prob");
    s.q_init = c.get_double("sim.q_init");
    s.sampler.dt = c.get_double("sim.dt");
    s.sampler.max_decision_time = c.get_double("sim.max_decision_time");
    s.max_redraws = static_cast<int>(c.get_int("sim.max_redraws"));
    s.seed = c.get_u64("seed");
    s.true_params = true_params(c);

    const fs::path out = prepare_out(c);
    const sim::SimOutput o = sim::generate(s, threads(c));
    io::write_dataset(out, o.dataset);
    io::write_truth(out / "truth.csv", o.dataset, io::Truth{o.true_u, o.true_z});
    std::vector<std::string> notes;
    if (!s.switching) notes.push_back("chain: frozen, every trial engaged (pi1, zeta unused)");
    finish(c, out, notes);
    std::cout << "simulated " << s.n << " subjects x " << s.J << " trials -> " << out.string() << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------
// preprocess

int run_preprocess(const Config& c) {
    const fs::path in = required_path(c, "input");
    const bool clamp = c.get_bool("preprocess.clamp");
    const bool screen = c.get_bool("preprocess.screen");
    const double lo = c.get_double("preprocess.rt_min"), hi = c.get_double("preprocess.rt_max");
    if (!(lo > 0.0 && lo < hi)) throw DomainError("preprocess: need 0 < rt_min < rt_max");
    const double beta_min = c.get_double("preprocess.beta_min");
    const bool has_covariates = fs::exists(in / "covariates.csv");

    Dataset data = io::read_dataset(in);
    std::size_t low = 0, high = 0;
    if (clamp) {
        for (auto& s : data.subjects) {
            for (auto& tr : s.trials) {
                if (tr.t < lo) {
                    tr.t = lo;
                    ++low;
                } else if (tr.t > hi) {
                    tr.t = hi;
                    ++high;
                }
            }
        }
    }

    io::Table screening;
    screening.header = {"subject_id", "beta", "rho", "loglik", "boundary", "excluded"};
    std::vector<char> keep(data.subjects.size(), 1);
    if (screen) {
        std::vector<fit::SoftmaxFit> fits(data.subjects.size());
        const double q0 = c.get_double("q_init");
        parallel_for(data.subjects.size(), threads(c),
                     [&](std::size_t i) { fits[i] = fit::fit_rl_softmax_subject(data.subjects[i], q0); });
        for (std::size_t i = 0; i < fits.size(); ++i) {
            keep[i] = fits[i].beta >= beta_min ? 1 : 0;
            screening.rows.push_back({data.subjects[i].id, io::format_double(fits[i].beta),
                                      io::format_double(fits[i].rho), io::format_double(fits[i].loglik),
                                      fits[i].boundary ? "1" : "0", keep[i] ? "0" : "1"});
        }
    }
    Dataset kept;
    for (std::size_t i = 0; i < data.subjects.size(); ++i)
        if (keep[i]) kept.subjects.push_back(std::move(data.subjects[i]));
    if (kept.subjects.empty()) throw DataError("preprocess: every subject was excluded");

    const fs::path out = prepare_out(c);
    if (fs::equivalent(out, in)) throw DomainError("preprocess: output directory must differ from the input");
    io::write_trials(out / "trials.csv", kept);
    if (has_covariates) io::write_covariates(out / "covariates.csv", kept);
    if (screen) io::write_table(out / "screening.csv", screening);

    io::Table report;
    report.header = {"item", "value"};
    const std::size_t excluded = data.subjects.size() - kept.subjects.size();
    report.rows = {{"subjects_in", std::to_string(data.subjects.size())},
                   {"subjects_excluded", std::to_string(excluded)},
                   {"subjects_out", std::to_string(kept.subjects.size())},
                   {"rt_clamped_low", std::to_string(low)},
                   {"rt_clamped_high", std::to_string(high)},
                   {"trials_out", std::to_string(kept.num_trials())}};
    io::write_table(out / "report.csv", report);
    finish(c, out);
    std::cout << "clamped " << low << " fast and " << high << " slow responses; excluded " << excluded << " of "
              << data.subjects.size() << " subjects\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// fit

int run_fit(const Config& c) {
    const fs::path in = required_path(c, "input");
    const fit::Model model = fit::parse_model(c.get("model"));
    const fit::FitConfig fc = fit_config(c);
    const Dataset data = io::read_dataset(in);
    const fs::path out = prepare_out(c);

    const fit::FitResult r = fit::fit_model(model, data, fc);
    io::write_fit(out / "fit.json", r, fc.seed, c.resolved());
    if (model != fit::Model::rl_ddm) io::write_gamma(out / "gamma.csv", data, r.posteriors);
    finish(c, out, fit_notes(r.warnings));

    std::cout << fit::to_string(model) << ": loglik " << io::format_double(r.loglik) << " after " << r.iterations
              << " iterations" << (r.converged ? "" : " (NOT CONVERGED)") << '\n';
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
    return r.converged ? kExitOk : kExitNotConverged;
}

// ---------------------------------------------------------------------------
// bootstrap

int run_bootstrap(const Config& c) {
    const fs::path in = required_path(c, "input");
    const io::FitArtifact art = io::read_fit(required_path(c, "fit"));
    const Dataset data = io::read_dataset(in);
    fit::FitConfig fc = fit_config(c);

    fit::FitResult estimate;
    estimate.model = art.model;
    estimate.params = art.params;
    estimate.loglik = art.loglik;
    estimate.converged = art.converged;

    metrics::BootstrapConfig bc;
    bc.replicates = static_cast<int>(c.get_int("replicates"));
    bc.seed = c.get_u64("seed");
    bc.threads = threads(c);
    bc.max_drop_fraction = c.get_double("bootstrap.max_drop_fraction");
    const fs::path out = prepare_out(c);
    const metrics::BootstrapResult b = metrics::bootstrap(data, art.model, estimate, fc, bc);

    io::Table t;
    t.header = {"parameter", "estimate", "bse", "ci_lower", "ci_upper"};
    for (std::size_t k = 0; k < b.names.size(); ++k)
        t.rows.push_back({b.names[k], io::format_double(b.estimate[k]), io::format_double(b.bse[k]),
                          io::format_double(b.ci_lower[k]), io::format_double(b.ci_upper[k])});
    io::write_table(out / "bootstrap.csv", t);

    io::Table reps;
    reps.header = {"replicate"};
    reps.header.insert(reps.header.end(), b.names.begin(), b.names.end());
    for (std::size_t r = 0; r < b.replicates.size(); ++r) {
        std::vector<std::string> row{std::to_string(b.replicate_index[r])};
        for (double v : b.replicates[r]) row.push_back(io::format_double(v));
        reps.rows.push_back(std::move(row));
    }
    io::write_table(out / "replicates.csv", reps);
    std::vector<std::string> notes;
    if (b.dropped > 0) notes.push_back("dropped " + std::to_string(b.dropped) + " non-converged replicates");
    finish(c, out, notes);
    std::cout << "bootstrap: " << b.replicates.size() << " replicates kept, " << b.dropped << " dropped\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// metrics

int run_metrics(const Config& c) {
    const fs::path in = required_path(c, "input");
    const io::FitArtifact art = io::read_fit(required_path(c, "fit"));
    const Dataset data = io::read_dataset(in);
    const int window = static_cast<int>(c.get_int("window"));
    if (window < 1) throw DomainError("window must be >= 1");

    fit::FitConfig fc;
    fc.threads = threads(c);
    if (const auto it = art.config.find("fit.q_init"); it != art.config.end()) fc.q_init = io::parse_double(it->second);
    const hmm::Posteriors post = fit::model_posteriors(art.model, data, art.params, fc);
    const metrics::EngagementSummary e = metrics::engagement_summary(post, data);

    const fs::path out = prepare_out(c);
    io::write_gamma(out / "gamma.csv", data, post);

    io::Table rate;
    rate.header = {"trial", "group_rate"};
    for (std::size_t j = 0; j < e.group_rate.size(); ++j)
        rate.rows.push_back({std::to_string(j + 1), io::format_double(e.group_rate[j])});
    io::write_table(out / "engagement.csv", rate);

    io::Table subj;
    subj.header = {"subject_id", "score", "engaged_trials", "rt_engaged", "rt_lapsed"};
    for (std::size_t i = 0; i < data.subjects.size(); ++i) {
        const int engaged = std::accumulate(e.u_hat[i].begin(), e.u_hat[i].end(), 0);
        subj.rows.push_back({data.subjects[i].id, io::format_double(e.score[i]), std::to_string(engaged),
                             io::format_double(e.rt_engaged[i]), io::format_double(e.rt_lapsed[i])});
    }
    io::write_table(out / "subjects.csv", subj);

    if (c.is_set("truth")) {
        const io::Truth truth = io::read_truth(c.get("truth"), data);
        const metrics::Accuracy u_acc = metrics::classification_accuracy(e.u_hat, truth.u, window);
        const auto predicted = metrics::predict_engaged_actions(art.model, art.params, data, fc.q_init);
        const auto observed = metrics::observed_actions(data);
        const metrics::Accuracy a_acc = metrics::classification_accuracy(predicted, observed, window, &truth.u);

        io::Table curve;
        curve.header = {"trial", "u_accuracy", "a_accuracy"};
        for (int j = 0; j < window; ++j)
            curve.rows.push_back({std::to_string(j + 1), io::format_double(u_acc.per_trial[j]),
                                  io::format_double(a_acc.per_trial[j])});
        io::write_table(out / "accuracy.csv", curve);

        io::Table summary;
        summary.header = {"metric", "value", "count"};
        summary.rows = {{"u_accuracy", io::format_double(u_acc.overall), std::to_string(u_acc.count)},
                        {"a_accuracy", io::format_double(a_acc.overall), std::to_string(a_acc.count)}};
        io::write_table(out / "accuracy_summary.csv", summary);
        std::cout << "U accuracy " << io::format_double(u_acc.overall) << ", engaged A accuracy "
                  << io::format_double(a_acc.overall) << " over the first " << window << " trials\n";
    }
    finish(c, out);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// assoc

int run_assoc(const Config& c) {
    const fs::path scores_path = required_path(c, "scores");
    const fs::path vars_path = required_path(c, "variables");
    const io::Table scores = io::read_table(scores_path);
    const io::Table vars = io::read_table(vars_path);
    const std::size_t s_id = scores.column("subject_id"), s_m = scores.column(c.get("measure"));
    const std::size_t v_id = vars.column("subject_id");

    std::unordered_map<std::string, std::size_t> var_row;
    io::RowErrors errors(vars_path);
    for (std::size_t r = 0; r < vars.rows.size(); ++r)
        if (!var_row.emplace(vars.rows[r][v_id], r).second)
            errors.add(vars.line[r], "duplicate subject_id '" + vars.rows[r][v_id] + "'");
    errors.throw_if_any();

    std::vector<std::string> labels;
    std::vector<std::size_t> cols;
    for (std::size_t k = 0; k < vars.header.size(); ++k) {
        if (k == v_id) continue;
        labels.push_back(vars.header[k]);
        cols.push_back(k);
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> measure;
    std::vector<std::vector<double>> columns(cols.size());
    io::RowErrors score_errors(scores_path);
    for (std::size_t r = 0; r < scores.rows.size(); ++r) {
        try {
            measure.push_back(io::parse_double(scores.rows[r][s_m]));
        } catch (const std::invalid_argument& e) {
            score_errors.add(scores.line[r], e.what());
            continue;
        }
        const auto it = var_row.find(scores.rows[r][s_id]);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            if (it == var_row.end()) {
                columns[k].push_back(nan);
                continue;
            }
            try {
                columns[k].push_back(io::parse_double(vars.rows[it->second][cols[k]]));
            } catch (const std::invalid_argument& e) {
                errors.add(vars.line[it->second], e.what());
                columns[k].push_back(nan);
            }
        }
    }
    score_errors.throw_if_any();
    errors.throw_if_any();

    const auto rows = metrics::assoc(measure, columns, labels);
    io::Table t;
    t.header = {"variable", "n", "r", "p", "q", "ci_lower", "ci_upper", "note"};
    for (const auto& a : rows) {
        if (a.skipped) {
            t.rows.push_back({a.label, std::to_string(a.n), "NA", "NA", "NA", "NA", "NA", a.note});
            continue;
        }
        t.rows.push_back({a.label, std::to_string(a.n), io::format_double(a.r), io::format_double(a.p),
                          io::format_double(a.q), io::format_double(a.ci_lower), io::format_double(a.ci_upper), ""});
    }
    const fs::path out = prepare_out(c);
    io::write_table(out / "assoc.csv", t);
    finish(c, out);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// summarize

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto pos = s.find(',', start);
        const std::string item = s.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
        if (!item.empty()) out.push_back(item);
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

int run_summarize(const Config& c) {
    const std::vector<std::string> paths = split_list(required_path(c, "fits").string());
    if (paths.empty()) throw DomainError("summarize: no fit artifacts given");
    std::vector<io::FitArtifact> arts;
    for (const auto& p : paths) arts.push_back(io::read_fit(p));
    const fit::Model model = arts.front().model;
    for (const auto& a : arts)
        if (a.model != model) throw DataError("summarize: artifacts mix different models");

    ModelParams truth = true_params(c);
    const std::size_t p = truth.chain.zeta0.empty() ? 0 : truth.chain.zeta0.size() - 1;
    const auto names = metrics::parameter_names(model, p);
    const auto true_vec = metrics::parameter_vector(model, truth);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    io::Table t;
    t.header = {"parameter", "true", "mean", "bias", "ese", "replicates"};
    for (std::size_t k = 0; k < names.size(); ++k) {
        std::vector<double> est;
        for (const auto& a : arts) {
            const auto v = metrics::parameter_vector(model, a.params);
            if (v.size() != names.size()) throw DataError("summarize: artifacts differ in covariate dimension");
            if (a.converged) est.push_back(v[k]);
        }
        const double m = est.empty() ? nan : std::accumulate(est.begin(), est.end(), 0.0) / est.size();
        double ss = 0.0;
        for (double e : est) ss += (e - m) * (e - m);
        const double ese = est.size() > 1 ? std::sqrt(ss / (est.size() - 1.0)) : nan;
        const bool has_truth = !(model == fit::Model::rl_hmm && names[k] == "rho");
        const double tv = has_truth ? true_vec[k] : nan;
        t.rows.push_back({names[k], io::format_double(tv), io::format_double(m), io::format_double(m - tv),
                          io::format_double(ese), std::to_string(est.size())});
    }
    const fs::path out = prepare_out(c);
    io::write_table(out / "summary.csv", t);
    finish(c, out);

    std::cout << fit::to_string(model) << " over " << arts.size() << " fits\n";
    std::cout << "parameter      true      bias       ESE\n";
    for (const auto& row : t.rows) {
        std::printf("%-9s %9s %9.4f %9.4f\n", row[0].c_str(), row[1].c_str(), io::parse_double(row[3]),
                    io::parse_double(row[4]));
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

Schema simulate_schema() {
    Schema s;
    add_common(s);
    add(s, {{"seed", Kind::uinteger, "1", "random seed"},
            {"sim.n", Kind::uinteger, "100", "subjects"},
            {"sim.J", Kind::uinteger, "100", "trials per subject"},
            {"sim.setting", Kind::uinteger, "1", "reward setting: 1 Bernoulli, 2 Beta"},
            {"sim.switching", Kind::boolean, "true", "latent strategy switching (false: always engaged)"},
            {"sim.covariate_prob", Kind::real, "0.6", "Pr(X = 1)"},
            {"sim.q_init", Kind::real, "0", "initial expected reward"},
            {"sim.dt", Kind::real, "0.0001", "sampler step (s)"},
            {"sim.max_decision_time", Kind::real, "60", "sampler time cap (s)"},
            {"sim.max_redraws", Kind::uinteger, "100", "redraws after a capped path"}});
    add_true_keys(s);
    return s;
}

Schema preprocess_schema() {
    Schema s;
    add_common(s);
    add(s, {{"input", Kind::text, "", "dataset directory"},
            {"preprocess.clamp", Kind::boolean, "true", "clamp response times"},
            {"preprocess.rt_min", Kind::real, "0.15", "lower clamp (s)"},
            {"preprocess.rt_max", Kind::real, "1.5", "upper clamp (s)"},
            {"preprocess.screen", Kind::boolean, "true", "per-subject softmax RL screening"},
            {"preprocess.beta_min", Kind::real, "0.001", "exclude subjects whose learning rate is below this"},
            {"q_init", Kind::real, "0", "initial expected reward for screening fits"}});
    return s;
}

Schema fit_schema() {
    Schema s;
    add_common(s);
    add(s, {{"input", Kind::text, "", "dataset directory"},
            {"model", Kind::text, "rl-hmm-ddm", "rl-hmm-ddm | rl-ddm | rl-hmm"},
            {"seed", Kind::uinteger, "1", "restart seed"}});
    add_fit_keys(s);
    return s;
}

Schema bootstrap_schema() {
    Schema s;
    add_common(s);
    add(s, {{"input", Kind::text, "", "dataset directory"},
            {"fit", Kind::text, "", "fit.json of the full-data estimate"},
            {"seed", Kind::uinteger, "1", "resampling seed"},
            {"replicates", Kind::uinteger, "50", "bootstrap replicates"},
            {"bootstrap.max_drop_fraction", Kind::real, "0.2", "fail when more replicates than this fail to converge"}});
    add_fit_keys(s);
    return s;
}

Schema metrics_schema() {
    Schema s;
    add_common(s);
    add(s, {{"input", Kind::text, "", "dataset directory"},
            {"fit", Kind::text, "", "fit.json"},
            {"truth", Kind::text, "", "optional truth.csv from simulate"},
            {"window", Kind::uinteger, "100", "trials summarised by the accuracy curves"}});
    return s;
}

Schema assoc_schema() {
    Schema s;
    add_common(s);
    add(s, {{"scores", Kind::text, "", "table with subject_id and the measure column"},
            {"variables", Kind::text, "", "table with subject_id and one column per variable"},
            {"measure", Kind::text, "score", "measure column in the scores table"}});
    return s;
}

Schema summarize_schema() {
    Schema s;
    add_common(s);
    add(s, {{"fits", Kind::text, "", "comma-separated fit.json paths"}});
    add_true_keys(s);
    return s;
}

}  // namespace

const std::vector<Command>& commands() {
    static const std::vector<Command> all = {
        {"simulate", "Simulate a dataset with ground-truth latent states", simulate_schema(), run_simulate},
        {"preprocess", "Clamp response times and screen non-learners", preprocess_schema(), run_preprocess},
        {"fit", "Fit a model to a dataset", fit_schema(), run_fit},
        {"bootstrap", "Subject-resampling bootstrap of a fitted model", bootstrap_schema(), run_bootstrap},
        {"metrics", "Engagement, response-time and accuracy tables", metrics_schema(), run_metrics},
        {"assoc", "Correlate a per-subject measure with variables", assoc_schema(), run_assoc},
        {"summarize", "Bias and empirical SE over replicate fits", summarize_schema(), run_summarize},
    };
    return all;
}

}  // namespace rlhmmddm::cli
