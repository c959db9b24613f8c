#include "rlhmmddm/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace rlhmmddm::io {

using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

void check_field(const std::string& f) {
    if (f.find_first_of(",\"\n\r") != std::string::npos)
        throw DataError("io: field '" + f + "' contains a delimiter, quote or line break");
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("io: cannot open '" + path.string() + "' for writing");
    return out;
}

void finish(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) throw DataError("io: failed writing '" + path.string() + "'");
}

std::string where(const fs::path& file, std::size_t line) { return file.string() + ":" + std::to_string(line); }

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "NA";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& field) {
    if (field == "NA") return std::numeric_limits<double>::quiet_NaN();
    double x = 0.0;
    const char* end = field.data() + field.size();
    const auto res = std::from_chars(field.data(), end, x);
    if (field.empty() || res.ec != std::errc() || res.ptr != end)
        throw std::invalid_argument("not a number: '" + field + "'");
    return x;
}

long long parse_int(const std::string& field) {
    long long x = 0;
    const char* end = field.data() + field.size();
    const auto res = std::from_chars(field.data(), end, x);
    if (field.empty() || res.ec != std::errc() || res.ptr != end)
        throw std::invalid_argument("not an integer: '" + field + "'");
    return x;
}

std::size_t Table::column(const std::string& name) const {
    for (std::size_t k = 0; k < header.size(); ++k)
        if (header[k] == name) return k;
    throw DataError("io: missing column '" + name + "'");
}

void RowErrors::add(std::size_t line, const std::string& message) {
    messages_.push_back(where(file_, line) + ": " + message);
}

void RowErrors::throw_if_any() const {
    if (messages_.empty()) return;
    std::string all;
    const std::size_t shown = std::min<std::size_t>(messages_.size(), 50);
    for (std::size_t k = 0; k < shown; ++k) all += (k ? "\n" : "") + messages_[k];
    if (shown < messages_.size()) all += "\n(" + std::to_string(messages_.size() - shown) + " more)";
    throw DataError(all);
}

Table read_table(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("io: cannot open '" + path.string() + "'");
    Table t;
    std::string line;
    std::size_t n = 0;
    RowErrors errors(path);
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split(line);
        if (t.header.empty()) {
            t.header = std::move(fields);
            continue;
        }
        if (fields.size() != t.header.size()) {
            errors.add(n, "expected " + std::to_string(t.header.size()) + " fields, found " +
                              std::to_string(fields.size()));
            continue;
        }
        t.rows.push_back(std::move(fields));
        t.line.push_back(n);
    }
    if (t.header.empty()) throw DataError("io: '" + path.string() + "' has no header row");
    errors.throw_if_any();
    return t;
}

void write_table(const fs::path& path, const Table& table) {
    auto out = open_out(path);
    auto row_out = [&](const std::vector<std::string>& row) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            check_field(row[k]);
            if (k) out << ',';
            out << row[k];
        }
        out << '\n';
    };
    row_out(table.header);
    for (const auto& r : table.rows) {
        if (r.size() != table.header.size()) throw DataError("io: row width differs from header");
        row_out(r);
    }
    finish(out, path);
}

Dataset read_trials(const fs::path& path) {
    const Table t = read_table(path);
    const std::size_t c_id = t.column("subject_id"), c_j = t.column("trial"), c_s = t.column("state"),
                      c_a = t.column("action"), c_t = t.column("rt_seconds"), c_r = t.column("reward");
    Dataset data;
    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::size_t> first_line;
    RowErrors errors(path);
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        const auto& row = t.rows[k];
        const std::size_t ln = t.line[k];
        TrialRecord tr;
        try {
            tr.j = static_cast<int>(parse_int(row[c_j]));
            tr.s = static_cast<int>(parse_int(row[c_s]));
            tr.a = static_cast<int>(parse_int(row[c_a]));
            tr.t = parse_double(row[c_t]);
            tr.r = parse_double(row[c_r]);
        } catch (const std::invalid_argument& e) {
            errors.add(ln, e.what());
            continue;
        }
        if (row[c_id].empty()) errors.add(ln, "empty subject_id");
        if (tr.s != 0 && tr.s != 1) errors.add(ln, "state must be 0 or 1");
        if (tr.a != 0 && tr.a != 1) errors.add(ln, "action must be 0 or 1");
        if (!(tr.t > 0.0) || !std::isfinite(tr.t)) errors.add(ln, "rt_seconds must be positive and finite");
        if (!(tr.r >= 0.0) || !std::isfinite(tr.r)) errors.add(ln, "reward must be non-negative and finite");

        auto it = index.find(row[c_id]);
        if (it == index.end()) {
            it = index.emplace(row[c_id], data.subjects.size()).first;
            data.subjects.push_back(SubjectData{row[c_id], {}, {}});
            first_line.push_back(ln);
        } else if (it->second + 1 != data.subjects.size()) {
            errors.add(ln, "rows of subject '" + row[c_id] + "' are not contiguous");
            continue;
        }
        auto& trials = data.subjects[it->second].trials;
        const int expected = static_cast<int>(trials.size()) + 1;
        if (tr.j != expected)
            errors.add(ln, "trial " + std::to_string(tr.j) + " out of order (expected " + std::to_string(expected) + ")");
        trials.push_back(tr);
    }
    errors.throw_if_any();
    if (data.subjects.empty()) throw DataError("io: '" + path.string() + "' has no trial rows");
    return data;
}

void read_covariates(const fs::path& path, Dataset& data) {
    const Table t = read_table(path);
    const std::size_t c_id = t.column("subject_id");
    std::vector<std::size_t> cols;
    for (std::size_t p = 1;; ++p) {
        bool found = false;
        for (std::size_t k = 0; k < t.header.size(); ++k) {
            if (t.header[k] == "x" + std::to_string(p)) {
                cols.push_back(k);
                found = true;
            }
        }
        if (!found) break;
    }
    if (cols.size() + 1 != t.header.size())
        throw DataError(where(path, 1) + ": expected columns subject_id,x1..xp");
    std::unordered_map<std::string, std::vector<double>> by_id;
    RowErrors errors(path);
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        std::vector<double> x;
        try {
            for (std::size_t c : cols) x.push_back(parse_double(t.rows[k][c]));
        } catch (const std::invalid_argument& e) {
            errors.add(t.line[k], e.what());
            continue;
        }
        for (double v : x)
            if (!std::isfinite(v)) errors.add(t.line[k], "covariates must be finite");
        if (!by_id.emplace(t.rows[k][c_id], std::move(x)).second)
            errors.add(t.line[k], "duplicate subject_id '" + t.rows[k][c_id] + "'");
    }
    errors.throw_if_any();
    std::string missing;
    for (auto& s : data.subjects) {
        const auto it = by_id.find(s.id);
        if (it == by_id.end()) {
            missing += (missing.empty() ? "" : ", ") + s.id;
            continue;
        }
        s.covariates = it->second;
    }
    if (!missing.empty()) throw DataError(path.string() + ": no covariate row for " + missing);
}

Dataset read_dataset(const fs::path& dir) {
    Dataset data = read_trials(dir / "trials.csv");
    if (fs::exists(dir / "covariates.csv")) read_covariates(dir / "covariates.csv", data);
    validate(data);
    return data;
}

void write_trials(const fs::path& path, const Dataset& data) {
    auto out = open_out(path);
    out << kTrialsHeader << '\n';
    for (const auto& s : data.subjects) {
        check_field(s.id);
        for (const auto& tr : s.trials)
            out << s.id << ',' << tr.j << ',' << tr.s << ',' << tr.a << ',' << format_double(tr.t) << ','
                << format_double(tr.r) << '\n';
    }
    finish(out, path);
}

void write_covariates(const fs::path& path, const Dataset& data) {
    auto out = open_out(path);
    out << "subject_id";
    for (std::size_t p = 1; p <= data.num_covariates(); ++p) out << ",x" << p;
    out << '\n';
    for (const auto& s : data.subjects) {
        check_field(s.id);
        out << s.id;
        for (double x : s.covariates) out << ',' << format_double(x);
        out << '\n';
    }
    finish(out, path);
}

void write_dataset(const fs::path& dir, const Dataset& data) {
    validate(data);
    ensure_output_dir(dir);
    write_trials(dir / "trials.csv", data);
    write_covariates(dir / "covariates.csv", data);
}

void write_truth(const fs::path& path, const Dataset& data, const Truth& truth) {
    if (truth.u.size() != data.subjects.size() || truth.z.size() != data.subjects.size())
        throw DataError("io: truth does not cover every subject");
    auto out = open_out(path);
    out << "subject_id,trial,engaged,contrast\n";
    for (std::size_t i = 0; i < data.subjects.size(); ++i) {
        const auto& s = data.subjects[i];
        if (truth.u[i].size() != s.trials.size() || truth.z[i].size() != s.trials.size())
            throw DataError("io: truth length differs from trials for " + s.id);
        for (std::size_t j = 0; j < s.trials.size(); ++j)
            out << s.id << ',' << s.trials[j].j << ',' << truth.u[i][j] << ',' << format_double(truth.z[i][j]) << '\n';
    }
    finish(out, path);
}

Truth read_truth(const fs::path& path, const Dataset& data) {
    const Table t = read_table(path);
    const std::size_t c_id = t.column("subject_id"), c_j = t.column("trial"), c_u = t.column("engaged"),
                      c_z = t.column("contrast");
    Truth truth;
    truth.u.resize(data.subjects.size());
    truth.z.resize(data.subjects.size());
    RowErrors errors(path);
    std::size_t k = 0;
    for (std::size_t i = 0; i < data.subjects.size(); ++i) {
        const auto& s = data.subjects[i];
        for (std::size_t j = 0; j < s.trials.size(); ++j, ++k) {
            if (k >= t.rows.size()) {
                errors.add(t.line.empty() ? 1 : t.line.back(), "truth ends before subject " + s.id + " trial " +
                                                                   std::to_string(j + 1));
                errors.throw_if_any();
            }
            const auto& row = t.rows[k];
            try {
                if (row[c_id] != s.id || parse_int(row[c_j]) != s.trials[j].j) {
                    errors.add(t.line[k], "expected subject " + s.id + " trial " + std::to_string(s.trials[j].j));
                    continue;
                }
                const long long u = parse_int(row[c_u]);
                if (u != 0 && u != 1) errors.add(t.line[k], "engaged must be 0 or 1");
                truth.u[i].push_back(static_cast<int>(u));
                truth.z[i].push_back(parse_double(row[c_z]));
            } catch (const std::invalid_argument& e) {
                errors.add(t.line[k], e.what());
            }
        }
    }
    if (k < t.rows.size()) errors.add(t.line[k], "rows beyond the dataset's trials");
    errors.throw_if_any();
    return truth;
}

void write_gamma(const fs::path& path, const Dataset& data, const hmm::Posteriors& post) {
    if (post.subjects.size() != data.subjects.size()) throw DataError("io: posteriors do not cover every subject");
    auto out = open_out(path);
    out << "subject_id,trial,gamma_engaged\n";
    for (std::size_t i = 0; i < data.subjects.size(); ++i) {
        const auto& s = data.subjects[i];
        for (std::size_t j = 0; j < s.trials.size(); ++j)
            out << s.id << ',' << s.trials[j].j << ',' << format_double(post.subjects[i].gamma[j][1]) << '\n';
    }
    finish(out, path);
}

void write_fit(const fs::path& path, const fit::FitResult& result, std::uint64_t seed,
               const std::map<std::string, std::string>& config) {
    const ModelParams& p = result.params;
    json params = {{"alpha0", p.alpha0}, {"alpha1", p.alpha1}, {"b", p.b},       {"c", p.c},
                   {"tau", p.tau},       {"beta", p.beta},     {"rho", p.rho},   {"pi1", p.chain.pi1},
                   {"zeta0", p.chain.zeta0}, {"zeta1", p.chain.zeta1}};
    json restarts = json::array();
    for (const auto& r : result.restarts)
        restarts.push_back({{"loglik", r.loglik}, {"iterations", r.iterations}, {"converged", r.converged}});
    json j = {{"format", kFitFormat},
              {"model", fit::to_string(result.model)},
              {"seed", seed},
              {"converged", result.converged},
              {"iterations", result.iterations},
              {"loglik", result.loglik},
              {"loglik_trace", result.loglik_trace},
              {"best_restart", result.best_restart},
              {"restarts", restarts},
              {"mstep_violations", result.mstep_violations},
              {"warnings", result.warnings},
              {"params", params},
              {"config", config}};
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    finish(out, path);
}

FitArtifact read_fit(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("io: cannot open '" + path.string() + "'");
    FitArtifact a;
    try {
        const json j = json::parse(in);
        if (j.at("format").get<std::string>() != kFitFormat)
            throw DataError(path.string() + ": unsupported fit format '" + j.at("format").get<std::string>() + "'");
        a.model = fit::parse_model(j.at("model").get<std::string>());
        a.seed = j.at("seed").get<std::uint64_t>();
        a.converged = j.at("converged").get<bool>();
        a.iterations = j.at("iterations").get<int>();
        a.loglik = j.at("loglik").get<double>();
        const json& p = j.at("params");
        a.params.alpha0 = p.at("alpha0").get<double>();
        a.params.alpha1 = p.at("alpha1").get<double>();
        a.params.b = p.at("b").get<double>();
        a.params.c = p.at("c").get<double>();
        a.params.tau = p.at("tau").get<double>();
        a.params.beta = p.at("beta").get<double>();
        a.params.rho = p.at("rho").get<double>();
        a.params.chain.pi1 = p.at("pi1").get<double>();
        a.params.chain.zeta0 = p.at("zeta0").get<std::vector<double>>();
        a.params.chain.zeta1 = p.at("zeta1").get<std::vector<double>>();
        a.config = j.at("config").get<std::map<std::string, std::string>>();
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    } catch (const DomainError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    return a;
}

void ensure_output_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw DataError("io: cannot create output directory '" + dir.string() + "'");
    const fs::path probe = dir / ".rlhmmddm-write-test";
    {
        std::ofstream out(probe, std::ios::binary);
        if (!out) throw DataError("io: output directory '" + dir.string() + "' is not writable");
    }
    fs::remove(probe, ec);
}

}  // namespace rlhmmddm::io
