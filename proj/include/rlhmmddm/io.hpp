#pragma once
// Delimited-text dataset files, ground-truth and posterior tables, and the
// JSON fit artifact.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rlhmmddm/fit.hpp"
#include "rlhmmddm/hmm.hpp"
#include "rlhmmddm/types.hpp"

namespace rlhmmddm::io {

namespace fs = std::filesystem;

inline constexpr const char* kTrialsHeader = "subject_id,trial,state,action,rt_seconds,reward";
inline constexpr const char* kFitFormat = "rlhmmddm-fit/1";

/// Shortest representation that reads back to the same double; "NA" for NaN.
std::string format_double(double x);
double parse_double(const std::string& field);  // throws std::invalid_argument
long long parse_int(const std::string& field);

/// Comma-separated table with a header row. Fields may not contain commas,
/// quotes or line breaks.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line;  // 1-based source line of each row (reads only)

    std::size_t column(const std::string& name) const;  // throws DataError if missing
};

Table read_table(const fs::path& path);
void write_table(const fs::path& path, const Table& table);

/// Collects row-level problems and throws one DataError listing them all.
class RowErrors {
public:
    explicit RowErrors(fs::path file) : file_(std::move(file)) {}
    void add(std::size_t line, const std::string& message);
    void throw_if_any() const;
    bool empty() const { return messages_.empty(); }

private:
    fs::path file_;
    std::vector<std::string> messages_;
};

/// trials.csv and (optional) covariates.csv in `dir`. Subjects appear in
/// the order of their first trial row; each subject's rows must be contiguous.
Dataset read_dataset(const fs::path& dir);
void write_dataset(const fs::path& dir, const Dataset& data);

Dataset read_trials(const fs::path& path);
void read_covariates(const fs::path& path, Dataset& data);
void write_trials(const fs::path& path, const Dataset& data);
void write_covariates(const fs::path& path, const Dataset& data);

struct Truth {
    std::vector<std::vector<int>> u;
    std::vector<std::vector<double>> z;
};

/// truth.csv: subject_id, trial, engaged, contrast. Rows must match `data`.
void write_truth(const fs::path& path, const Dataset& data, const Truth& truth);
Truth read_truth(const fs::path& path, const Dataset& data);

/// gamma.csv: subject_id, trial, gamma_engaged.
void write_gamma(const fs::path& path, const Dataset& data, const hmm::Posteriors& post);

struct FitArtifact {
    fit::Model model = fit::Model::rl_hmm_ddm;
    ModelParams params;
    double loglik = 0.0;
    bool converged = false;
    int iterations = 0;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> config;
};

void write_fit(const fs::path& path, const fit::FitResult& result, std::uint64_t seed,
               const std::map<std::string, std::string>& config);
FitArtifact read_fit(const fs::path& path);

/// Creates `dir` (and parents) and checks that it is writable.
void ensure_output_dir(const fs::path& dir);

}  // namespace rlhmmddm::io
