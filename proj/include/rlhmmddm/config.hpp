#pragma once
// Plain-text `key = value` run configuration with a per-command schema.
// Precedence: schema defaults < config file < command-line overrides.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rlhmmddm::config {

enum class Kind { integer, uinteger, real, boolean, text, real_list };

struct Key {
    std::string name;
    Kind kind;
    std::string default_value;  // empty text means "unset"
    std::string help;
};

using Schema = std::vector<Key>;

class Config {
public:
    Config(std::string command, Schema schema);

    /// Reads `key = value` lines; '#' starts a comment. The reserved keys
    /// `command` (must match) and `version` are accepted so that a manifest
    /// can be fed back in.
    void load_file(const std::filesystem::path& path);
    /// "key=value" form used by --set.
    void set(const std::string& assignment);
    void set(const std::string& key, const std::string& value);

    bool is_set(const std::string& key) const;
    const std::string& get(const std::string& key) const;
    long long get_int(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    double get_double(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<double> get_list(const std::string& key) const;

    /// Parses every value against its kind; throws DomainError listing all problems.
    void validate() const;

    const std::string& command() const { return command_; }
    const Schema& schema() const { return schema_; }
    std::map<std::string, std::string> resolved() const { return values_; }

    /// Sorted `key = value` lines headed by command and version; no timestamps.
    std::string manifest(const std::string& version, const std::vector<std::string>& notes = {}) const;
    void write_manifest(const std::filesystem::path& path, const std::string& version,
                        const std::vector<std::string>& notes = {}) const;

private:
    const Key& key(const std::string& name) const;

    std::string command_;
    Schema schema_;
    std::map<std::string, std::string> values_;
};

/// Value checks shared with validate(); throw DomainError on bad input.
bool parse_bool(const std::string& v);
std::vector<double> parse_list(const std::string& v);
std::string format_list(const std::vector<double>& v);

}  // namespace rlhmmddm::config
