#include "rlhmmddm/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rlhmmddm/io.hpp"
#include "rlhmmddm/types.hpp"

namespace rlhmmddm::config {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string check_value(const Key& k, const std::string& v) {
    try {
        switch (k.kind) {
            case Kind::integer: io::parse_int(v); break;
            case Kind::uinteger:
                if (io::parse_int(v) < 0) return "must be a non-negative integer";
                break;
            case Kind::real:
                if (!std::isfinite(io::parse_double(v))) return "must be a finite number";
                break;
            case Kind::boolean: parse_bool(v); break;
            case Kind::real_list: parse_list(v); break;
            case Kind::text: break;
        }
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

}  // namespace

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw DomainError("not a boolean: '" + v + "'");
}

std::vector<double> parse_list(const std::string& v) {
    std::vector<double> out;
    if (trim(v).empty()) return out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const double x = io::parse_double(trim(item));
        if (!std::isfinite(x)) throw DomainError("list entries must be finite");
        out.push_back(x);
    }
    return out;
}

std::string format_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + io::format_double(v[k]);
    return s;
}

Config::Config(std::string command, Schema schema) : command_(std::move(command)), schema_(std::move(schema)) {
    for (const auto& k : schema_) values_[k.name] = k.default_value;
}

const Key& Config::key(const std::string& name) const {
    for (const auto& k : schema_)
        if (k.name == name) return k;
    throw DomainError("config: unknown key '" + name + "' for command '" + command_ + "'");
}

void Config::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("config: cannot open '" + path.string() + "'");
    std::string line;
    std::size_t n = 0;
    std::vector<std::string> problems;
    while (std::getline(in, line)) {
        ++n;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string at = path.string() + ":" + std::to_string(n) + ": ";
        if (eq == std::string::npos) {
            problems.push_back(at + "expected key = value");
            continue;
        }
        const std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
        if (k == "version") continue;
        if (k == "command") {
            if (v != command_) problems.push_back(at + "file is for command '" + v + "', not '" + command_ + "'");
            continue;
        }
        try {
            set(k, v);
        } catch (const DomainError& e) {
            problems.push_back(at + e.what());
        }
    }
    if (!problems.empty()) {
        std::string all;
        for (const auto& p : problems) all += (all.empty() ? "" : "\n") + p;
        throw DomainError(all);
    }
}

void Config::set(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw DomainError("config: expected key=value, got '" + assignment + "'");
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Config::set(const std::string& name, const std::string& value) {
    const Key& k = key(name);
    const std::string problem = check_value(k, value);
    if (!problem.empty() && !(k.kind == Kind::text)) throw DomainError("config: " + name + ": " + problem);
    values_[name] = value;
}

bool Config::is_set(const std::string& name) const { return !get(name).empty(); }

const std::string& Config::get(const std::string& name) const {
    key(name);
    return values_.at(name);
}

long long Config::get_int(const std::string& name) const { return io::parse_int(get(name)); }

std::uint64_t Config::get_u64(const std::string& name) const {
    const long long v = get_int(name);
    if (v < 0) throw DomainError("config: " + name + " must be non-negative");
    return static_cast<std::uint64_t>(v);
}

double Config::get_double(const std::string& name) const { return io::parse_double(get(name)); }
bool Config::get_bool(const std::string& name) const { return parse_bool(get(name)); }
std::vector<double> Config::get_list(const std::string& name) const { return parse_list(get(name)); }

void Config::validate() const {
    std::vector<std::string> problems;
    for (const auto& k : schema_) {
        const std::string& v = values_.at(k.name);
        if (k.kind == Kind::text || (k.kind == Kind::real_list && v.empty())) continue;
        if (v.empty()) {
            problems.push_back(k.name + ": missing value");
            continue;
        }
        const std::string p = check_value(k, v);
        if (!p.empty()) problems.push_back(k.name + ": " + p);
    }
    if (!problems.empty()) {
        std::string all = "config: invalid configuration for '" + command_ + "'";
        for (const auto& p : problems) all += "\n  " + p;
        throw DomainError(all);
    }
}

std::string Config::manifest(const std::string& version, const std::vector<std::string>& notes) const {
    std::ostringstream out;
    for (const auto& n : notes) out << "# " << n << '\n';
    out << "command = " << command_ << '\n';
    out << "version = " << version << '\n';
    for (const auto& [k, v] : values_) out << k << " = " << v << '\n';
    return out.str();
}

void Config::write_manifest(const std::filesystem::path& path, const std::string& version,
                            const std::vector<std::string>& notes) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("config: cannot write '" + path.string() + "'");
    out << manifest(version, notes);
    if (!out.flush()) throw DataError("config: failed writing '" + path.string() + "'");
}

}  // namespace rlhmmddm::config
