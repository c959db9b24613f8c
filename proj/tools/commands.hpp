#pragma once
// Subcommand implementations behind the rlhmmddm executable.

#include <string>
#include <vector>

#include "rlhmmddm/config.hpp"

namespace rlhmmddm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotConverged = 2;

struct Command {
    std::string name;
    std::string description;
    config::Schema schema;
    int (*run)(const config::Config& cfg);
};

const std::vector<Command>& commands();

}  // namespace rlhmmddm::cli
