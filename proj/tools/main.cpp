#include <CLI11.hpp>
#include <exception>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "commands.hpp"
#include "rlhmmddm/types.hpp"
#include "rlhmmddm/version.hpp"

namespace {

using namespace rlhmmddm;

struct Flag {
    const char* option;
    const char* key;
    const char* help;
};

// Command-line shortcuts for configuration keys; each is added only to the
// subcommands whose schema has the key.
constexpr Flag kFlags[] = {
    {"--seed", "seed", "random seed"},
    {"--threads", "threads", "worker threads"},
    {"--out", "out", "output directory"},
    {"--model", "model", "rl-hmm-ddm | rl-ddm | rl-hmm"},
    {"--replicates", "replicates", "bootstrap replicates"},
    {"--input", "input", "dataset directory"},
    {"--fit", "fit", "fit.json artifact"},
    {"--truth", "truth", "truth.csv sidecar"},
    {"--scores", "scores", "per-subject measure table"},
    {"--variables", "variables", "per-subject variable table"},
    {"--measure", "measure", "measure column name"},
    {"--window", "window", "accuracy window (trials)"},
};

struct Parsed {
    std::string config_path;
    std::vector<std::string> sets;
    std::map<std::string, std::string> flags;
    std::vector<std::string> fits;
};

std::string describe(const config::Schema& schema) {
    std::string s = "\nConfiguration keys (key = value in --config, or --set key=value):\n";
    for (const auto& k : schema) {
        s += "  " + k.name;
        if (!k.default_value.empty()) s += " [" + k.default_value + "]";
        s += "  " + k.help + "\n";
    }
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reinforcement-learning drift-diffusion models with latent engagement states"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    const auto& cmds = cli::commands();
    std::vector<Parsed> parsed(cmds.size());
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < cmds.size(); ++i) {
        CLI::App* sub = app.add_subcommand(cmds[i].name, cmds[i].description);
        sub->footer(describe(cmds[i].schema));
        Parsed& p = parsed[i];
        sub->add_option("--config", p.config_path, "key = value configuration file (a manifest.conf works)")
            ->check(CLI::ExistingFile);
        sub->add_option("--set", p.sets, "override a configuration key, key=value (repeatable)");
        for (const Flag& f : kFlags) {
            bool present = false;
            for (const auto& k : cmds[i].schema) present = present || k.name == f.key;
            if (present) sub->add_option(f.option, p.flags[f.key], f.help);
        }
        if (cmds[i].name == "summarize") sub->add_option("fits", p.fits, "fit.json artifacts");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    for (std::size_t i = 0; i < cmds.size(); ++i) {
        if (!subs[i]->parsed()) continue;
        try {
            config::Config cfg(cmds[i].name, cmds[i].schema);
            if (!parsed[i].config_path.empty()) cfg.load_file(parsed[i].config_path);
            for (const Flag& f : kFlags) {
                const auto it = parsed[i].flags.find(f.key);
                if (it != parsed[i].flags.end() && subs[i]->count(f.option) > 0) cfg.set(f.key, it->second);
            }
            if (!parsed[i].fits.empty()) {
                std::string joined;
                for (const auto& f : parsed[i].fits) joined += (joined.empty() ? "" : ",") + f;
                cfg.set("fits", joined);
            }
            for (const auto& s : parsed[i].sets) cfg.set(s);
            cfg.validate();
            return cmds[i].run(cfg);
        } catch (const DataError& e) {
            std::cerr << "error: " << e.what() << '\n';
        } catch (const DomainError& e) {
            std::cerr << "error: " << e.what() << '\n';
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
        }
        return cli::kExitError;
    }
    return cli::kExitError;
}
