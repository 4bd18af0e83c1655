#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rfdop/rfdop.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCheck = 3;

struct CommandOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::string out = "-";
    bool check = false;
    std::vector<std::string> overrides;
    std::optional<int> figure_id;
};

using ConfigPtr = std::unique_ptr<rfdop_config, decltype(&rfdop_config_destroy)>;

int report(rfdop_status status) {
    const std::string field = rfdop_last_error_field();
    std::cerr << "rfdop: " << rfdop_status_name(status);
    if (!field.empty()) std::cerr << " [" << field << "]";
    std::cerr << ": " << rfdop_last_error() << '\n';
    return status == RFDOP_ERR_CONFIG ? kExitConfig : kExitFailure;
}

int set_key(rfdop_config* config, const std::string& key, const std::string& value) {
    const auto status = rfdop_config_set(config, key.c_str(), value.c_str());
    return status == RFDOP_OK ? kExitOk : report(status);
}

int run(const std::string& name, const CommandOptions& o) {
    rfdop_config* raw = nullptr;
    if (const auto s = rfdop_config_create(&raw); s != RFDOP_OK) return report(s);
    ConfigPtr config(raw, &rfdop_config_destroy);

    if (!o.config_path.empty()) {
        if (const auto s = rfdop_config_load_file(config.get(), o.config_path.c_str()); s != RFDOP_OK) return report(s);
    }
    for (const auto& kv : o.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::cerr << "rfdop: --set expects key=value, got '" << kv << "'\n";
            return kExitConfig;
        }
        if (int rc = set_key(config.get(), kv.substr(0, eq), kv.substr(eq + 1))) return rc;
    }
    if (o.seed) {
        if (int rc = set_key(config.get(), "seed", std::to_string(*o.seed))) return rc;
    }
    if (o.trials) {
        if (int rc = set_key(config.get(), "trials", std::to_string(*o.trials))) return rc;
    }
    if (o.figure_id) {
        if (int rc = set_key(config.get(), "figure", std::to_string(*o.figure_id))) return rc;
    }

    rfdop_command command{};
    if (const auto s = rfdop_command_from_name(name.c_str(), &command); s != RFDOP_OK) return report(s);

    char* csv = nullptr;
    const auto status = rfdop_run(config.get(), command, o.check ? 1 : 0, &csv);
    std::unique_ptr<char, decltype(&rfdop_string_free)> text(csv, &rfdop_string_free);
    if (status != RFDOP_OK && status != RFDOP_ERR_CHECK_FAILED) return report(status);

    if (o.out == "-") {
        std::cout << text.get();
        std::cout.flush();
    } else {
        std::ofstream file(o.out, std::ios::binary);
        if (!(file << text.get())) {
            std::cerr << "rfdop: cannot write '" << o.out << "'\n";
            return kExitFailure;
        }
    }
    if (status == RFDOP_ERR_CHECK_FAILED) {
        std::cerr << "rfdop: check failed: " << rfdop_last_error() << '\n';
        return kExitCheck;
    }
    if (o.check) std::cerr << "rfdop: check passed\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Doppler-based motion detection bounds and simulations for UHF RFID replies"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(rfdop_version()));

    const std::map<std::string, std::string> commands = {
        {"bounds", "Variance bounds and detectability per speed, ratio and p_err"},
        {"vmin", "Minimum detectable speed for the configured link budget"},
        {"figure", "Dataset for one of the figures 4, 5, 7, 8, 9, 10, 11"},
        {"simulate-mcrb", "Monte Carlo estimator variance against the MCRB"},
        {"simulate-detect", "Monte Carlo static/moving classification error rate"},
        {"noise-figure", "Receiver noise density back-solved from sensitivity"},
    };

    std::map<std::string, CommandOptions> options;
    for (const auto& [name, help] : commands) {
        auto& o = options[name];
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config,-c", o.config_path, "Key-value config file")->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "Master seed");
        sub->add_option("--trials", o.trials, "Monte Carlo trials per grid point");
        sub->add_option("--out,-o", o.out, "Output CSV path ('-' for stdout)");
        sub->add_option("--set,-s", o.overrides, "Config override key=value (repeatable)");
        sub->add_flag("--check", o.check, "Apply the acceptance windows; exit 3 on failure");
        if (name == "figure") sub->add_option("id", o.figure_id, "Figure id");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    for (const auto& [name, o] : options) {
        if (app.got_subcommand(name)) return run(name, o);
    }
    return kExitConfig;
}
