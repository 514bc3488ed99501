#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "qfb/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"qfb - quantum-jump feedback simulator for collectively decaying qubits"};
    app.set_version_flag("--version", qfb::kVersion);

    std::string config_path;
    qfb::cli::CliOptions opt;
    std::uint64_t seed = 0;

    app.add_option("--config", config_path, "experiment config (key = value text, or a JSON sidecar)")
        ->required();
    app.add_option("--out", opt.out_override, "output path (overrides the config's `out`)");
    auto* seed_opt = app.add_option("--seed", seed, "override the RNG base seed");
    app.add_option("--threads", opt.threads, "OpenMP thread count (0 = default)");
    app.add_flag("--quiet", opt.quiet, "suppress progress output");

    CLI11_PARSE(app, argc, argv);
    if (seed_opt->count() > 0) opt.seed_override = seed;

    try {
        const std::string text = qfb::cli::load_config_text(config_path);
        return qfb::cli::run_command(qfb::parse_config(text), opt);
    } catch (const qfb::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
