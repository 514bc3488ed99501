#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "qfb/config.hpp"

namespace qfb::cli {

struct CliOptions {
    std::string out_override;
    std::optional<std::uint64_t> seed_override;
    int threads = 0;  // 0 = library default
    bool quiet = false;
};

/// Load a config document: flat key=value text, or a JSON sidecar from a
/// previous run (its embedded config_text is re-parsed verbatim).
std::string load_config_text(const std::string& path);

/// Execute one resolved experiment. Returns the process exit code
/// (0 ok, 2 config error, 3 numerical failure).
int run_command(ExperimentSpec spec, const CliOptions& opt);

}  // namespace qfb::cli
