#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfb/dynamics.hpp"

namespace qfb {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Inclusive arithmetic grid "start:step:stop".
struct Range {
    double start = 0.0;
    double step = 0.0;
    double stop = 0.0;

    std::vector<double> values() const;
    std::string str() const;
};

/// A fully resolved batch run. Produced by parse_config; every field has its
/// default applied and validated, unknown keys are rejected by name.
struct ExperimentSpec {
    std::string command;  // dark-basis | validate | evolve | trajectory | ensemble
                          // | scan-A | scan-A-eps | concurrence-range
    SimConfig sim;

    std::string feedback_kind = "identity";  // identity | local_drive | epsilon_pair
                                             // | schematic_one_way | schematic_two_way
    double feedback_amplitude = 0.0;         // A
    double feedback_eps = 0.0;               // eps
    std::vector<double> feedback_a;          // local_drive amplitudes

    std::string target = "auto";  // auto | psi_t | psi_bb | singlet | none
    Range a_grid{0.0, 0.1, 6.283185307179586};
    Range eps_grid{0.0, 0.05, 0.5};
    int n_trajectories = 200;
    int n_samples = 200;
    int n_restarts = 100;
    bool write_amplitudes = false;
    std::string out_path;  // may be overridden by --out

    /// Flat key=value text round-trip of the resolved spec (sidecar payload).
    std::string resolved_text() const;
};

/// Parse the flat key=value document (# comments, blank lines allowed).
/// Values: integers, reals, strings, comma lists, ranges "start:step:stop".
/// Unknown keys fail loudly. Throws ConfigError naming the offending key.
ExperimentSpec parse_config(const std::string& text);

/// Build the feedback scheme named by the spec (resolving the target for the
/// schematic kinds). Validates kind/N compatibility.
FeedbackScheme build_feedback(const ExperimentSpec& spec);

/// Resolve the spec's target state ("auto" picks psi_t for N=4, the two-qubit
/// singlet for N=2, none otherwise). Empty optional = no target.
std::optional<StateVector> resolve_target(const ExperimentSpec& spec);

}  // namespace qfb
