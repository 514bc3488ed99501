#include "qfb/scan.hpp"

#include <omp.h>

#include "qfb/measures.hpp"

namespace qfb {

namespace {

constexpr double kSteadyTmax = 1e6;

SimConfig scan_point_config(const ExperimentSpec& spec, double amplitude, double eps,
                            bool with_se) {
    SimConfig cfg = spec.sim;
    cfg.feedback = eps == 0.0
                       ? local_drive_feedback({amplitude, amplitude, -amplitude, -amplitude})
                       : epsilon_pair_feedback(amplitude, eps);
    if (!with_se) cfg.gamma_spont.clear();
    return cfg;
}

}  // namespace

std::vector<ScanRowA> run_scan_A(const ExperimentSpec& spec) {
    const auto target = resolve_target(spec);
    if (!target) throw ConfigError("scan-A needs a target state");
    const std::vector<double> grid = spec.a_grid.values();
    const DensityMatrix rho0 = pure_density(ground_state(spec.sim.n_qubits));

    std::vector<ScanRowA> rows(grid.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(grid.size()); ++i) {
        const double a = grid[i];
        ScanRowA row;
        row.amplitude = a;
        const SteadyStateResult dry =
            steady_state(scan_point_config(spec, a, 0.0, false), rho0, kSteadyTmax);
        row.overlap_no_se = overlap(dry.rho, *target);
        row.converged_no_se = dry.converged;
        const SteadyStateResult wet =
            steady_state(scan_point_config(spec, a, 0.0, true), rho0, kSteadyTmax);
        row.overlap_with_se = overlap(wet.rho, *target);
        row.converged_with_se = wet.converged;
        rows[i] = row;
    }
    return rows;
}

std::vector<ScanRowAEps> run_scan_A_eps(const ExperimentSpec& spec) {
    const auto target = resolve_target(spec);
    if (!target) throw ConfigError("scan-A-eps needs a target state");
    const std::vector<double> a_grid = spec.a_grid.values();
    const std::vector<double> e_grid = spec.eps_grid.values();
    const DensityMatrix rho0 = pure_density(ground_state(spec.sim.n_qubits));

    std::vector<ScanRowAEps> rows(a_grid.size() * e_grid.size());
#pragma omp parallel for schedule(dynamic) collapse(2)
    for (std::ptrdiff_t ia = 0; ia < static_cast<std::ptrdiff_t>(a_grid.size()); ++ia)
        for (std::ptrdiff_t ie = 0; ie < static_cast<std::ptrdiff_t>(e_grid.size()); ++ie) {
            ScanRowAEps row;
            row.amplitude = a_grid[ia];
            row.eps = e_grid[ie];
            const SteadyStateResult ss =
                steady_state(scan_point_config(spec, row.amplitude, row.eps, true), rho0,
                             kSteadyTmax);
            row.overlap = overlap(ss.rho, *target);
            row.converged = ss.converged;
            rows[static_cast<std::size_t>(ia) * e_grid.size() + ie] = row;
        }
    return rows;
}

}  // namespace qfb
