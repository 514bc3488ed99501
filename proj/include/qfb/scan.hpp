#pragma once

#include "qfb/config.hpp"

namespace qfb {

/// One row of the local-drive amplitude scan: steady-state overlap with the
/// target, with and without spontaneous emission, feedback (A, A, -A, -A).
struct ScanRowA {
    double amplitude = 0.0;
    double overlap_no_se = 0.0;
    double overlap_with_se = 0.0;
    bool converged_no_se = false;
    bool converged_with_se = false;
};

/// One row of the (A, eps) scan with the detuned-pair feedback and
/// spontaneous emission on.
struct ScanRowAEps {
    double amplitude = 0.0;
    double eps = 0.0;
    double overlap = 0.0;
    bool converged = false;
};

/// Grid points run concurrently; rows come back in deterministic grid order.
std::vector<ScanRowA> run_scan_A(const ExperimentSpec& spec);
std::vector<ScanRowAEps> run_scan_A_eps(const ExperimentSpec& spec);

}  // namespace qfb
