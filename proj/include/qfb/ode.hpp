#pragma once

#include <cstddef>
#include <functional>

#include "qfb/linalg.hpp"

namespace qfb {

struct OdeOptions {
    double rtol = 1e-8;
    double atol = 1e-12;
    double h_init = 0.0;  // 0 = choose automatically
    double h_max = 0.0;   // 0 = unbounded
};

struct OdeStats {
    std::size_t n_steps = 0;
    std::size_t n_rejected = 0;
};

/// Dormand-Prince 5(4) adaptive stepper over flat complex state vectors.
/// Used for both master-equation (vectorised rho) and trajectory (psi)
/// integration. Throws std::runtime_error on step-size underflow.
class AdaptiveRk {
public:
    using Deriv = std::function<void(double t, const CVec& y, CVec& dydt)>;
    /// Called after every accepted step; return false to halt integration.
    using Observer =
        std::function<bool(double t_prev, const CVec& y_prev, double t, const CVec& y)>;

    AdaptiveRk(Deriv deriv, std::size_t dimension, OdeOptions options = {});

    /// Integrate y in place from t0 to t_end (lands on t_end exactly unless
    /// the observer halts). Returns the time actually reached.
    double run(CVec& y, double t0, double t_end, const Observer& observer = {});

    const OdeStats& stats() const { return stats_; }

private:
    double error_norm(const CVec& y0, const CVec& y1) const;

    Deriv f_;
    OdeOptions opt_;
    OdeStats stats_;
    CVec k_[7];
    CVec y_tmp_, y_new_, y_err_, y_prev_;
};

}  // namespace qfb
