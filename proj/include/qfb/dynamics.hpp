#pragma once

#include <cstdint>
#include <vector>

#include "qfb/feedback.hpp"
#include "qfb/hilbert.hpp"

namespace qfb {

/// All rates in units of the collective decay Gamma( = g^2/kappa); time in 1/Gamma.
struct SimConfig {
    int n_qubits = 4;
    double omega = 1.0;             // resonant drive Omega
    double gamma_collective = 1.0;  // Gamma (0 switches the collective channel off)
    std::vector<double> gamma_spont;  // per-qubit gamma_j; empty = 0, single value broadcasts
    FeedbackScheme feedback;          // empty unitary means identity
    double t_final = 100.0;
    double tolerance = 1e-8;  // integrator relative tolerance
    std::uint64_t seed = 42;

    std::vector<double> resolved_gamma() const;
    void validate() const;
};

/// Precomputed operators of the feedback master equation for one SimConfig:
/// drive J_+ + J_-, combined jump U J_-, drift generator, spontaneous channels.
class ModelOps {
public:
    explicit ModelOps(const SimConfig& cfg);

    int n_qubits() const { return n_; }
    std::size_t dimension() const { return d_; }
    const CMat& drive() const { return h_drive_; }
    const CMat& jump_op() const { return c_; }           // U J_-
    const CMat& lowering() const { return jm_; }         // J_-
    const CMat& drift() const { return drift_; }         // no-jump generator G
    const std::vector<double>& gamma() const { return gamma_; }
    double gamma_collective() const { return big_gamma_; }

    /// out = -i Omega [J_+ + J_-, rho] + Gamma D[U J_-] rho + sum_j gamma_j D[sigma_j-] rho,
    /// operating on row-major flattened d x d matrices.
    void apply_liouvillian(const cplx* rho, cplx* out) const;

    /// Dense (d^2 x d^2) matrix of the map above, row-major vectorisation.
    CMat superoperator() const;

    double collective_rate(const CVec& psi) const;      // Gamma <J_+ J_->
    double spont_rate(const CVec& psi, int qubit) const;  // gamma_j <n_j>
    void apply_collective_jump(CVec& psi) const;        // psi <- U J_- psi (unnormalised)
    void apply_spont_jump(CVec& psi, int qubit) const;  // psi <- sigma_j- psi (unnormalised)

private:
    int n_ = 0;
    std::size_t d_ = 0;
    double omega_ = 0.0;
    double big_gamma_ = 0.0;
    std::vector<double> gamma_;
    CMat h_drive_, jm_, c_, c_dag_, cdc_, drift_;
    mutable CMat w1_, w2_;  // matmul scratch, single-threaded use per instance
};

/// Right-hand side of the master equation for one state (spec-level wrapper).
CMat liouvillian_apply(const DensityMatrix& rho, const SimConfig& cfg);

struct MasterStats {
    std::size_t n_steps = 0;
    std::size_t n_rejected = 0;
    double max_trace_dev = 0.0;
    double max_herm_dev = 0.0;
};

struct MasterResult {
    std::vector<double> sample_times;
    std::vector<DensityMatrix> states;
    DensityMatrix final_state;
    MasterStats stats;
};

/// Adaptive RK integration of the master equation to t_final, sampling at the
/// given times (t_final is always included). Trace is renormalised whenever
/// its drift exceeds 1e-12.
MasterResult evolve_master(const DensityMatrix& rho0, double t_final, const SimConfig& cfg,
                           std::vector<double> sample_times = {});

struct SteadyStateResult {
    DensityMatrix rho;
    bool converged = false;
    double residual = 0.0;  // ||drho/dt||_max when stopping
    double t_reached = 0.0;
};

/// Propagate until ||drho/dt||_max < residual_tol * Gamma or t_max is hit,
/// reporting convergence. Uses exact exponential propagator doubling for
/// Hilbert dimension <= 16, windowed RK integration beyond.
SteadyStateResult steady_state(const SimConfig& cfg, const DensityMatrix& rho0,
                               double t_max = 1e6, double residual_tol = 1e-10);

/// Cross-check route: null space of the Liouvillian superoperator.
/// Throws if the null space is degenerate or traceless (e.g. gamma = 0).
DensityMatrix steady_state_nullspace(const SimConfig& cfg);

struct JumpEvent {
    double time = 0.0;
    int channel = 0;  // 0 = collective (feedback-dressed), 1..N = spontaneous on qubit j
};

/// Optional early-stop: halt once |<target|psi>|^2 first exceeds threshold.
struct TrajectoryStop {
    CVec target;
    double overlap_threshold = 0.9;
};

struct TrajectoryRecord {
    std::vector<double> sample_times;
    std::vector<StateVector> states;  // normalised at sample points
    std::vector<JumpEvent> jumps;
    std::uint64_t seed = 0;
    bool stopped_early = false;
    double stop_time = 0.0;
};

/// Single quantum trajectory: no-jump drift integrated without
/// renormalisation, jump when ||psi||^2 first reaches a uniform draw,
/// jump time located by bisection, channel chosen by relative rates.
TrajectoryRecord run_trajectory(const StateVector& psi0, double t_final, std::uint64_t seed,
                                const SimConfig& cfg, std::vector<double> sample_times = {},
                                const TrajectoryStop* stop = nullptr);

struct EnsembleEstimate {
    std::vector<double> sample_times;
    std::vector<DensityMatrix> rho_hat;
    int n_trajectories = 0;
    // one row per requested observable, one column per sample time
    std::vector<std::vector<double>> observable_mean;
    std::vector<std::vector<double>> observable_stderr;
};

/// Mean projector over trajectories with per-trajectory seeds base_seed + k.
/// Trajectories run concurrently; the reduction is a fixed-shape chunked sum,
/// so results are bitwise independent of the thread count.
EnsembleEstimate ensemble_average(const StateVector& psi0, double t_final, int n_traj,
                                  std::uint64_t base_seed, const SimConfig& cfg,
                                  std::vector<double> sample_times,
                                  const std::vector<OperatorMatrix>& observables = {});

}  // namespace qfb
