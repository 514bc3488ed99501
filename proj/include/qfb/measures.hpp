#pragma once

#include <cstdint>

#include "qfb/hilbert.hpp"

namespace qfb {

/// tr rho_alpha^2 for the reduction of |psi> onto the qubit subset given by
/// `mask` (bit n_qubits-1 = qubit 1). psi need not be normalised.
double subset_purity(const StateVector& psi, unsigned mask);

/// Multipartite pure-state concurrence
///   C_N = 2^{1-N/2} sqrt((2^N - 2) <psi|psi>^2 - sum_alpha tr rho_alpha^2),
/// summed over all 2^N - 2 proper nonempty subsystem reductions.
/// Requires N >= 2.
double cn_concurrence(const StateVector& psi);

/// Loose upper bound 2^{1-N/2} sqrt(2^N - 2).
double cn_cap(int n_qubits);

struct ConcurrenceRange {
    double minimum = 0.0;
    double maximum = 0.0;
    StateVector argmin;
    StateVector argmax;
    std::vector<double> restart_minima;  // local optimum of every restart
    std::vector<double> restart_maxima;
    int n_restarts = 0;
    std::uint64_t seed = 0;
};

/// Min/max of cn_concurrence over unit vectors in the dark (J=0) subspace,
/// by multi-start Nelder-Mead over the real 2d-sphere of complex dark
/// coefficients. N in {2, 4, 6, 8}.
ConcurrenceRange dark_concurrence_range(int n_qubits, int n_restarts = 100,
                                        std::uint64_t seed = 42);

enum class RefState { ghz, w, linear_cluster };

/// GHZ, W, or linear cluster state (controlled-phase chain on |+>^N).
StateVector reference_state(RefState kind, int n_qubits);

double overlap(const StateVector& psi, const StateVector& target);   // |<t|psi>|^2
double overlap(const DensityMatrix& rho, const StateVector& target); // <t|rho|t>

}  // namespace qfb
