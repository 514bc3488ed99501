#pragma once

#include <string_view>

#include "qfb/linalg.hpp"

// Computational-basis conventions, fixed project-wide:
//   - qubit 1 is the leftmost tensor factor = most significant bit
//   - |g> = 0, |e> = 1, so "gege" indexes bit pattern 0101
//   - sigma_z |e> = +|e>

namespace qfb {

inline std::size_t dim(int n_qubits) { return std::size_t{1} << n_qubits; }

struct StateVector {
    CVec amplitudes;
    int n_qubits = 0;

    StateVector() = default;
    StateVector(CVec a, int n);
};

struct DensityMatrix {
    CMat entries;
    int n_qubits = 0;

    DensityMatrix() = default;
    DensityMatrix(CMat e, int n);
};

struct OperatorMatrix {
    CMat entries;
    int n_qubits = 0;

    OperatorMatrix() = default;
    OperatorMatrix(CMat e, int n);
};

// single-qubit operators, (g, e) ordering
CMat sigma_x();
CMat sigma_y();
CMat sigma_z();
CMat sigma_minus();  // |g><e|
CMat sigma_plus();   // |e><g|

/// I (x) ... (x) op2 at position j (x) ... (x) I, 1-based j.
OperatorMatrix embed_single(const CMat& op2, int j, int n_qubits);

enum class Collective { plus, minus, z };

/// J_kind = sum_j sigma_{j,kind}
OperatorMatrix collective(Collective kind, int n_qubits);

/// c rho c^dag - (c^dag c rho + rho c^dag c)/2
CMat dissipator(const OperatorMatrix& c, const DensityMatrix& rho);

cplx expectation(const OperatorMatrix& a, const StateVector& psi);  // <psi|A|psi>
cplx expectation(const OperatorMatrix& a, const DensityMatrix& rho);  // tr(A rho)

/// Basis state from a label such as "gege", "ge", or "0101".
StateVector basis_state(std::string_view label);
StateVector ground_state(int n_qubits);
StateVector normalized(StateVector psi);

DensityMatrix pure_density(const StateVector& psi);
DensityMatrix maximally_mixed(int n_qubits);

double purity(const DensityMatrix& rho);
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

/// max elementwise deviation from Hermiticity / unit trace / positivity.
struct PhysicalityReport {
    double hermiticity_dev;
    double trace_dev;
    double min_eigenvalue;
};
PhysicalityReport check_physical(const DensityMatrix& rho);

}  // namespace qfb
