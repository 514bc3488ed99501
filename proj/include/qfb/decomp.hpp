#pragma once

#include <vector>

#include "qfb/linalg.hpp"

namespace qfb {

struct Eigh {
    std::vector<double> values;  // ascending
    CMat vectors;                // columns are eigenvectors
};

/// Hermitian eigendecomposition (LAPACK zheev). Input must be Hermitian;
/// only the values/vectors of (a + a^dag)/2 are meaningful otherwise.
Eigh eigh(const CMat& a);

std::vector<double> hermitian_eigenvalues(const CMat& a);

struct Svd {
    std::vector<double> values;  // descending
    CMat u;                      // m x m
    CMat vh;                     // n x n, rows are right singular vectors^dag
};

Svd svd(const CMat& a);

/// Right null-space basis of a: rows of vh whose singular value < tol,
/// returned as column vectors.
std::vector<CVec> nullspace(const CMat& a, double tol);

/// Solve a x = b by LU with partial pivoting (LAPACK zgesv).
CMat lu_solve(CMat a, CMat b);

/// exp(i f) for Hermitian f, via eigendecomposition. Exactly unitary up to
/// roundoff. Throws std::invalid_argument if f is not Hermitian (1e-10).
CMat expi_hermitian(const CMat& f);

/// General dense exponential, scaling-and-squaring with the degree-13 Pade
/// approximant (Higham 2005).
CMat expm(const CMat& a);

}  // namespace qfb
