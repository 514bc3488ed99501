#include "qfb/hilbert.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qfb/decomp.hpp"

namespace qfb {

namespace {
void require_power_dim(std::size_t got, int n, const char* what) {
    if (n < 1 || got != dim(n))
        throw std::invalid_argument(std::string(what) + ": dimension is not 2^n_qubits");
}
}  // namespace

StateVector::StateVector(CVec a, int n) : amplitudes(std::move(a)), n_qubits(n) {
    require_power_dim(amplitudes.size(), n, "StateVector");
}

DensityMatrix::DensityMatrix(CMat e, int n) : entries(std::move(e)), n_qubits(n) {
    require_power_dim(entries.rows(), n, "DensityMatrix");
    if (entries.rows() != entries.cols()) throw std::invalid_argument("DensityMatrix: not square");
}

OperatorMatrix::OperatorMatrix(CMat e, int n) : entries(std::move(e)), n_qubits(n) {
    require_power_dim(entries.rows(), n, "OperatorMatrix");
    if (entries.rows() != entries.cols()) throw std::invalid_argument("OperatorMatrix: not square");
}

CMat sigma_x() { return CMat::from_rows({{0, 1}, {1, 0}}); }
CMat sigma_y() { return CMat::from_rows({{0, cplx{0, -1}}, {cplx{0, 1}, 0}}); }
CMat sigma_z() { return CMat::from_rows({{-1, 0}, {0, 1}}); }
CMat sigma_minus() { return CMat::from_rows({{0, 1}, {0, 0}}); }
CMat sigma_plus() { return CMat::from_rows({{0, 0}, {1, 0}}); }

OperatorMatrix embed_single(const CMat& op2, int j, int n_qubits) {
    if (op2.rows() != 2 || op2.cols() != 2)
        throw std::invalid_argument("embed_single: op2 must be 2x2");
    if (n_qubits < 1) throw std::invalid_argument("embed_single: n_qubits must be positive");
    if (j < 1 || j > n_qubits) throw std::out_of_range("embed_single: qubit index out of range");

    const std::size_t d = dim(n_qubits);
    const std::size_t mask = std::size_t{1} << (n_qubits - j);  // qubit 1 = MSB
    CMat m(d, d);
    for (std::size_t row = 0; row < d; ++row) {
        const std::size_t rb = (row & mask) ? 1 : 0;
        for (std::size_t cb = 0; cb < 2; ++cb) {
            const cplx v = op2(rb, cb);
            if (v == cplx{}) continue;
            const std::size_t col = (row & ~mask) | (cb ? mask : 0);
            m(row, col) += v;
        }
    }
    return {std::move(m), n_qubits};
}

OperatorMatrix collective(Collective kind, int n_qubits) {
    if (n_qubits < 1) throw std::invalid_argument("collective: n_qubits must be positive");
    const CMat op2 = kind == Collective::plus    ? sigma_plus()
                     : kind == Collective::minus ? sigma_minus()
                                                 : sigma_z();
    CMat sum(dim(n_qubits), dim(n_qubits));
    for (int j = 1; j <= n_qubits; ++j) sum += embed_single(op2, j, n_qubits).entries;
    return {std::move(sum), n_qubits};
}

CMat dissipator(const OperatorMatrix& c, const DensityMatrix& rho) {
    if (c.entries.rows() != rho.entries.rows())
        throw std::invalid_argument("dissipator: dimension mismatch");
    const CMat cd = adjoint(c.entries);
    const CMat cdc = cd * c.entries;
    CMat out = c.entries * rho.entries * cd;
    out -= 0.5 * (cdc * rho.entries + rho.entries * cdc);
    return out;
}

cplx expectation(const OperatorMatrix& a, const StateVector& psi) {
    if (a.entries.cols() != psi.amplitudes.size())
        throw std::invalid_argument("expectation: dimension mismatch");
    return inner(psi.amplitudes, a.entries * psi.amplitudes);
}

cplx expectation(const OperatorMatrix& a, const DensityMatrix& rho) {
    if (a.entries.cols() != rho.entries.rows())
        throw std::invalid_argument("expectation: dimension mismatch");
    return trace(a.entries * rho.entries);
}

StateVector basis_state(std::string_view label) {
    const int n = static_cast<int>(label.size());
    if (n < 1) throw std::invalid_argument("basis_state: empty label");
    std::size_t idx = 0;
    for (char ch : label) {
        idx <<= 1;
        if (ch == 'e' || ch == '1')
            idx |= 1;
        else if (ch != 'g' && ch != '0')
            throw std::invalid_argument("basis_state: label must use g/e or 0/1");
    }
    CVec a(dim(n));
    a[idx] = 1.0;
    return {std::move(a), n};
}

StateVector ground_state(int n_qubits) {
    CVec a(dim(n_qubits));
    a[0] = 1.0;
    return {std::move(a), n_qubits};
}

StateVector normalized(StateVector psi) {
    normalize(psi.amplitudes);
    return psi;
}

DensityMatrix pure_density(const StateVector& psi) {
    return {outer(psi.amplitudes, psi.amplitudes), psi.n_qubits};
}

DensityMatrix maximally_mixed(int n_qubits) {
    const std::size_t d = dim(n_qubits);
    CMat m(d, d);
    for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0 / static_cast<double>(d);
    return {std::move(m), n_qubits};
}

double purity(const DensityMatrix& rho) {
    double s = 0.0;
    for (std::size_t i = 0; i < rho.entries.rows(); ++i)
        for (std::size_t j = 0; j < rho.entries.cols(); ++j) s += std::norm(rho.entries(i, j));
    return s;
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    CMat d = a.entries - b.entries;
    hermitize(d);
    double s = 0.0;
    for (double w : hermitian_eigenvalues(d)) s += std::abs(w);
    return 0.5 * s;
}

PhysicalityReport check_physical(const DensityMatrix& rho) {
    PhysicalityReport r{};
    const CMat& m = rho.entries;
    double hd = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            hd = std::max(hd, std::abs(m(i, j) - std::conj(m(j, i))));
    r.hermiticity_dev = hd;
    r.trace_dev = std::abs(trace(m) - cplx{1.0, 0.0});
    CMat h = m;
    hermitize(h);
    const auto w = hermitian_eigenvalues(h);
    r.min_eigenvalue = w.empty() ? 0.0 : w.front();
    return r;
}

}  // namespace qfb
