#include "qfb/decomp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace qfb {

namespace {
[[noreturn]] void lapack_fail(const char* routine, int info) {
    throw std::runtime_error(std::string(routine) + " failed, info=" + std::to_string(info));
}
}  // namespace

Eigh eigh(const CMat& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("eigh: matrix not square");
    const lapack_int n = static_cast<lapack_int>(a.rows());
    Eigh out;
    out.vectors = a;
    out.values.resize(a.rows());
    const int info = LAPACKE_zheev(LAPACK_ROW_MAJOR, 'V', 'U', n, out.vectors.data(), n,
                                   out.values.data());
    if (info != 0) lapack_fail("zheev", info);
    return out;
}

std::vector<double> hermitian_eigenvalues(const CMat& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("eigh: matrix not square");
    const lapack_int n = static_cast<lapack_int>(a.rows());
    CMat work = a;
    std::vector<double> w(a.rows());
    const int info = LAPACKE_zheev(LAPACK_ROW_MAJOR, 'N', 'U', n, work.data(), n, w.data());
    if (info != 0) lapack_fail("zheev", info);
    return w;
}

Svd svd(const CMat& a) {
    const lapack_int m = static_cast<lapack_int>(a.rows());
    const lapack_int n = static_cast<lapack_int>(a.cols());
    CMat work = a;
    Svd out;
    out.values.resize(std::min(a.rows(), a.cols()));
    out.u = CMat(a.rows(), a.rows());
    out.vh = CMat(a.cols(), a.cols());
    std::vector<double> superb(std::max<std::size_t>(1, out.values.size()));
    const int info = LAPACKE_zgesvd(LAPACK_ROW_MAJOR, 'A', 'A', m, n, work.data(), n,
                                    out.values.data(), out.u.data(), m, out.vh.data(), n,
                                    superb.data());
    if (info != 0) lapack_fail("zgesvd", info);
    return out;
}

std::vector<CVec> nullspace(const CMat& a, double tol) {
    const Svd s = svd(a);
    std::vector<CVec> basis;
    for (std::size_t r = 0; r < s.vh.rows(); ++r) {
        const double sv = r < s.values.size() ? s.values[r] : 0.0;
        if (sv < tol) {
            CVec v(s.vh.cols());
            for (std::size_t j = 0; j < s.vh.cols(); ++j) v[j] = std::conj(s.vh(r, j));
            basis.push_back(std::move(v));
        }
    }
    return basis;
}

CMat lu_solve(CMat a, CMat b) {
    if (a.rows() != a.cols() || a.rows() != b.rows())
        throw std::invalid_argument("lu_solve: shape mismatch");
    const lapack_int n = static_cast<lapack_int>(a.rows());
    const lapack_int nrhs = static_cast<lapack_int>(b.cols());
    std::vector<lapack_int> ipiv(a.rows());
    const int info = LAPACKE_zgesv(LAPACK_ROW_MAJOR, n, nrhs, a.data(), n, ipiv.data(), b.data(),
                                   nrhs);
    if (info != 0) lapack_fail("zgesv", info);
    return b;
}

CMat expi_hermitian(const CMat& f) {
    if (!is_hermitian(f, 1e-10)) throw std::invalid_argument("expi_hermitian: input not Hermitian");
    CMat h = f;
    hermitize(h);
    const Eigh e = eigh(h);
    const std::size_t n = h.rows();
    // V * diag(e^{i w}) * V^dag
    CMat phase(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            phase(i, j) = e.vectors(i, j) * std::polar(1.0, e.values[j]);
    return phase * adjoint(e.vectors);
}

CMat expm(const CMat& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("expm: matrix not square");
    const std::size_t n = a.rows();
    static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,            16380.0,
                               182.0,               1.0};
    const double theta13 = 5.371920351148152;

    int s = 0;
    const double nrm = one_norm(a);
    if (nrm > theta13) s = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    CMat as = a;
    if (s > 0) as *= cplx{std::ldexp(1.0, -s), 0.0};

    const CMat eye = CMat::identity(n);
    const CMat a2 = as * as;
    const CMat a4 = a2 * a2;
    const CMat a6 = a2 * a4;

    CMat w1 = b[13] * a6 + b[11] * a4 + b[9] * a2;
    CMat w2 = a6 * w1 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * eye;
    CMat u = as * w2;
    CMat z1 = b[12] * a6 + b[10] * a4 + b[8] * a2;
    CMat v = a6 * z1 + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * eye;

    CMat r = lu_solve(v - u, v + u);
    for (int i = 0; i < s; ++i) r = r * r;
    return r;
}

}  // namespace qfb
