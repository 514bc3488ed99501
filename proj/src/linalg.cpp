#include "qfb/linalg.hpp"

#include <cmath>
#include <stdexcept>

#include "qfb/kernels.hpp"

namespace qfb {

CMat CMat::identity(std::size_t n) {
    CMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMat CMat::from_rows(std::initializer_list<std::initializer_list<cplx>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r ? rows.begin()->size() : 0;
    CMat m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) throw std::invalid_argument("CMat::from_rows: ragged rows");
        std::size_t j = 0;
        for (const cplx& v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

CMat& CMat::operator+=(const CMat& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("CMat +=: shape mismatch");
    for (std::size_t i = 0; i < d_.size(); ++i) d_[i] += o.d_[i];
    return *this;
}

CMat& CMat::operator-=(const CMat& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("CMat -=: shape mismatch");
    for (std::size_t i = 0; i < d_.size(); ++i) d_[i] -= o.d_[i];
    return *this;
}

CMat& CMat::operator*=(cplx s) {
    for (auto& v : d_) v *= s;
    return *this;
}

CMat operator+(CMat a, const CMat& b) { return a += b; }
CMat operator-(CMat a, const CMat& b) { return a -= b; }
CMat operator*(CMat a, cplx s) { return a *= s; }
CMat operator*(cplx s, CMat a) { return a *= s; }

CMat operator*(const CMat& a, const CMat& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("CMat *: shape mismatch");
    CMat c(a.rows(), b.cols());
    kern::matmul(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
    return c;
}

CVec operator*(const CMat& a, const CVec& x) {
    if (a.cols() != x.size()) throw std::invalid_argument("CMat * vec: shape mismatch");
    CVec y(a.rows());
    kern::matvec(a.data(), x.data(), y.data(), a.rows(), a.cols());
    return y;
}

CMat adjoint(const CMat& a) {
    CMat r(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(j, i) = std::conj(a(i, j));
    return r;
}

CMat transpose(const CMat& a) {
    CMat r(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(j, i) = a(i, j);
    return r;
}

CMat conjugate(const CMat& a) {
    CMat r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = std::conj(a(i, j));
    return r;
}

CMat kron(const CMat& a, const CMat& b) {
    CMat r(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            if (aij == cplx{}) continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    r(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return r;
}

CMat commutator(const CMat& a, const CMat& b) { return a * b - b * a; }

CMat outer(const CVec& a, const CVec& b) {
    CMat r(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r(i, j) = a[i] * std::conj(b[j]);
    return r;
}

cplx trace(const CMat& a) {
    cplx t{};
    for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
    return t;
}

double max_abs(const CMat& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j)));
    return m;
}

double frobenius_norm(const CMat& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

double one_norm(const CMat& a) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.rows(); ++i) s += std::abs(a(i, j));
        m = std::max(m, s);
    }
    return m;
}

bool is_hermitian(const CMat& a, double tol) {
    if (a.rows() != a.cols()) return false;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i; j < a.cols(); ++j)
            if (std::abs(a(i, j) - std::conj(a(j, i))) > tol) return false;
    return true;
}

bool is_unitary(const CMat& a, double tol) {
    if (a.rows() != a.cols()) return false;
    CMat g = adjoint(a) * a;
    for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) -= 1.0;
    return max_abs(g) <= tol;
}

void hermitize(CMat& a) {
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i; j < a.cols(); ++j) {
            const cplx v = 0.5 * (a(i, j) + std::conj(a(j, i)));
            a(i, j) = v;
            a(j, i) = std::conj(v);
        }
}

double norm(const CVec& v) {
    double s = 0.0;
    for (const cplx& x : v) s += std::norm(x);
    return std::sqrt(s);
}

double max_abs(const CVec& v) {
    double m = 0.0;
    for (const cplx& x : v) m = std::max(m, std::abs(x));
    return m;
}

void normalize(CVec& v) {
    const double n = norm(v);
    if (n == 0.0) throw std::invalid_argument("normalize: zero vector");
    for (cplx& x : v) x /= n;
}

cplx inner(const CVec& a, const CVec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("inner: size mismatch");
    cplx s{};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

void add_scaled(CVec& y, cplx alpha, const CVec& x) {
    if (y.size() != x.size()) throw std::invalid_argument("add_scaled: size mismatch");
    kern::axpy(alpha, x.data(), y.data(), x.size());
}

CVec scaled(const CVec& x, cplx alpha) {
    CVec y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = alpha * x[i];
    return y;
}

CVec operator+(CVec a, const CVec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("CVec +: size mismatch");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

CVec operator-(CVec a, const CVec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("CVec -: size mismatch");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}

CVec vec_rows(const CMat& a) {
    CVec v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v[i] = a.data()[i];
    return v;
}

CMat unvec_rows(const CVec& v, std::size_t n) {
    if (v.size() != n * n) throw std::invalid_argument("unvec_rows: size mismatch");
    CMat a(n, n);
    for (std::size_t i = 0; i < v.size(); ++i) a.data()[i] = v[i];
    return a;
}

}  // namespace qfb
