#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace qfb {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

/// Dense row-major complex matrix. Sizes in this project top out at
/// 2^N x 2^N for N <= 12, so everything stays dense by design.
class CMat {
public:
    CMat() = default;
    CMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), d_(rows * cols) {}

    static CMat identity(std::size_t n);
    static CMat from_rows(std::initializer_list<std::initializer_list<cplx>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return d_.size(); }
    bool empty() const { return d_.empty(); }

    cplx& operator()(std::size_t i, std::size_t j) { return d_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return d_[i * cols_ + j]; }

    cplx* data() { return d_.data(); }
    const cplx* data() const { return d_.data(); }

    CMat& operator+=(const CMat& o);
    CMat& operator-=(const CMat& o);
    CMat& operator*=(cplx s);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    CVec d_;
};

CMat operator+(CMat a, const CMat& b);
CMat operator-(CMat a, const CMat& b);
CMat operator*(CMat a, cplx s);
CMat operator*(cplx s, CMat a);
CMat operator*(const CMat& a, const CMat& b);
CVec operator*(const CMat& a, const CVec& x);

CMat adjoint(const CMat& a);
CMat transpose(const CMat& a);
CMat conjugate(const CMat& a);
CMat kron(const CMat& a, const CMat& b);
CMat commutator(const CMat& a, const CMat& b);
CMat outer(const CVec& a, const CVec& b);  // |a><b|
cplx trace(const CMat& a);
double max_abs(const CMat& a);
double frobenius_norm(const CMat& a);
double one_norm(const CMat& a);  // max column sum of |entries|
bool is_hermitian(const CMat& a, double tol);
bool is_unitary(const CMat& a, double tol);
void hermitize(CMat& a);  // a <- (a + a^dag)/2

// vector helpers
double norm(const CVec& v);
double max_abs(const CVec& v);
void normalize(CVec& v);             // throws std::invalid_argument on zero vector
cplx inner(const CVec& a, const CVec& b);  // <a|b>, conjugate-linear in a
void add_scaled(CVec& y, cplx alpha, const CVec& x);
CVec scaled(const CVec& x, cplx alpha);
CVec operator+(CVec a, const CVec& b);
CVec operator-(CVec a, const CVec& b);

// row-major vectorisation: vec(rho)[i*d + j] = rho(i, j)
CVec vec_rows(const CMat& a);
CMat unvec_rows(const CVec& v, std::size_t n);

}  // namespace qfb
