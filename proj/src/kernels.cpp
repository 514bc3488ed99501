#include "qfb/kernels.hpp"

#include <algorithm>
#include <omp.h>

namespace qfb::kern {

namespace {

// Shared row bodies. The complex products are written out in real/imaginary
// parts so the compiler vectorises them instead of calling __muldc3.

inline void matmul_row(const cplx* a, const cplx* b, cplx* c, std::size_t i, std::size_t k,
                       std::size_t n) {
    cplx* ci = c + i * n;
    std::fill(ci, ci + n, cplx{});
    const cplx* ai = a + i * k;
    for (std::size_t l = 0; l < k; ++l) {
        const double ar = ai[l].real();
        const double aim = ai[l].imag();
        if (ar == 0.0 && aim == 0.0) continue;  // embeddings and ladder ops are mostly zeros
        const cplx* bl = b + l * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double br = bl[j].real();
            const double bi = bl[j].imag();
            ci[j] += cplx{ar * br - aim * bi, ar * bi + aim * br};
        }
    }
}

inline void matvec_row(const cplx* a, const cplx* x, cplx* y, std::size_t i, std::size_t n) {
    const cplx* ai = a + i * n;
    double sr = 0.0, si = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double ar = ai[j].real();
        const double aim = ai[j].imag();
        const double xr = x[j].real();
        const double xi = x[j].imag();
        sr += ar * xr - aim * xi;
        si += ar * xi + aim * xr;
    }
    y[i] = cplx{sr, si};
}

inline void axpy_span(cplx alpha, const cplx* x, cplx* y, std::size_t lo, std::size_t hi) {
    const double ar = alpha.real();
    const double ai = alpha.imag();
    for (std::size_t j = lo; j < hi; ++j) {
        const double xr = x[j].real();
        const double xi = x[j].imag();
        y[j] += cplx{ar * xr - ai * xi, ar * xi + ai * xr};
    }
}

// Parallelise only when there is real work per thread and we are not already
// inside an outer parallel region (trajectory ensembles, scan grids).
inline bool go_parallel(std::size_t flops_scale) {
    return flops_scale >= (std::size_t{1} << 18) && omp_get_max_threads() > 1 && !omp_in_parallel();
}

}  // namespace

namespace ref {

void matmul(const cplx* a, const cplx* b, cplx* c, std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) matmul_row(a, b, c, i, k, n);
}

void matvec(const cplx* a, const cplx* x, cplx* y, std::size_t m, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) matvec_row(a, x, y, i, n);
}

void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) { axpy_span(alpha, x, y, 0, n); }

}  // namespace ref

namespace par {

void matmul(const cplx* a, const cplx* b, cplx* c, std::size_t m, std::size_t k, std::size_t n) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i)
        matmul_row(a, b, c, static_cast<std::size_t>(i), k, n);
}

void matvec(const cplx* a, const cplx* x, cplx* y, std::size_t m, std::size_t n) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i)
        matvec_row(a, x, y, static_cast<std::size_t>(i), n);
}

void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
#pragma omp parallel
    {
        const std::size_t nt = static_cast<std::size_t>(omp_get_num_threads());
        const std::size_t id = static_cast<std::size_t>(omp_get_thread_num());
        const std::size_t chunk = (n + nt - 1) / nt;
        const std::size_t lo = std::min(n, id * chunk);
        const std::size_t hi = std::min(n, lo + chunk);
        axpy_span(alpha, x, y, lo, hi);
    }
}

}  // namespace par

void matmul(const cplx* a, const cplx* b, cplx* c, std::size_t m, std::size_t k, std::size_t n) {
    if (go_parallel(m * k * n))
        par::matmul(a, b, c, m, k, n);
    else
        ref::matmul(a, b, c, m, k, n);
}

void matvec(const cplx* a, const cplx* x, cplx* y, std::size_t m, std::size_t n) {
    if (go_parallel(m * n))
        par::matvec(a, x, y, m, n);
    else
        ref::matvec(a, x, y, m, n);
}

void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
    if (go_parallel(n))
        par::axpy(alpha, x, y, n);
    else
        ref::axpy(alpha, x, y, n);
}

}  // namespace qfb::kern
