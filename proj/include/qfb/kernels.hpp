#pragma once

#include <complex>
#include <cstddef>

// Dense complex kernels. Everything hot in the simulator funnels through
// these three operations, so they exist in two interchangeable flavours:
//
//   kern::ref — serial reference, the ground truth
//   kern::par — OpenMP, parallelised over output rows
//
// Both share the same per-row loop body and accumulation order, so their
// results are bitwise identical (asserted in the kernel tests). The
// unqualified entry points dispatch on problem size and fall back to the
// serial path inside an enclosing parallel region. bench/ compares the two.

namespace qfb::kern {

using cplx = std::complex<double>;

namespace ref {
// c (m x n) = a (m x k) * b (k x n), row-major
void matmul(const cplx* a, const cplx* b, cplx* c, std::size_t m, std::size_t k, std::size_t n);
// y (m) = a (m x n) * x (n)
void matvec(const cplx* a, const cplx* x, cplx* y, std::size_t m, std::size_t n);
// y += alpha * x
void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n);
}  // namespace ref

namespace par {
void matmul(const cplx* a, const cplx* b, cplx* c, std::size_t m, std::size_t k, std::size_t n);
void matvec(const cplx* a, const cplx* x, cplx* y, std::size_t m, std::size_t n);
void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n);
}  // namespace par

void matmul(const cplx* a, const cplx* b, cplx* c, std::size_t m, std::size_t k, std::size_t n);
void matvec(const cplx* a, const cplx* x, cplx* y, std::size_t m, std::size_t n);
void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n);

}  // namespace qfb::kern
