// Timing comparison of the serial reference kernels against the OpenMP
// variants, plus end-to-end throughput of the parallel simulation paths.
// Run with --smoke for a quick correctness-oriented pass (used by ctest).

#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include <omp.h>

#include "qfb/dynamics.hpp"
#include "qfb/kernels.hpp"
#include "qfb/measures.hpp"
#include "qfb/rng.hpp"
#include "qfb/spin_structure.hpp"

using namespace qfb;

namespace {

CMat random_mat(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    CMat m(n, n);
    for (std::size_t i = 0; i < n * n; ++i) m.data()[i] = cplx{rng.normal(), rng.normal()};
    return m;
}

template <class Fn>
double time_best_of(int reps, Fn&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const double t0 = omp_get_wtime();
        fn();
        best = std::min(best, omp_get_wtime() - t0);
    }
    return best;
}

void bench_matmul(std::size_t n, int reps) {
    const CMat a = random_mat(n, 1);
    const CMat b = random_mat(n, 2);
    CMat c(n, n);
    const double flops = 8.0 * static_cast<double>(n) * n * n;

    const double t_ref = time_best_of(reps, [&] {
        kern::ref::matmul(a.data(), b.data(), c.data(), n, n, n);
    });
    CMat c_ref = c;
    const double t_par = time_best_of(reps, [&] {
        kern::par::matmul(a.data(), b.data(), c.data(), n, n, n);
    });
    const bool same = std::memcmp(c_ref.data(), c.data(), n * n * sizeof(cplx)) == 0;

    std::printf("matmul %4zu: serial %8.2f ms (%6.2f GF/s) | omp %8.2f ms (%6.2f GF/s) | "
                "speedup %.2fx | bitwise %s\n",
                n, 1e3 * t_ref, flops / t_ref * 1e-9, 1e3 * t_par, flops / t_par * 1e-9,
                t_ref / t_par, same ? "ok" : "MISMATCH");
}

void bench_matvec(std::size_t n, int reps) {
    const CMat a = random_mat(n, 3);
    CVec x(n), y(n);
    Rng rng(4);
    for (cplx& v : x) v = cplx{rng.normal(), rng.normal()};
    const double flops = 8.0 * static_cast<double>(n) * n;

    const double t_ref =
        time_best_of(reps, [&] { kern::ref::matvec(a.data(), x.data(), y.data(), n, n); });
    const double t_par =
        time_best_of(reps, [&] { kern::par::matvec(a.data(), x.data(), y.data(), n, n); });
    std::printf("matvec %4zu: serial %8.3f ms (%6.2f GF/s) | omp %8.3f ms (%6.2f GF/s) | "
                "speedup %.2fx\n",
                n, 1e3 * t_ref, flops / t_ref * 1e-9, 1e3 * t_par, flops / t_par * 1e-9,
                t_ref / t_par);
}

void bench_trajectories(int n_traj, double t_final) {
    const CoupledBasis basis = build_coupled_basis(4);
    const StateVector target = singlet_state(2.0, -1.0, 0.0, 0.0);
    SimConfig cfg;
    cfg.n_qubits = 4;
    cfg.gamma_spont = {1e-3};
    cfg.feedback = schematic_feedback(SchematicKind::one_way, basis, target);
    std::vector<double> samples{t_final};

    const int max_threads = omp_get_max_threads();
    omp_set_num_threads(1);
    const double t1 = omp_get_wtime();
    ensemble_average(ground_state(4), t_final, n_traj, 42, cfg, samples);
    const double serial = omp_get_wtime() - t1;

    omp_set_num_threads(max_threads);
    const double t2 = omp_get_wtime();
    ensemble_average(ground_state(4), t_final, n_traj, 42, cfg, samples);
    const double par = omp_get_wtime() - t2;

    std::printf("ensemble %d trajectories (T=%g): 1 thread %7.2f ms | %d threads %7.2f ms | "
                "speedup %.2fx\n",
                n_traj, t_final, 1e3 * serial, max_threads, 1e3 * par, serial / par);
}

void bench_steady_state() {
    SimConfig cfg;
    cfg.n_qubits = 4;
    cfg.gamma_spont = {1e-3};
    cfg.feedback = epsilon_pair_feedback(0.9, 0.1);
    const DensityMatrix rho0 = pure_density(ground_state(4));
    const double t = time_best_of(2, [&] { steady_state(cfg, rho0); });
    std::printf("steady-state solve (N=4, propagator doubling): %.1f ms\n", 1e3 * t);
}

}  // namespace

int main(int argc, char** argv) {
    const bool smoke = argc > 1 && std::string(argv[1]) == "--smoke";
    std::printf("threads available: %d\n", omp_get_max_threads());

    if (smoke) {
        bench_matmul(96, 2);
        bench_matvec(512, 3);
        bench_trajectories(16, 10.0);
        return 0;
    }

    for (std::size_t n : {64u, 128u, 256u, 512u}) bench_matmul(n, 5);
    for (std::size_t n : {256u, 1024u, 4096u}) bench_matvec(n, 20);
    bench_trajectories(256, 50.0);
    bench_steady_state();
    return 0;
}
