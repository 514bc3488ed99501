#include "qfb/measures.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <stdexcept>

#include <omp.h>

#include "qfb/rng.hpp"
#include "qfb/spin_structure.hpp"

namespace qfb {

double subset_purity(const StateVector& psi, unsigned mask) {
    const int n = psi.n_qubits;
    const unsigned full = static_cast<unsigned>(dim(n)) - 1;
    if ((mask & ~full) != 0 || mask == 0 || mask == full)
        throw std::invalid_argument("subset_purity: mask must be a proper nonempty subset");

    std::vector<int> sub_bits, comp_bits;  // bit positions, high to low
    for (int b = n - 1; b >= 0; --b)
        ((mask >> b) & 1u ? sub_bits : comp_bits).push_back(b);
    const std::size_t ds = std::size_t{1} << sub_bits.size();
    const std::size_t dc = std::size_t{1} << comp_bits.size();

    auto scatter = [](std::size_t packed, const std::vector<int>& bits) {
        std::size_t x = 0;
        for (std::size_t i = 0; i < bits.size(); ++i)
            if ((packed >> (bits.size() - 1 - i)) & 1u) x |= std::size_t{1} << bits[i];
        return x;
    };

    CMat rho(ds, ds);
    CVec u(ds);
    for (std::size_t b = 0; b < dc; ++b) {
        const std::size_t xb = scatter(b, comp_bits);
        for (std::size_t a = 0; a < ds; ++a) u[a] = psi.amplitudes[scatter(a, sub_bits) | xb];
        for (std::size_t a = 0; a < ds; ++a) {
            if (u[a] == cplx{}) continue;
            for (std::size_t a2 = 0; a2 < ds; ++a2) rho(a, a2) += u[a] * std::conj(u[a2]);
        }
    }
    double p = 0.0;
    for (std::size_t i = 0; i < ds * ds; ++i) p += std::norm(rho.data()[i]);
    return p;
}

double cn_concurrence(const StateVector& psi) {
    const int n = psi.n_qubits;
    if (n < 2) throw std::invalid_argument("cn_concurrence: requires N >= 2");
    StateVector s = normalized(psi);
    const unsigned full = static_cast<unsigned>(dim(n)) - 1;
    double purities = 0.0;
    for (unsigned mask = 1; mask < full; ++mask) purities += subset_purity(s, mask);
    const double inside = (static_cast<double>(dim(n)) - 2.0) - purities;
    return std::exp2(1.0 - 0.5 * n) * std::sqrt(std::max(0.0, inside));
}

double cn_cap(int n_qubits) {
    return std::exp2(1.0 - 0.5 * n_qubits) * std::sqrt(static_cast<double>(dim(n_qubits)) - 2.0);
}

namespace {

// Standard Nelder-Mead on R^dim; returns best point found.
struct NmResult {
    std::vector<double> x;
    double f;
};

NmResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                     std::vector<double> x0, double step, double ftol, int max_iter) {
    const std::size_t d = x0.size();
    std::vector<std::vector<double>> xs(d + 1, x0);
    std::vector<double> fs(d + 1);
    for (std::size_t i = 0; i < d; ++i) xs[i + 1][i] += step;
    for (std::size_t i = 0; i <= d; ++i) fs[i] = f(xs[i]);

    std::vector<std::size_t> order(d + 1);
    for (int it = 0; it < max_iter; ++it) {
        for (std::size_t i = 0; i <= d; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        const std::size_t best = order[0], worst = order[d], second = order[d - 1];
        if (std::abs(fs[worst] - fs[best]) < ftol * (1.0 + std::abs(fs[best]))) break;

        std::vector<double> centroid(d, 0.0);
        for (std::size_t i = 0; i <= d; ++i)
            if (i != worst)
                for (std::size_t k = 0; k < d; ++k) centroid[k] += xs[i][k] / d;

        auto blend = [&](double t) {
            std::vector<double> p(d);
            for (std::size_t k = 0; k < d; ++k) p[k] = centroid[k] + t * (centroid[k] - xs[worst][k]);
            return p;
        };

        std::vector<double> xr = blend(1.0);
        const double fr = f(xr);
        if (fr < fs[best]) {
            std::vector<double> xe = blend(2.0);
            const double fe = f(xe);
            if (fe < fr) {
                xs[worst] = std::move(xe);
                fs[worst] = fe;
            } else {
                xs[worst] = std::move(xr);
                fs[worst] = fr;
            }
        } else if (fr < fs[second]) {
            xs[worst] = std::move(xr);
            fs[worst] = fr;
        } else {
            std::vector<double> xc = blend(fr < fs[worst] ? 0.5 : -0.5);
            const double fc = f(xc);
            if (fc < std::min(fr, fs[worst])) {
                xs[worst] = std::move(xc);
                fs[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= d; ++i) {
                    if (i == best) continue;
                    for (std::size_t k = 0; k < d; ++k)
                        xs[i][k] = xs[best][k] + 0.5 * (xs[i][k] - xs[best][k]);
                    fs[i] = f(xs[i]);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= d; ++i)
        if (fs[i] < fs[best]) best = i;
    return {xs[best], fs[best]};
}

StateVector dark_combination(const std::vector<StateVector>& dark, const std::vector<double>& x) {
    CVec amps(dark.front().amplitudes.size());
    for (std::size_t i = 0; i < dark.size(); ++i)
        add_scaled(amps, cplx{x[2 * i], x[2 * i + 1]}, dark[i].amplitudes);
    return {std::move(amps), dark.front().n_qubits};
}

}  // namespace

ConcurrenceRange dark_concurrence_range(int n_qubits, int n_restarts, std::uint64_t seed) {
    if (n_qubits != 2 && n_qubits != 4 && n_qubits != 6 && n_qubits != 8)
        throw std::invalid_argument("dark_concurrence_range: N must be one of {2, 4, 6, 8}");
    const std::vector<StateVector> dark = dark_basis(n_qubits);
    const std::size_t d = dark.size();

    ConcurrenceRange out;
    out.n_restarts = n_restarts;
    out.seed = seed;
    if (d == 1) {
        out.minimum = out.maximum = cn_concurrence(dark[0]);
        out.argmin = out.argmax = dark[0];
        out.restart_minima = {out.minimum};
        out.restart_maxima = {out.maximum};
        return out;
    }

    // sign = +1 minimises C, -1 maximises
    auto objective = [&](const std::vector<double>& x, double sign) {
        double nrm2 = 0.0;
        for (double v : x) nrm2 += v * v;
        if (nrm2 < 1e-16) return 1e6;
        return sign * cn_concurrence(dark_combination(dark, x));
    };

    struct Best {
        double f = 1e9;
        std::vector<double> x;
    };

    auto optimise = [&](double sign, std::vector<double>& all_optima) {
        std::vector<Best> results(n_restarts);
#pragma omp parallel for schedule(dynamic)
        for (int r = 0; r < n_restarts; ++r) {
            Rng rng(seed + 0x9e37ULL * static_cast<std::uint64_t>(r) + (sign < 0 ? 1u << 20 : 0));
            std::vector<double> x0(2 * d);
            for (double& v : x0) v = rng.normal();
            auto fn = [&](const std::vector<double>& x) { return objective(x, sign); };
            NmResult nm = nelder_mead(fn, x0, 0.4, 1e-9, 500 * static_cast<int>(2 * d));
            nm = nelder_mead(fn, nm.x, 0.05, 1e-11, 500 * static_cast<int>(2 * d));  // polish
            results[r] = {nm.f, nm.x};
        }
        Best best;
        for (const Best& b : results) {
            all_optima.push_back(sign * b.f);
            if (b.f < best.f) best = b;
        }
        return best;
    };

    const Best lo = optimise(+1.0, out.restart_minima);
    const Best hi = optimise(-1.0, out.restart_maxima);
    out.minimum = lo.f;
    out.maximum = -hi.f;
    out.argmin = normalized(dark_combination(dark, lo.x));
    out.argmax = normalized(dark_combination(dark, hi.x));
    return out;
}

StateVector reference_state(RefState kind, int n_qubits) {
    if (n_qubits < 2) throw std::invalid_argument("reference_state: requires N >= 2");
    const std::size_t d = dim(n_qubits);
    CVec amps(d);
    switch (kind) {
        case RefState::ghz:
            amps[0] = amps[d - 1] = 1.0 / std::sqrt(2.0);
            break;
        case RefState::w: {
            const double a = 1.0 / std::sqrt(static_cast<double>(n_qubits));
            for (int j = 0; j < n_qubits; ++j) amps[std::size_t{1} << j] = a;
            break;
        }
        case RefState::linear_cluster: {
            const double a = std::exp2(-0.5 * n_qubits);
            for (std::size_t x = 0; x < d; ++x) {
                const int adj = std::popcount(x & (x >> 1));
                amps[x] = (adj % 2 ? -a : a);
            }
            break;
        }
    }
    return {std::move(amps), n_qubits};
}

double overlap(const StateVector& psi, const StateVector& target) {
    if (psi.amplitudes.size() != target.amplitudes.size())
        throw std::invalid_argument("overlap: dimension mismatch");
    return std::norm(inner(target.amplitudes, psi.amplitudes));
}

double overlap(const DensityMatrix& rho, const StateVector& target) {
    if (rho.entries.rows() != target.amplitudes.size())
        throw std::invalid_argument("overlap: dimension mismatch");
    return std::real(inner(target.amplitudes, rho.entries * target.amplitudes));
}

}  // namespace qfb
