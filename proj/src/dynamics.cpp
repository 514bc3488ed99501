#include "qfb/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <omp.h>

#include "qfb/decomp.hpp"
#include "qfb/kernels.hpp"
#include "qfb/ode.hpp"
#include "qfb/rng.hpp"

namespace qfb {

std::vector<double> SimConfig::resolved_gamma() const {
    if (gamma_spont.empty()) return std::vector<double>(n_qubits, 0.0);
    if (gamma_spont.size() == 1) return std::vector<double>(n_qubits, gamma_spont[0]);
    if (gamma_spont.size() != static_cast<std::size_t>(n_qubits))
        throw std::invalid_argument("SimConfig: gamma list must have one entry or one per qubit");
    return gamma_spont;
}

void SimConfig::validate() const {
    if (n_qubits < 1 || n_qubits > 12)
        throw std::invalid_argument("SimConfig: n_qubits out of supported range");
    if (omega < 0.0 || gamma_collective < 0.0)
        throw std::invalid_argument("SimConfig: rates must be non-negative");
    for (double g : resolved_gamma())
        if (g < 0.0) throw std::invalid_argument("SimConfig: rates must be non-negative");
    if (tolerance <= 0.0) throw std::invalid_argument("SimConfig: tolerance must be positive");
    if (!feedback.unitary.empty()) {
        if (feedback.unitary.rows() != dim(n_qubits))
            throw std::invalid_argument("SimConfig: feedback dimension does not match n_qubits");
        if (!is_unitary(feedback.unitary, 1e-8))
            throw std::invalid_argument("SimConfig: feedback unitary is not unitary");
    }
}

namespace {
std::size_t qubit_mask(int n, int j) { return std::size_t{1} << (n - j); }
}  // namespace

ModelOps::ModelOps(const SimConfig& cfg) {
    cfg.validate();
    n_ = cfg.n_qubits;
    d_ = dim(n_);
    omega_ = cfg.omega;
    big_gamma_ = cfg.gamma_collective;
    gamma_ = cfg.resolved_gamma();

    jm_ = collective(Collective::minus, n_).entries;
    const CMat jp = adjoint(jm_);
    h_drive_ = jp + jm_;
    c_ = cfg.feedback.unitary.empty() ? jm_ : cfg.feedback.unitary * jm_;
    c_dag_ = adjoint(c_);
    cdc_ = jp * jm_;  // U cancels in c^dag c

    // no-jump generator: -i Omega (J_+ + J_-) - (Gamma/2) J_+ J_- - sum_j (gamma_j/2) n_j
    drift_ = cplx{0.0, -omega_} * h_drive_;
    drift_ += cplx{-0.5 * big_gamma_, 0.0} * cdc_;
    for (std::size_t i = 0; i < d_; ++i) {
        double gsum = 0.0;
        for (int j = 1; j <= n_; ++j)
            if (i & qubit_mask(n_, j)) gsum += gamma_[j - 1];
        drift_(i, i) -= 0.5 * gsum;
    }

    w1_ = CMat(d_, d_);
    w2_ = CMat(d_, d_);
}

void ModelOps::apply_liouvillian(const cplx* rho, cplx* out) const {
    const std::size_t d = d_;
    const std::size_t dd = d * d;

    // -i Omega [H, rho]
    kern::matmul(h_drive_.data(), rho, w1_.data(), d, d, d);
    kern::matmul(rho, h_drive_.data(), w2_.data(), d, d, d);
    const cplx miw{0.0, -omega_};
    for (std::size_t i = 0; i < dd; ++i) out[i] = miw * (w1_.data()[i] - w2_.data()[i]);

    if (big_gamma_ > 0.0) {
        kern::matmul(c_.data(), rho, w1_.data(), d, d, d);
        kern::matmul(w1_.data(), c_dag_.data(), w2_.data(), d, d, d);
        kern::axpy(big_gamma_, w2_.data(), out, dd);
        kern::matmul(cdc_.data(), rho, w1_.data(), d, d, d);
        kern::axpy(-0.5 * big_gamma_, w1_.data(), out, dd);
        kern::matmul(rho, cdc_.data(), w1_.data(), d, d, d);
        kern::axpy(-0.5 * big_gamma_, w1_.data(), out, dd);
    }

    for (int j = 1; j <= n_; ++j) {
        const double g = gamma_[j - 1];
        if (g <= 0.0) continue;
        const std::size_t m = qubit_mask(n_, j);
        for (std::size_t i = 0; i < d; ++i) {
            const bool bi = i & m;
            for (std::size_t k = 0; k < d; ++k) {
                const bool bk = k & m;
                // gain sigma_- rho sigma_+ lands on (i, k) with both bits clear
                if (!bi && !bk) out[i * d + k] += g * rho[(i | m) * d + (k | m)];
                // loss -(1/2){n_j, rho}
                const int nb = int(bi) + int(bk);
                if (nb) out[i * d + k] -= 0.5 * g * nb * rho[i * d + k];
            }
        }
    }
}

CMat ModelOps::superoperator() const {
    const CMat eye = CMat::identity(d_);
    // row-major vec: vec(A rho B) = (A (x) B^T) vec(rho)
    CMat l = cplx{0.0, -omega_} * (kron(h_drive_, eye) - kron(eye, transpose(h_drive_)));
    if (big_gamma_ > 0.0) {
        l += big_gamma_ * kron(c_, conjugate(c_));
        l -= (0.5 * big_gamma_) * (kron(cdc_, eye) + kron(eye, transpose(cdc_)));
    }
    for (int j = 1; j <= n_; ++j) {
        const double g = gamma_[j - 1];
        if (g <= 0.0) continue;
        const CMat sj = embed_single(sigma_minus(), j, n_).entries;
        const CMat nj = embed_single(sigma_plus() * sigma_minus(), j, n_).entries;
        l += g * kron(sj, conjugate(sj));
        l -= (0.5 * g) * (kron(nj, eye) + kron(eye, transpose(nj)));
    }
    return l;
}

double ModelOps::collective_rate(const CVec& psi) const {
    if (big_gamma_ <= 0.0) return 0.0;
    CVec t(d_);
    kern::matvec(jm_.data(), psi.data(), t.data(), d_, d_);
    const double n = norm(t);
    return big_gamma_ * n * n;
}

double ModelOps::spont_rate(const CVec& psi, int qubit) const {
    const double g = gamma_[qubit - 1];
    if (g <= 0.0) return 0.0;
    const std::size_t m = qubit_mask(n_, qubit);
    double p = 0.0;
    for (std::size_t i = 0; i < d_; ++i)
        if (i & m) p += std::norm(psi[i]);
    return g * p;
}

void ModelOps::apply_collective_jump(CVec& psi) const {
    CVec t(d_);
    kern::matvec(c_.data(), psi.data(), t.data(), d_, d_);
    psi.swap(t);
}

void ModelOps::apply_spont_jump(CVec& psi, int qubit) const {
    const std::size_t m = qubit_mask(n_, qubit);
    for (std::size_t i = 0; i < d_; ++i)
        psi[i] = (i & m) ? cplx{} : psi[i | m];
}

CMat liouvillian_apply(const DensityMatrix& rho, const SimConfig& cfg) {
    if (rho.entries.rows() != dim(cfg.n_qubits))
        throw std::invalid_argument("liouvillian_apply: dimension mismatch");
    const ModelOps ops(cfg);
    CMat out(ops.dimension(), ops.dimension());
    ops.apply_liouvillian(rho.entries.data(), out.data());
    return out;
}

namespace {

std::vector<double> sorted_samples(std::vector<double> samples, double t_final) {
    std::erase_if(samples, [&](double t) { return t < 0.0 || t > t_final; });
    samples.push_back(t_final);
    std::sort(samples.begin(), samples.end());
    samples.erase(std::unique(samples.begin(), samples.end()), samples.end());
    return samples;
}

void require_physical(const DensityMatrix& rho, const char* where) {
    const double tr = std::abs(trace(rho.entries) - cplx{1.0, 0.0});
    if (tr > 1e-6) throw std::invalid_argument(std::string(where) + ": trace of rho0 is not 1");
    if (!is_hermitian(rho.entries, 1e-6))
        throw std::invalid_argument(std::string(where) + ": rho0 is not Hermitian");
}

double flat_trace_dev(const CVec& y, std::size_t d, cplx& tr) {
    tr = cplx{};
    for (std::size_t i = 0; i < d; ++i) tr += y[i * d + i];
    return std::abs(tr - cplx{1.0, 0.0});
}

double flat_herm_dev(const CVec& y, std::size_t d) {
    double m = 0.0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = i; k < d; ++k)
            m = std::max(m, std::abs(y[i * d + k] - std::conj(y[k * d + i])));
    return m;
}

}  // namespace

MasterResult evolve_master(const DensityMatrix& rho0, double t_final, const SimConfig& cfg,
                           std::vector<double> sample_times) {
    if (t_final <= 0.0) throw std::invalid_argument("evolve_master: t_final must be positive");
    require_physical(rho0, "evolve_master");
    const ModelOps ops(cfg);
    const std::size_t d = ops.dimension();
    if (rho0.entries.rows() != d) throw std::invalid_argument("evolve_master: dimension mismatch");

    MasterResult result;
    result.sample_times = sorted_samples(std::move(sample_times), t_final);

    CVec y = vec_rows(rho0.entries);
    OdeOptions opt;
    opt.rtol = cfg.tolerance;
    AdaptiveRk rk([&](double, const CVec& v, CVec& dv) { ops.apply_liouvillian(v.data(), dv.data()); },
                  y.size(), opt);

    MasterStats stats;
    bool renorm_pending = false;
    auto observer = [&](double, const CVec&, double, const CVec& cur) {
        cplx tr;
        const double tdev = flat_trace_dev(cur, d, tr);
        stats.max_trace_dev = std::max(stats.max_trace_dev, tdev);
        stats.max_herm_dev = std::max(stats.max_herm_dev, flat_herm_dev(cur, d));
        if (tdev > 1e-12) {
            renorm_pending = true;
            return false;  // halt, renormalise, resume
        }
        return true;
    };

    double t = 0.0;
    if (!result.sample_times.empty() && result.sample_times.front() == 0.0)
        result.states.emplace_back(unvec_rows(y, d), cfg.n_qubits);

    for (double t_b : result.sample_times) {
        if (t_b == 0.0) continue;
        while (t < t_b) {
            t = rk.run(y, t, t_b, observer);
            if (renorm_pending) {
                cplx tr;
                flat_trace_dev(y, d, tr);
                const cplx scale = 1.0 / tr;
                for (cplx& v : y) v *= scale;
                renorm_pending = false;
            }
        }
        result.states.emplace_back(unvec_rows(y, d), cfg.n_qubits);
    }

    stats.n_steps = rk.stats().n_steps;
    stats.n_rejected = rk.stats().n_rejected;
    result.stats = stats;
    result.final_state = result.states.back();
    return result;
}

SteadyStateResult steady_state(const SimConfig& cfg, const DensityMatrix& rho0, double t_max,
                               double residual_tol) {
    require_physical(rho0, "steady_state");
    const ModelOps ops(cfg);
    const std::size_t d = ops.dimension();
    if (rho0.entries.rows() != d) throw std::invalid_argument("steady_state: dimension mismatch");

    const double rate_scale = cfg.gamma_collective > 0.0 ? cfg.gamma_collective : 1.0;
    const double tol = residual_tol * rate_scale;

    CVec deriv(d * d);
    auto residual_of = [&](const CVec& y) {
        ops.apply_liouvillian(y.data(), deriv.data());
        return max_abs(deriv);
    };

    auto finish = [&](CVec y, double t, double res) {
        SteadyStateResult out;
        CMat rho = unvec_rows(y, d);
        hermitize(rho);
        const cplx tr = trace(rho);
        if (std::abs(tr) > 1e-12) rho *= (1.0 / tr);
        out.rho = DensityMatrix(std::move(rho), cfg.n_qubits);
        out.converged = res < tol;
        out.residual = res;
        out.t_reached = t;
        return out;
    };

    CVec y0 = vec_rows(rho0.entries);
    double res = residual_of(y0);
    if (res < tol) return finish(std::move(y0), 0.0, res);

    if (d <= 16) {
        // exact exponential propagation with doubling: rho(h 2^k) = P^{2^k} rho0
        const double h0 = std::min(1.0, t_max);
        const CMat l = ops.superoperator();
        CMat p = expm(l * cplx{h0, 0.0});
        double t = h0;
        CVec y(d * d);
        while (true) {
            kern::matvec(p.data(), y0.data(), y.data(), d * d, d * d);
            res = residual_of(y);
            if (res < tol || t >= t_max) return finish(std::move(y), t, res);
            p = p * p;
            t *= 2.0;
        }
    }

    // fallback: windowed adaptive integration. The quasi-steady residual
    // floor tracks the local integration error, so step tighter than the
    // residual target.
    OdeOptions opt;
    opt.rtol = std::min(cfg.tolerance, 0.1 * tol);
    opt.atol = 1e-14;
    AdaptiveRk rk([&](double, const CVec& v, CVec& dv) { ops.apply_liouvillian(v.data(), dv.data()); },
                  d * d, opt);
    CVec y = std::move(y0);
    double t = 0.0;
    double window = 10.0;
    while (t < t_max) {
        const double t_next = std::min(t_max, t + window);
        t = rk.run(y, t, t_next);
        cplx tr;
        flat_trace_dev(y, d, tr);
        if (std::abs(tr) > 1e-12) {
            const cplx scale = 1.0 / tr;
            for (cplx& v : y) v *= scale;
        }
        res = residual_of(y);
        if (res < tol) break;
        window = std::min(window * 2.0, 2000.0);
    }
    return finish(std::move(y), t, res);
}

DensityMatrix steady_state_nullspace(const SimConfig& cfg) {
    const ModelOps ops(cfg);
    const std::size_t d = ops.dimension();
    const CMat l = ops.superoperator();
    const Svd s = svd(l);
    const double cutoff = 1e-10 * std::max(1.0, s.values.front());
    std::size_t n_null = 0;
    for (double v : s.values)
        if (v < cutoff) ++n_null;
    if (n_null != 1)
        throw std::runtime_error("steady_state_nullspace: null space is not one-dimensional (" +
                                 std::to_string(n_null) + " vectors)");
    CVec v(d * d);
    const std::size_t row = s.vh.rows() - 1;
    for (std::size_t j = 0; j < d * d; ++j) v[j] = std::conj(s.vh(row, j));
    CMat rho = unvec_rows(v, d);
    hermitize(rho);
    const cplx tr = trace(rho);
    if (std::abs(tr) < 1e-8)
        throw std::runtime_error("steady_state_nullspace: null vector is traceless");
    rho *= (1.0 / tr);
    return DensityMatrix(std::move(rho), cfg.n_qubits);
}

TrajectoryRecord run_trajectory(const StateVector& psi0, double t_final, std::uint64_t seed,
                                const SimConfig& cfg, std::vector<double> sample_times,
                                const TrajectoryStop* stop) {
    if (t_final <= 0.0) throw std::invalid_argument("run_trajectory: t_final must be positive");
    if (std::abs(norm(psi0.amplitudes) - 1.0) > 1e-8)
        throw std::invalid_argument("run_trajectory: psi0 must be normalised");
    const ModelOps ops(cfg);
    const std::size_t d = ops.dimension();
    if (psi0.amplitudes.size() != d)
        throw std::invalid_argument("run_trajectory: dimension mismatch");

    TrajectoryRecord rec;
    rec.seed = seed;
    rec.sample_times = sorted_samples(std::move(sample_times), t_final);

    Rng rng(seed);
    CVec y = psi0.amplitudes;
    double t = 0.0;
    double r = rng.uniform_open();

    OdeOptions opt;
    opt.rtol = cfg.tolerance;
    auto deriv = [&](double, const CVec& v, CVec& dv) {
        kern::matvec(ops.drift().data(), v.data(), dv.data(), d, d);
    };

    auto current_overlap = [&](const CVec& v) {
        const double n2 = norm(v);
        if (n2 == 0.0) return 0.0;
        double acc_re = 0.0, acc_im = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const cplx p = std::conj(stop->target[i]) * v[i];
            acc_re += p.real();
            acc_im += p.imag();
        }
        return (acc_re * acc_re + acc_im * acc_im) / (n2 * n2);
    };

    auto record_state = [&](const CVec& v) {
        CVec s = v;
        normalize(s);
        rec.states.emplace_back(std::move(s), cfg.n_qubits);
    };

    if (stop && current_overlap(y) >= stop->overlap_threshold) {
        rec.stopped_early = true;
        rec.stop_time = 0.0;
        if (!rec.sample_times.empty() && rec.sample_times.front() == 0.0) record_state(y);
        return rec;
    }

    enum class Halt { none, jump, stop_hit };
    Halt halt = Halt::none;
    double seg_t_prev = 0.0;
    CVec y_prev(d);

    auto observer = [&](double t_prev, const CVec& yp, double, const CVec& cur) {
        const double n2 = norm(cur);
        if (n2 * n2 < r) {
            halt = Halt::jump;
            seg_t_prev = t_prev;
            y_prev = yp;
            return false;
        }
        if (stop && current_overlap(cur) >= stop->overlap_threshold) {
            halt = Halt::stop_hit;
            return false;
        }
        return true;
    };

    std::size_t sample_idx = 0;
    if (sample_idx < rec.sample_times.size() && rec.sample_times[sample_idx] == 0.0) {
        record_state(y);
        ++sample_idx;
    }

    AdaptiveRk sub(deriv, d, opt);  // reused for bisection re-integration
    bool done = false;
    for (; sample_idx < rec.sample_times.size() && !done; ++sample_idx) {
        const double t_b = rec.sample_times[sample_idx];
        while (t < t_b) {
            AdaptiveRk rk(deriv, d, opt);
            halt = Halt::none;
            const double t_reached = rk.run(y, t, t_b, observer);
            if (halt == Halt::stop_hit) {
                rec.stopped_early = true;
                rec.stop_time = t_reached;
                done = true;
                break;
            }
            if (halt == Halt::none) {
                t = t_b;
                break;
            }

            // norm^2 crossed r inside (seg_t_prev, t_reached]: bisect the jump time
            double lo = seg_t_prev, hi = t_reached;
            CVec y_hi = y;
            while (hi - lo > 1e-10 * std::max(1.0, hi)) {
                const double mid = 0.5 * (lo + hi);
                CVec ym = y_prev;
                sub.run(ym, seg_t_prev, mid);
                const double n = norm(ym);
                if (n * n < r) {
                    hi = mid;
                    y_hi = std::move(ym);
                } else {
                    lo = mid;
                }
            }
            const double t_jump = hi;
            y = std::move(y_hi);

            // channel selection by relative rates at the jump
            std::vector<double> weights(1 + cfg.n_qubits, 0.0);
            weights[0] = ops.collective_rate(y);
            for (int j = 1; j <= cfg.n_qubits; ++j) weights[j] = ops.spont_rate(y, j);
            double total = 0.0;
            for (double w : weights) total += w;
            if (total <= 0.0)
                throw std::runtime_error("run_trajectory: norm decayed with zero jump rates");
            double pick = rng.uniform() * total;
            int channel = -1;
            for (int jch = 0; jch <= cfg.n_qubits; ++jch) {
                if (weights[jch] <= 0.0) continue;
                channel = jch;  // last positive channel absorbs any fp leftover
                if (pick < weights[jch]) break;
                pick -= weights[jch];
            }
            if (channel == 0)
                ops.apply_collective_jump(y);
            else
                ops.apply_spont_jump(y, channel);
            normalize(y);
            rec.jumps.push_back({t_jump, channel});
            t = t_jump;
            r = rng.uniform_open();

            if (stop && current_overlap(y) >= stop->overlap_threshold) {
                rec.stopped_early = true;
                rec.stop_time = t;
                done = true;
                break;
            }
        }
        if (!done) record_state(y);
    }
    return rec;
}

EnsembleEstimate ensemble_average(const StateVector& psi0, double t_final, int n_traj,
                                  std::uint64_t base_seed, const SimConfig& cfg,
                                  std::vector<double> sample_times,
                                  const std::vector<OperatorMatrix>& observables) {
    if (n_traj < 1) throw std::invalid_argument("ensemble_average: n_traj must be >= 1");
    const std::size_t d = dim(cfg.n_qubits);

    EnsembleEstimate est;
    est.sample_times = sorted_samples(std::move(sample_times), t_final);
    est.n_trajectories = n_traj;
    const std::size_t ns = est.sample_times.size();
    const std::size_t nobs = observables.size();

    // Fixed-shape chunking keeps the reduction order independent of the
    // number of threads, so the estimate is bitwise reproducible.
    constexpr int kChunk = 16;
    const int n_chunks = (n_traj + kChunk - 1) / kChunk;

    struct Acc {
        std::vector<CMat> rho;
        std::vector<std::vector<double>> obs_sum, obs_sq;
    };
    std::vector<Acc> accs(n_chunks);

#pragma omp parallel for schedule(dynamic)
    for (int chunk = 0; chunk < n_chunks; ++chunk) {
        Acc acc;
        acc.rho.assign(ns, CMat(d, d));
        acc.obs_sum.assign(nobs, std::vector<double>(ns, 0.0));
        acc.obs_sq.assign(nobs, std::vector<double>(ns, 0.0));
        const int k_lo = chunk * kChunk;
        const int k_hi = std::min(n_traj, k_lo + kChunk);
        for (int k = k_lo; k < k_hi; ++k) {
            const TrajectoryRecord rec =
                run_trajectory(psi0, t_final, base_seed + static_cast<std::uint64_t>(k), cfg,
                               est.sample_times);
            for (std::size_t s = 0; s < ns; ++s) {
                const CVec& a = rec.states[s].amplitudes;
                CMat& m = acc.rho[s];
                for (std::size_t i = 0; i < d; ++i)
                    for (std::size_t j = 0; j < d; ++j) m(i, j) += a[i] * std::conj(a[j]);
                for (std::size_t o = 0; o < nobs; ++o) {
                    const double v = std::real(expectation(observables[o], rec.states[s]));
                    acc.obs_sum[o][s] += v;
                    acc.obs_sq[o][s] += v * v;
                }
            }
        }
        accs[chunk] = std::move(acc);
    }

    est.rho_hat.reserve(ns);
    std::vector<CMat> total(ns, CMat(d, d));
    est.observable_mean.assign(nobs, std::vector<double>(ns, 0.0));
    est.observable_stderr.assign(nobs, std::vector<double>(ns, 0.0));
    for (const Acc& acc : accs) {
        for (std::size_t s = 0; s < ns; ++s) total[s] += acc.rho[s];
        for (std::size_t o = 0; o < nobs; ++o)
            for (std::size_t s = 0; s < ns; ++s) {
                est.observable_mean[o][s] += acc.obs_sum[o][s];
                est.observable_stderr[o][s] += acc.obs_sq[o][s];
            }
    }
    const double inv_n = 1.0 / n_traj;
    for (std::size_t s = 0; s < ns; ++s) {
        total[s] *= inv_n;
        est.rho_hat.emplace_back(std::move(total[s]), cfg.n_qubits);
    }
    for (std::size_t o = 0; o < nobs; ++o)
        for (std::size_t s = 0; s < ns; ++s) {
            const double mean = est.observable_mean[o][s] * inv_n;
            const double sq = est.observable_stderr[o][s];
            est.observable_mean[o][s] = mean;
            est.observable_stderr[o][s] =
                n_traj > 1
                    ? std::sqrt(std::max(0.0, (sq - n_traj * mean * mean) / (n_traj - 1.0)) / n_traj)
                    : 0.0;
        }
    return est;
}

}  // namespace qfb
