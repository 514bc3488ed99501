#include "qfb/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qfb {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// embedded 4th-order weights
constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                 e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

void lincomb(CVec& out, const CVec& y, std::initializer_list<std::pair<double, const CVec*>> terms,
             double h) {
    out = y;
    for (const auto& [w, k] : terms)
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += h * w * (*k)[i];
}

}  // namespace

AdaptiveRk::AdaptiveRk(Deriv deriv, std::size_t dimension, OdeOptions options)
    : f_(std::move(deriv)), opt_(options) {
    for (auto& k : k_) k.resize(dimension);
    y_tmp_.resize(dimension);
    y_new_.resize(dimension);
    y_err_.resize(dimension);
    y_prev_.resize(dimension);
}

double AdaptiveRk::error_norm(const CVec& y0, const CVec& y1) const {
    // RMS of |err| / (atol + rtol * max(|y0|, |y1|))
    double acc = 0.0;
    for (std::size_t i = 0; i < y0.size(); ++i) {
        const double scale = opt_.atol + opt_.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double e = std::abs(y_err_[i]) / scale;
        acc += e * e;
    }
    return std::sqrt(acc / static_cast<double>(y0.size()));
}

double AdaptiveRk::run(CVec& y, double t0, double t_end, const Observer& observer) {
    if (t_end <= t0) return t0;
    double t = t0;
    double h = opt_.h_init;
    if (h <= 0.0) h = (t_end - t0) * 1e-4;
    if (opt_.h_max > 0.0) h = std::min(h, opt_.h_max);

    f_(t, y, k_[0]);  // FSAL seed; k_[0] always holds f(t, y)

    int floor_strikes = 0;
    while (t < t_end) {
        const double h_floor =
            16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
        const double span = t_end - t;
        if (span <= h_floor) {
            t = t_end;  // below time resolution, snap to the boundary
            break;
        }
        h = std::min(h, span);
        if (h < h_floor) {
            // resolution-limited (tiny resume interval): take the smallest
            // resolvable step; repeated controller-driven hits mean stiffness
            h = std::min(span, 2.0 * h_floor);
            if (++floor_strikes > 50) throw std::runtime_error("AdaptiveRk: step size underflow");
        } else {
            floor_strikes = 0;
        }

        lincomb(y_tmp_, y, {{a21, &k_[0]}}, h);
        f_(t + c2 * h, y_tmp_, k_[1]);
        lincomb(y_tmp_, y, {{a31, &k_[0]}, {a32, &k_[1]}}, h);
        f_(t + c3 * h, y_tmp_, k_[2]);
        lincomb(y_tmp_, y, {{a41, &k_[0]}, {a42, &k_[1]}, {a43, &k_[2]}}, h);
        f_(t + c4 * h, y_tmp_, k_[3]);
        lincomb(y_tmp_, y, {{a51, &k_[0]}, {a52, &k_[1]}, {a53, &k_[2]}, {a54, &k_[3]}}, h);
        f_(t + c5 * h, y_tmp_, k_[4]);
        lincomb(y_tmp_, y, {{a61, &k_[0]}, {a62, &k_[1]}, {a63, &k_[2]}, {a64, &k_[3]}, {a65, &k_[4]}},
                h);
        f_(t + h, y_tmp_, k_[5]);
        lincomb(y_new_, y, {{b1, &k_[0]}, {b3, &k_[2]}, {b4, &k_[3]}, {b5, &k_[4]}, {b6, &k_[5]}}, h);
        f_(t + h, y_new_, k_[6]);

        for (std::size_t i = 0; i < y.size(); ++i) {
            const cplx y4 = y[i] + h * (e1 * k_[0][i] + e3 * k_[2][i] + e4 * k_[3][i] +
                                        e5 * k_[4][i] + e6 * k_[5][i] + e7 * k_[6][i]);
            y_err_[i] = y_new_[i] - y4;
        }
        const double err = error_norm(y, y_new_);

        if (err <= 1.0) {
            y_prev_.swap(y);
            y = y_new_;
            const double t_prev = t;
            t += h;
            ++stats_.n_steps;
            k_[0].swap(k_[6]);  // FSAL
            if (observer && !observer(t_prev, y_prev_, t, y)) return t;
        } else {
            ++stats_.n_rejected;
        }

        const double safe = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        h *= std::clamp(safe, 0.2, 5.0);
        if (opt_.h_max > 0.0) h = std::min(h, opt_.h_max);
    }
    return t;
}

}  // namespace qfb
