#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>

#include "heliosolve/errors.hpp"

namespace heliosolve {

// Dormand-Prince 5(4) embedded pair with FSAL, step clipping at output
// stations, and a post-step hook that may rescale the state (valid for
// linear ODEs; used to keep magnitudes in range while a log scale is
// accumulated by the caller).
template <class T, std::size_t N>
struct Rk45Options {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_init = 0.0;             // 0 -> auto from first RHS evaluation
    double h_min_factor = 1e-14;     // underflow guard: |h| >= factor*|span|
    long max_steps = 50'000'000;
    // Magnitude used for the relative-error scale of each component.
    std::function<double(const std::array<T, N>&, std::size_t)> weight;
    // Called after each accepted step; returns a multiplicative rescale
    // factor applied to the whole state (1.0 = none).
    std::function<double(double, std::array<T, N>&)> post_step;
    // Called whenever the integration lands exactly on an output station.
    std::function<void(double, const std::array<T, N>&)> on_station;
};

namespace detail {
inline double cabs(double x) { return std::fabs(x); }
inline double cabs(std::complex<double> x) { return std::abs(x); }
}  // namespace detail

// Integrates y' = f(t, y) from t0 to t1 (either direction). `stations`
// must be sorted in the direction of integration; the solver lands on
// each exactly. Returns the number of accepted steps.
template <class T, std::size_t N, class Rhs>
long rk45_integrate(Rhs&& f, double t0, double t1, std::array<T, N>& y,
                    std::span<const double> stations, const Rk45Options<T, N>& opt) {
    if (t1 == t0) return 0;
    const double dir = (t1 > t0) ? 1.0 : -1.0;
    const double span = std::fabs(t1 - t0);

    using State = std::array<T, N>;
    auto rhs = [&f](double t, const State& s, State& out) { f(t, s, out); };

    State k1, k2, k3, k4, k5, k6, k7, ytmp, ynew;
    rhs(t0, y, k1);

    double h;
    if (opt.h_init > 0.0) {
        h = opt.h_init;
    } else {
        double ynorm = 0.0, fnorm = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            ynorm = std::max(ynorm, detail::cabs(y[i]));
            fnorm = std::max(fnorm, detail::cabs(k1[i]));
        }
        h = (fnorm > 0.0) ? 0.01 * std::max(ynorm, opt.atol) / fnorm : 1e-6 * span;
        h = std::min(h, span);
    }

    double t = t0;
    std::size_t next_station = 0;
    long accepted = 0;
    double err_prev = 1.0;

    for (long step = 0; step < opt.max_steps; ++step) {
        // consume stations that coincide with the current position
        while (next_station < stations.size() &&
               std::fabs(stations[next_station] - t) <= 1e-14 * span) {
            if (opt.on_station) opt.on_station(t, y);
            ++next_station;
        }
        if (dir * (t1 - t) <= 0.0) return accepted;
        h = std::min(h, std::fabs(t1 - t));
        bool hit_station = false;
        if (next_station < stations.size()) {
            const double to_station = std::fabs(stations[next_station] - t);
            if (to_station <= h * (1.0 + 1e-12)) {
                h = to_station;
                hit_station = true;
            }
        }
        if (h < opt.h_min_factor * span)
            throw Error("ode", "step-underflow",
                        "step size underflow at t=" + std::to_string(t));
        const double hs = dir * h;

        auto stage = [&](State& ki, double c, auto&&... terms) {
            for (std::size_t i = 0; i < N; ++i) {
                T acc = (T(0) + ... + (terms.first * terms.second[i]));
                ytmp[i] = y[i] + hs * acc;
            }
            rhs(t + c * hs, ytmp, ki);
        };
        using P = std::pair<double, const State&>;
        stage(k2, 1.0 / 5, P{1.0 / 5, k1});
        stage(k3, 3.0 / 10, P{3.0 / 40, k1}, P{9.0 / 40, k2});
        stage(k4, 4.0 / 5, P{44.0 / 45, k1}, P{-56.0 / 15, k2}, P{32.0 / 9, k3});
        stage(k5, 8.0 / 9, P{19372.0 / 6561, k1}, P{-25360.0 / 2187, k2},
              P{64448.0 / 6561, k3}, P{-212.0 / 729, k4});
        stage(k6, 1.0, P{9017.0 / 3168, k1}, P{-355.0 / 33, k2}, P{46732.0 / 5247, k3},
              P{49.0 / 176, k4}, P{-5103.0 / 18656, k5});
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + hs * (35.0 / 384 * k1[i] + 500.0 / 1113 * k3[i] +
                                   125.0 / 192 * k4[i] - 2187.0 / 6784 * k5[i] +
                                   11.0 / 84 * k6[i]);
        rhs(t + hs, ynew, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const T e = hs * (71.0 / 57600 * k1[i] - 71.0 / 16695 * k3[i] +
                              71.0 / 1920 * k4[i] - 17253.0 / 339200 * k5[i] +
                              22.0 / 525 * k6[i] - 1.0 / 40 * k7[i]);
            const double w = opt.weight
                                 ? opt.weight(ynew, i)
                                 : std::max(detail::cabs(y[i]), detail::cabs(ynew[i]));
            const double sc = opt.atol + opt.rtol * w;
            const double q = detail::cabs(e) / sc;
            err += q * q;
        }
        err = std::sqrt(err / N);

        if (err <= 1.0) {
            t += hs;
            y = ynew;
            k1 = k7;  // FSAL
            ++accepted;
            if (hit_station) {
                if (opt.on_station) opt.on_station(t, y);
                ++next_station;
            }
            if (opt.post_step) {
                const double fac = opt.post_step(t, y);
                if (fac != 1.0)
                    for (std::size_t i = 0; i < N; ++i) {
                        y[i] *= fac;
                        k1[i] *= fac;
                    }
            }
            // PI step control
            const double e1 = std::pow(std::max(err, 1e-10), -0.7 / 5.0);
            const double e2 = std::pow(std::max(err_prev, 1e-10), 0.4 / 5.0);
            h *= std::clamp(0.9 * e1 * e2, 0.2, 5.0);
            err_prev = std::max(err, 1e-10);
        } else {
            h *= std::max(0.9 * std::pow(err, -1.0 / 5.0), 0.2);
        }
    }
    throw Error("ode", "tolerance-not-met",
                "exceeded max_steps at t=" + std::to_string(t));
}

}  // namespace heliosolve
