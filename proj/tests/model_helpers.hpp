#pragma once

// Shared builders for unit and acceptance tests: toy potentials that are
// not tied to a solar model, and compactly supported perturbations of a
// background model.

#include <cmath>
#include <vector>

#include "heliosolve/solar_model.hpp"

namespace heliosolve::testutil {

// Free potential v == 0 with alpha = 0; kappa = k (r_unit = 1 m). The
// "R_a" radius only marks where the evaluator switches to the (here
// trivial) Coulomb tail.
inline solar::PotentialProfile free_potential(double k, double ra_hat = 1.0) {
    std::vector<double> g{1e-6, ra_hat};
    std::vector<double> z{0.0, 0.0};
    return solar::PotentialProfile(1.0, k, 0.0, ra_hat, 1.0, g, z, z, z, ra_hat);
}

// Pure-Coulomb toy with a constant core: v = alpha/max(r, rc).
inline solar::PotentialProfile coulomb_core_potential(double k, double alpha, double rc_hat) {
    std::vector<double> g{rc_hat * 1e-3, rc_hat};
    std::vector<double> c{alpha / rc_hat, alpha / rc_hat};
    std::vector<double> z{0.0, 0.0};
    return solar::PotentialProfile(1.0, k, alpha, rc_hat, 1.0, g, z, c, z, rc_hat * 2.0);
}

// C^2 compact bump: (1-t^2)^3 on |t|<1, zero outside.
inline double bump(double t) {
    if (std::fabs(t) >= 1.0) return 0.0;
    const double u = 1.0 - t * t;
    return u * u * u;
}

struct Perturbation {
    double dc_rel = 0.0;      // relative bump amplitude on c
    double drho_rel = 0.0;    // relative bump amplitude on rho
    double dgamma_abs = 0.0;  // absolute bump amplitude on gamma, rad/s
    double center_frac = 0.925;
    double halfwidth_frac = 0.022;
};

// Applies compactly supported bumps to the tabulated profiles (support
// [center - hw, center + hw] in units of R_sun).
inline solar::SolarModel make_perturbed(const solar::SolarModel& bg, const Perturbation& p) {
    std::vector<double> r = bg.grid_r(), c = bg.c(), rho = bg.rho(), gam = bg.gamma();
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double t = (r[i] / bg.R_sun() - p.center_frac) / p.halfwidth_frac;
        const double b = bump(t);
        if (b == 0.0) continue;
        c[i] *= 1.0 + p.dc_rel * b;
        rho[i] *= 1.0 + p.drho_rel * b;
        gam[i] += p.dgamma_abs * b;
    }
    return solar::SolarModel(std::move(r), std::move(c), std::move(rho), std::move(gam), bg.c0(),
                             bg.rho0(), bg.H(), bg.h_a(), bg.R_sun());
}

}  // namespace heliosolve::testutil
