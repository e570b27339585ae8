#pragma once

#include <complex>
#include <span>
#include <vector>

#include "heliosolve/solar_model.hpp"
#include "heliosolve/specfun.hpp"

namespace heliosolve::radial {

struct SolveOptions {
    double rtol = 1e-10;
    long max_steps = 50'000'000;
};

// Regular solution phi ~ r^{l+1} at the origin, sampled at the requested
// stations (dimensionless radii). True values are phi*exp(log_scale);
// the stored mantissas are kept within [1e-2, 1e2] by power-of-two
// renormalization.
struct RadialSolution {
    int ell = 0;
    std::vector<double> grid;                    // r0, stations..., r_end
    std::vector<std::complex<double>> phi, dphi; // d/d r_hat
    std::vector<double> log_scale;
    double kappa = 0.0;
    double r_series_start = 0.0;
};

RadialSolution integrate_regular(const solar::PotentialProfile& pot, int ell, double r_end_hat,
                                 std::span<const double> stations_hat = {},
                                 const SolveOptions& opt = {});

// Scattering matrix element from Wronskians against H^± at R_a:
// s = [phi, H^-]/[phi, H^+], b from [phi, H^+] = 2ik b.
struct MatchingResult {
    std::complex<double> s;
    std::complex<double> b_mantissa;  // b = b_mantissa * exp(b_log_scale)
    double b_log_scale = 0.0;
    bool cond_flag = false;           // matching Wronskians nearly degenerate
};

MatchingResult match_scattering(const RadialSolution& sol, const solar::PotentialProfile& pot);

// Diagonal values Im G(r,r) (dimensionless: G_hat = G/R_sun) at the given
// radii, plus the matching data. The cheap path for sweeps over (l, omega):
// one outward solve to R_a and one short inward solve for the outgoing
// solution below R_a.
struct DiagonalResult {
    std::vector<std::complex<double>> g_diag_hat;
    MatchingResult match;
};

DiagonalResult greens_diagonal(const solar::PotentialProfile& pot, int ell,
                               std::span<const double> r_obs_hat, const SolveOptions& opt = {});

// Outgoing Green's function evaluator G(r, r') = -phi(r_<) phi^+(r_>) / [phi, phi^+].
// Interior values are cubic-Hermite interpolated on dense solution grids;
// for r >= R_a both solutions are evaluated in closed form through the
// Coulomb functions, so the tail is exact up to the matched (s, b).
class RadialGreens {
public:
    RadialGreens(const solar::PotentialProfile& pot, int ell, const SolveOptions& opt = {},
                 double interp_tol = 1e-9);

    std::complex<double> eval_hat(double r1_hat, double r2_hat) const;
    // SI wrapper: arguments in meters, result in meters.
    std::complex<double> eval(double r1, double r2) const;

    int ell() const { return ell_; }
    double kappa() const { return kappa_; }
    double r_min_hat() const { return grid_.front(); }
    double ra_hat() const { return ra_hat_; }
    const MatchingResult& matching() const { return match_; }
    const std::vector<double>& interp_grid() const { return grid_; }

private:
    struct Branch {
        std::vector<std::complex<double>> v, dv;
        std::vector<double> ls;
    };
    void value_at(const Branch& b, double r, std::complex<double>& val, double& ls) const;
    std::complex<double> tail_regular(double r_hat, double& ls) const;
    std::complex<double> tail_outgoing(double r_hat, double& ls) const;

    int ell_;
    double kappa_, eta_, ra_hat_;
    double r_unit_;
    std::vector<double> grid_;  // shared interior grid for both branches
    Branch reg_, out_;
    MatchingResult match_;
    std::complex<double> denom_mantissa_;  // 2 i kappa b_mantissa
    double denom_ls_ = 0.0;
};

inline RadialGreens radial_greens(const solar::PotentialProfile& pot, int ell,
                                  const SolveOptions& opt = {}) {
    return RadialGreens(pot, ell, opt);
}

// | Im G(r,r) - k |G(R,r)|^2 + int_0^R Im v |G(r',r)|^2 dr' | in
// dimensionless units (multiply by R_sun for meters); decays like O(1/R).
double power_balance_residual(const RadialGreens& g, const solar::PotentialProfile& pot,
                              double r_hat, double R_hat);

}  // namespace heliosolve::radial
