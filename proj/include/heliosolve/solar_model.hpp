#pragma once

#include <complex>
#include <string>
#include <vector>

#include "heliosolve/spline.hpp"

namespace heliosolve::solar {

// Radially tabulated solar parameters (SI units) plus the atmospheric
// constants. Above R_a = R_sun + h_a the profiles are the analytic
// atmosphere: c = c0, rho = rho0*exp(-(r-R_a)/H), gamma = 0; the
// constructor rewrites tabulated values there and validates continuity.
class SolarModel {
public:
    SolarModel(std::vector<double> grid_r, std::vector<double> c, std::vector<double> rho,
               std::vector<double> gamma, double c0, double rho0, double H, double h_a,
               double R_sun);

    const std::vector<double>& grid_r() const { return grid_r_; }
    const std::vector<double>& c() const { return c_; }
    const std::vector<double>& rho() const { return rho_; }
    const std::vector<double>& gamma() const { return gamma_; }
    double c0() const { return c0_; }
    double rho0() const { return rho0_; }
    double H() const { return H_; }
    double h_a() const { return h_a_; }
    double R_sun() const { return R_sun_; }
    double R_a() const { return R_sun_ + h_a_; }
    double cutoff_omega() const { return c0_ / (2.0 * H_); }

    // Interpolated profile values (analytic above R_a).
    double c_at(double r) const;
    double rho_at(double r) const;
    double gamma_at(double r) const;

    // Innermost radius from which the tabulated rho is the exact
    // atmospheric exponential (and c = c0); at and above it the
    // density term of the potential is evaluated in closed form.
    double atm_start() const { return atm_start_; }

private:
    std::vector<double> grid_r_, c_, rho_, gamma_;
    double c0_, rho0_, H_, h_a_, R_sun_;
    double atm_start_;
    CubicSpline c_spline_, lnrho_spline_, gamma_spline_;
};

SolarModel load_background(const std::string& path);
void save_background(const SolarModel& model, const std::string& path);

// k = sqrt(omega^2/c0^2 - 1/(4 H^2)); throws below-cutoff for
// omega <= c0/(2H).
double wavenumber(const SolarModel& model, double omega);

// Complex radial potential at one frequency. Internally dimensionless:
// r_hat = r/R_sun and v_hat = R_sun^2 * v, so that
//   v_hat(r_hat) = omega^2*u1h + u2h - 2i*omega*u3h,   r_hat < ra_hat,
//   v_hat(r_hat) = alpha_hat/r_hat,                    r_hat >= ra_hat.
class PotentialProfile {
public:
    PotentialProfile(const SolarModel& model, double omega);
    PotentialProfile(const SolarModel& background, double omega,
                     const std::vector<double>& grid_hat, const std::vector<double>& u1h,
                     const std::vector<double>& u2h, const std::vector<double>& u3h);
    // Raw constructor (toy potentials, tests): dimensionless nodal values
    // with k and alpha in SI units of 1/r_unit.
    PotentialProfile(double omega, double k_si, double alpha_si, double ra_hat, double r_unit,
                     const std::vector<double>& grid_hat, const std::vector<double>& u1h,
                     const std::vector<double>& u2h, const std::vector<double>& u3h,
                     double atm_start_hat);

    double k() const { return k_; }           // 1/m
    double alpha() const { return alpha_; }   // 1/m (= 1/H)
    double R_a() const { return ra_hat_ * r_unit_; }
    double omega() const { return omega_; }

    double r_unit() const { return r_unit_; }  // R_sun, meters
    double kappa() const { return k_ * r_unit_; }
    double alpha_hat() const { return alpha_ * r_unit_; }
    double ra_hat() const { return ra_hat_; }
    double eta() const { return alpha_ / (2.0 * k_); }
    double grid_min_hat() const { return grid_min_hat_; }

    std::complex<double> v_hat(double r_hat) const;
    // Hinted variant for monotone sweeps (the hint caches spline intervals
    // and must not be shared across threads).
    struct EvalHint {
        std::size_t h1 = 0, h2 = 0, h3 = 0;
    };
    std::complex<double> v_hat(double r_hat, EvalHint& hint) const;
    double max_abs_v_hat() const { return max_abs_v_hat_; }

private:
    void finish();

    double omega_, k_, alpha_, ra_hat_, r_unit_, atm_start_hat_, grid_min_hat_;
    double max_abs_v_hat_ = 0.0;
    CubicSpline u1h_, u2h_, u3h_;
};

PotentialProfile potential_from_model(const SolarModel& model, double omega);

// The three inversion unknowns on a grid over I = [A1, A2] (SI units):
// u1 = 1/c0^2 - 1/c^2, u2 = rho-derivative term, u3 = gamma/c^2.
struct InversionUnknowns {
    double A1 = 0.0, A2 = 0.0;     // meters
    std::vector<double> grid;      // meters, ascending, shared by u1/u2/u3
    std::vector<double> u1, u2, u3;
};

// Samples the model's unknowns on an n_grid-point grid over [A1, A2].
// Throws support-violation if model and background differ outside I.
InversionUnknowns unknowns_from_model(const SolarModel& model, const SolarModel& background,
                                      double A1, double A2, int n_grid);

// Potential for modified unknowns: background values outside I, the
// given nodal values inside. Used by the forward map.
PotentialProfile potential_from_unknowns(const SolarModel& background,
                                         const InversionUnknowns& u, double omega);

// ---- synthetic background models --------------------------------------

struct BackgroundSpec {
    double c0 = 6855.0;          // m/s
    double rho0 = 2.886e-6;      // kg/m^3
    double H = 1.25e5;           // m
    double h_a = 5.0e5;          // m
    double R_sun = 6.957e8;      // m
    double gamma0 = 2.0 * M_PI * 102.5e-6;  // rad/s
    double gamma_decay = 1.0e5;  // m; gamma falls to 0 over [R_sun, R_sun+this]
    double c_rise = 10.0;        // c(center) ~ (1+c_rise)*c0
    double lnrho_deep_slope = 10.0;     // -d ln rho / d r_hat in the deep interior
    double transition_depth = 1.0e6;    // m; density-slope matching layer
    double r_min_frac = 0.02;    // inner edge of the table, in units of R_sun
};

SolarModel make_background(const BackgroundSpec& spec);

// Solar-scale parameters (the tabulated atmosphere constants).
BackgroundSpec paper_background();

// Radially compressed desk-scale variant: same atmosphere (same k and
// eta at a given frequency) with R_sun shrunk so kappa = k*R_sun ~ 100.
BackgroundSpec mini_background();

}  // namespace heliosolve::solar
