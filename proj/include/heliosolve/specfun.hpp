#pragma once

#include <complex>
#include <span>
#include <vector>

namespace heliosolve::specfun {

inline constexpr int kEllCap = 1024;          // single-point evaluations
inline constexpr int kSweepEllCap = 4'000'000; // recurrence sweeps
inline constexpr double kEtaMax = 100.0;

// Outgoing/incoming Coulomb wave functions H^±_l(eta, rho) and their
// rho-derivatives. For real (eta, rho), H^- = conj(H^+).
struct CoulombPair {
    std::complex<double> h_plus;
    std::complex<double> h_minus;
    std::complex<double> dh_plus;
    std::complex<double> dh_minus;
};

// Scaled real pair: F = fhat*exp(-exponent), G = ghat*exp(+exponent)
// (same for the derivatives). exponent >= 0; it is zero in the
// oscillatory region and grows below the classical turning point,
// where F underflows and G overflows in plain doubles.
struct CoulombScaled {
    double fhat;
    double dfhat;
    double ghat;
    double dghat;
    double exponent;
};

// Phase bookkeeping for one (l, eta, rho):
//   sigma_l  = arg Gamma(l+1+i eta), continuous branch with sigma_l(0)=0
//   theta    = rho - eta*ln(2 rho) - l*pi/2 + sigma_l
//   vartheta = 2*arg H^+ (principal value; see unwrap_angle for sweeps)
struct CoulombPhase {
    double sigma_l;
    double theta;
    double vartheta;
};

// Single-point evaluation. Throws heliosolve::Error on rho <= 0, ell
// out of cap, |eta| too large, or loss of accuracy / overflow in the
// deep classically forbidden region.
CoulombPair coulomb_h(int ell, double eta, double rho);

CoulombScaled coulomb_fg_scaled(int ell, double eta, double rho);

// All orders 0..ell_max at fixed (eta, rho) in one pass. Much cheaper
// than ell_max single-point calls; values match them to ~1e-13.
std::vector<CoulombScaled> coulomb_sweep(int ell_max, double eta, double rho);

double coulomb_sigma(int ell, double eta);

CoulombPhase coulomb_phase(int ell, double eta, double rho);
CoulombPhase coulomb_phase(int ell, double eta, double rho, const CoulombScaled& fg);

// |H^+|^2 = F^2 + G^2 from a scaled pair, with the exponent applied.
double coulomb_abs2_h(const CoulombScaled& fg);

// Classical turning point of the Coulomb effective potential.
double coulomb_turning_point(int ell, double eta);

// Legendre polynomial P_l(s) on [-1, 1] by upward recurrence.
double legendre_p(int ell, double s);

// Fills out[0..ell_max] with P_l(s).
void legendre_sweep(int ell_max, double s, std::span<double> out);

// Shift `raw` by a multiple of 2*pi so it lands within pi of `ref`.
double unwrap_angle(double raw, double ref);

}  // namespace heliosolve::specfun
