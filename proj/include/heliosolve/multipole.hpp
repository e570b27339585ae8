#pragma once

#include <complex>
#include <span>
#include <vector>

namespace heliosolve::multipole {

// Green's function restricted to a sphere-pair circle: values of
// G_v(x' cos(theta) + x'' sin(theta), x') for |x'| = |x''| = R, x'.x'' = 0.
struct CircleSamples {
    double R = 0.0;                             // meters
    std::vector<double> thetas;                 // ascending, in (0, pi)
    std::vector<std::complex<double>> values;   // 1/m
    int tail_warnings = 0;                      // assembly tail > 1% of value
};

struct PartialWaveDiagonal {
    double R = 0.0;                             // meters
    std::vector<std::complex<double>> values;   // G_l(R,R), meters
};

// Coulomb parameters of the potential tail; the partial-wave sum beyond
// the stored orders is completed with the pure-Coulomb diagonal
// F_l(eta,kR) H^+_l(eta,kR)/k up to l_tail and the free static kernel
// beyond (for alpha = 0 this is the exact free-field tail).
struct TailModel {
    double k = 0.0;       // 1/m
    double alpha = 0.0;   // 1/m
};

inline constexpr double kThetaMinDefault = 1e-3;

// value(theta_j) = sum_{l<=L} (2l+1) G_l P_l(cos theta)/(4 pi R^2)
//                + Coulomb tail for L < l <= l_tail
//                + closed-form kernel remainder beyond l_tail.
// l_tail <= 0 selects an accuracy-driven default.
CircleSamples assemble_circle(const PartialWaveDiagonal& diag, std::span<const double> thetas,
                              const TailModel& tail, int l_tail = 0,
                              double theta_min = kThetaMinDefault);

// Gauss-Legendre angular grid for extraction at degree 2*n-1, as thetas
// (ascending). Samples for extract_partial_waves must sit on these nodes.
std::vector<double> extraction_thetas(int node_count);

// Legendre projection with kernel + Coulomb-tail subtraction; inverse of
// assemble_circle on band-limited diagonals.
PartialWaveDiagonal extract_partial_waves(const CircleSamples& samples, int L_max,
                                          const TailModel& tail, int l_tail = 0,
                                          double theta_min = kThetaMinDefault);

}  // namespace heliosolve::multipole
