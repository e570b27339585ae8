#include "heliosolve/multipole.hpp"

#include <algorithm>
#include <cmath>

#include "heliosolve/errors.hpp"
#include "heliosolve/quadrature.hpp"
#include "heliosolve/specfun.hpp"

namespace heliosolve::multipole {
namespace {

constexpr const char* kMod = "multipole";
using cplx = std::complex<double>;

int default_l_tail(int l_max, double x) {
    // remainder of the kernel-completed sum ~ x^2/(2 L^2) sqrt(2/(pi L s));
    // L = 210 x keeps it below ~3e-7 of the kernel down to theta ~ 0.1
    const int by_x = int(std::ceil(210.0 * std::max(x, 1.0)));
    return std::max(2 * l_max + 32, by_x);
}

// Pure-Coulomb diagonal F_l H^+_l / (kR) for l in (l_lo, l_hi], in units of R.
std::vector<cplx> coulomb_diag_tail(int l_lo, int l_hi, double eta, double x) {
    const auto sweep = specfun::coulomb_sweep(l_hi, eta, x);
    std::vector<cplx> out(l_hi - l_lo);
    for (int l = l_lo + 1; l <= l_hi; ++l) {
        const auto& s = sweep[l];
        // F*(G + iF) with the scale folded in; bounded for all l
        const double fg = s.fhat * s.ghat;
        const double ff = s.fhat * s.fhat * std::exp(-2.0 * s.exponent);
        out[l - l_lo - 1] = cplx(fg, ff) / x;
    }
    return out;
}

void check_band(std::span<const double> thetas, double theta_min) {
    for (double t : thetas)
        if (!(t >= theta_min && t <= M_PI - theta_min))
            throw Error(kMod, "theta-band",
                        "theta=" + std::to_string(t) + " outside [" + std::to_string(theta_min) +
                            ", pi - " + std::to_string(theta_min) + "]");
}

}  // namespace

CircleSamples assemble_circle(const PartialWaveDiagonal& diag, std::span<const double> thetas,
                              const TailModel& tail, int l_tail, double theta_min) {
    if (diag.values.empty()) throw domain_error(kMod, "empty diagonal");
    if (!(tail.k > 0.0)) throw domain_error(kMod, "tail model needs k > 0");
    check_band(thetas, theta_min);
    const int l_max = int(diag.values.size()) - 1;
    const double R = diag.R;
    const double x = tail.k * R;
    const double eta = tail.alpha / (2.0 * tail.k);
    if (l_tail <= 0) l_tail = default_l_tail(l_max, x);
    l_tail = std::max(l_tail, l_max + 1);

    const auto ctail = coulomb_diag_tail(l_max, l_tail, eta, x);

    CircleSamples out;
    out.R = R;
    out.thetas.assign(thetas.begin(), thetas.end());
    out.values.resize(thetas.size());
    const double pref = 1.0 / (4.0 * M_PI * R * R);
    std::vector<double> P(l_tail + 1);
    for (std::size_t j = 0; j < thetas.size(); ++j) {
        const double s = std::cos(thetas[j]);
        specfun::legendre_sweep(l_tail, s, P);
        cplx main = 0.0;
        for (int l = 0; l <= l_max; ++l) main += (2.0 * l + 1.0) * diag.values[l] * P[l];
        cplx tail_sum = 0.0;
        double kernel_partial = 0.0;
        for (int l = 0; l <= l_tail; ++l) {
            kernel_partial += P[l];
            if (l > l_max)
                tail_sum +=
                    (2.0 * l + 1.0) * (R * ctail[l - l_max - 1] - R / (2.0 * l + 1.0)) * P[l];
        }
        const double kernel = 1.0 / std::sqrt(2.0 - 2.0 * s);
        const cplx correction = pref * tail_sum + (kernel - kernel_partial) / (4.0 * M_PI * R);
        out.values[j] = pref * main + correction;
        if (std::abs(correction) > 0.01 * std::abs(out.values[j])) ++out.tail_warnings;
    }
    return out;
}

std::vector<double> extraction_thetas(int node_count) {
    if (node_count < 2) throw domain_error(kMod, "need at least 2 nodes");
    const auto gl = gauss_legendre(node_count);
    std::vector<double> thetas(node_count);
    for (int j = 0; j < node_count; ++j)
        thetas[j] = std::acos(gl.nodes[node_count - 1 - j]);  // ascending in theta
    return thetas;
}

PartialWaveDiagonal extract_partial_waves(const CircleSamples& samples, int L_max,
                                          const TailModel& tail, int l_tail, double theta_min) {
    const int n = int(samples.thetas.size());
    if (n != int(samples.values.size())) throw domain_error(kMod, "sample arrays mismatch");
    if (L_max < 0) throw domain_error(kMod, "L_max < 0");
    if (n < 2 * L_max + 32)
        throw Error(kMod, "aliasing",
                    "need >= 2*L_max+32 = " + std::to_string(2 * L_max + 32) +
                        " quadrature nodes, got " + std::to_string(n));
    check_band(samples.thetas, theta_min);
    if (!(tail.k > 0.0)) throw domain_error(kMod, "tail model needs k > 0");

    const double R = samples.R;
    const double x = tail.k * R;
    const double eta = tail.alpha / (2.0 * tail.k);
    if (l_tail <= 0) l_tail = default_l_tail(L_max, x);
    l_tail = std::max(l_tail, L_max + 1);

    const auto gl = gauss_legendre(n);
    for (int j = 0; j < n; ++j) {
        const double expect = std::acos(gl.nodes[n - 1 - j]);
        if (std::fabs(samples.thetas[j] - expect) > 1e-10)
            throw Error(kMod, "nodes",
                        "samples are not Gauss-Legendre nodes of order " + std::to_string(n));
    }

    const auto ctail = coulomb_diag_tail(L_max, l_tail, eta, x);

    // subtract everything the assembly would add for G_l = R/(2l+1):
    // what remains is band-limited to l <= L_max and safe to project
    std::vector<cplx> g(n);
    std::vector<double> P(l_tail + 1);
    const double pref = 1.0 / (4.0 * M_PI * R * R);
    for (int j = 0; j < n; ++j) {
        const double s = gl.nodes[n - 1 - j];
        specfun::legendre_sweep(l_tail, s, P);
        cplx tail_sum = 0.0;
        double partial_toL = 0.0, partial_toLt = 0.0;
        for (int l = 0; l <= l_tail; ++l) {
            partial_toLt += P[l];
            if (l <= L_max) partial_toL += P[l];
            if (l > L_max)
                tail_sum +=
                    (2.0 * l + 1.0) * (R * ctail[l - L_max - 1] - R / (2.0 * l + 1.0)) * P[l];
        }
        const double kernel = 1.0 / std::sqrt(2.0 - 2.0 * s);
        g[j] = samples.values[j] - pref * tail_sum -
               (kernel - partial_toLt) / (4.0 * M_PI * R) - partial_toL / (4.0 * M_PI * R);
    }

    // G_l = R/(2l+1) + 2 pi R^2 * int_{-1}^{1} g(s) P_l(s) ds
    PartialWaveDiagonal out;
    out.R = R;
    out.values.resize(L_max + 1);
    std::vector<double> Pl(L_max + 1);
    std::vector<cplx> acc(L_max + 1, cplx(0.0, 0.0));
    for (int j = 0; j < n; ++j) {
        const double s = gl.nodes[n - 1 - j];
        specfun::legendre_sweep(L_max, s, Pl);
        const cplx wg = gl.weights[n - 1 - j] * g[j];
        for (int l = 0; l <= L_max; ++l) acc[l] += wg * Pl[l];
    }
    for (int l = 0; l <= L_max; ++l)
        out.values[l] = R / (2.0 * l + 1.0) + 2.0 * M_PI * R * R * acc[l];
    return out;
}

}  // namespace heliosolve::multipole
