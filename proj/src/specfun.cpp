#include "heliosolve/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include "heliosolve/errors.hpp"
#include "heliosolve/rk45.hpp"

namespace heliosolve::specfun {
namespace {

constexpr double kLn2 = 0.69314718055994530942;

void check_args(int ell, double eta, double rho, int cap = kEllCap) {
    if (!(rho > 0.0))
        throw domain_error("specfun", "rho must be positive, got " + std::to_string(rho));
    if (ell < 0 || ell > cap)
        throw domain_error("specfun", "ell out of [0," + std::to_string(cap) + "]");
    if (!(std::fabs(eta) <= kEtaMax))
        throw domain_error("specfun", "|eta| exceeds " + std::to_string(kEtaMax));
}

// Coefficients of the l-recurrences (DLMF 33.4): R_l = sqrt(1+eta^2/l^2),
// S_l = l/rho + eta/l.
inline double rec_R(double lam, double eta) {
    const double t = eta / lam;
    return std::sqrt(1.0 + t * t);
}
inline double rec_S(double lam, double eta, double rho) { return lam / rho + eta / lam; }

// CF1: f = F'/F by modified Lentz. `sign` is the sign of F itself,
// tracked through the denominator signs (Miller-style).
struct Cf1 {
    double f;
    double sign;
};

Cf1 cf1_logderiv(int ell, double eta, double rho) {
    constexpr double tiny = 1e-280;
    double b = rec_S(ell + 1.0, eta, rho);
    double f = (b != 0.0) ? b : tiny;
    double C = f, D = 0.0, sign = 1.0;
    for (long n = 1; n < 4'000'000; ++n) {
        const double lam = double(ell) + double(n);
        const double t = eta / lam;
        const double a = -(1.0 + t * t);
        const double bb = rec_S(lam, eta, rho) + rec_S(lam + 1.0, eta, rho);
        D = bb + a * D;
        if (D == 0.0) D = tiny;
        C = bb + a / C;
        if (C == 0.0) C = tiny;
        D = 1.0 / D;
        if (D < 0.0) sign = -sign;
        const double delta = C * D;
        f *= delta;
        if (std::fabs(delta - 1.0) < 2e-16) return {f, sign};
    }
    throw accuracy_loss("specfun", "CF1 stalled at ell=" + std::to_string(ell) +
                                       " rho=" + std::to_string(rho));
}

// CF2: p + i q = dH+/drho / H+ (Steed's continued fraction).
std::complex<double> cf2_logderiv(int ell, double eta, double rho, long max_iter) {
    using C = std::complex<double>;
    constexpr double tiny = 1e-280;
    C f(tiny, 0.0), Cc = f, D(0.0, 0.0);
    for (long n = 1; n <= max_iter; ++n) {
        const C a = C(double(n - 1 - ell), eta) * C(double(n + ell), eta);
        const C b = C(2.0 * (rho - eta), 2.0 * double(n));
        D = b + a * D;
        if (D == C(0.0)) D = C(tiny, 0.0);
        Cc = b + a / Cc;
        if (Cc == C(0.0)) Cc = C(tiny, 0.0);
        D = 1.0 / D;
        const C delta = Cc * D;
        f *= delta;
        if (std::abs(delta - 1.0) < 2e-16)
            return C(0.0, 1.0) * (1.0 - eta / rho) + C(0.0, 1.0) * f / rho;
    }
    throw accuracy_loss("specfun", "CF2 stalled at ell=" + std::to_string(ell) +
                                       " rho=" + std::to_string(rho));
}

struct FgPlain {
    double F, Fp, G, Gp;
};

// CF1 + CF2 + Steed's formulas; valid in the oscillatory region.
FgPlain steed(int ell, double eta, double rho) {
    const Cf1 c1 = cf1_logderiv(ell, eta, rho);
    const std::complex<double> pq = cf2_logderiv(ell, eta, rho, 500'000);
    const double p = pq.real(), q = pq.imag();
    if (!(q > 0.0))
        throw accuracy_loss("specfun", "CF2 q <= 0 at ell=" + std::to_string(ell));
    const double gamma = (c1.f - p) / q;
    const double F = c1.sign / std::sqrt(q * (gamma * gamma + 1.0));
    return {F, c1.f * F, gamma * F, (p * gamma - q) * F};
}

// Where direct CF2 is trusted: comfortably past the turning point, and
// not at minuscule rho where it needs excessive iterations.
double direct_threshold(int ell, double eta) {
    const double tp = coulomb_turning_point(ell, eta);
    return 1.02 * tp + 0.5;
}

// (value, derivative) carrying a power-of-two exponent.
struct Scaled {
    double v, dv;
    long e2;  // true value = v * 2^e2
};

void renorm(Scaled& s) {
    const double m = std::max(std::fabs(s.v), std::fabs(s.dv));
    if (m > 0x1p+500 || (m > 0.0 && m < 0x1p-500)) {
        int ex;
        (void)std::frexp(m, &ex);
        s.v = std::ldexp(s.v, -ex);
        s.dv = std::ldexp(s.dv, -ex);
        s.e2 += ex;
    }
}

// F, F', G, G' at ell = 0, anchored directly by Steed's method or, below
// the CF2 trust region, by inward integration of (G, G') from the anchor
// with Wronskian normalization of F.
struct Anchor0 {
    Scaled F;  // F.v * 2^F.e2, derivative alongside
    Scaled G;
};

Anchor0 anchor_order_zero(double eta, double rho) {
    const double rho_dir = direct_threshold(0, eta);
    if (rho >= rho_dir) {
        const FgPlain s = steed(0, eta, rho);
        return {{s.F, s.Fp, 0}, {s.G, s.Gp, 0}};
    }
    const FgPlain s2 = steed(0, eta, rho_dir);
    std::array<double, 2> y{s2.G, s2.Gp};
    long e2 = 0;
    Rk45Options<double, 2> opt;
    opt.rtol = 1e-13;
    opt.atol = 1e-300;
    opt.weight = [&y](const std::array<double, 2>& s, std::size_t) {
        (void)s;
        return std::max(std::fabs(y[0]), std::fabs(y[1]));
    };
    opt.post_step = [&e2](double, std::array<double, 2>& s) {
        const double m = std::max(std::fabs(s[0]), std::fabs(s[1]));
        if (m > 0x1p+500) {
            int ex;
            (void)std::frexp(m, &ex);
            e2 += ex;
            return std::ldexp(1.0, -ex);
        }
        return 1.0;
    };
    auto rhs = [eta](double r, const std::array<double, 2>& s, std::array<double, 2>& out) {
        out[0] = s[1];
        out[1] = (2.0 * eta / r - 1.0) * s[0];
    };
    rk45_integrate(rhs, rho_dir, rho, y, {}, opt);

    const Cf1 c1 = cf1_logderiv(0, eta, rho);
    // F*(f*G - G') = 1, so F carries the opposite exponent of G.
    const double denom = c1.f * y[0] - y[1];
    if (denom == 0.0) throw accuracy_loss("specfun", "degenerate Wronskian normalization");
    const double Fv = 1.0 / denom;
    return {{Fv, c1.f * Fv, -e2}, {y[0], y[1], e2}};
}

struct Assembled {
    std::vector<CoulombScaled> values;  // per order 0..ell_max
};

// Shared core of coulomb_fg_scaled / coulomb_sweep: anchor at order 0,
// carry G up by the recurrence, carry an unnormalized F down from CF1 at
// the top order, normalize at 0. `keep_all` selects sweep output.
Assembled assemble(int ell_max, double eta, double rho, bool keep_all) {
    Anchor0 a = anchor_order_zero(eta, rho);

    std::vector<Scaled> gs(keep_all ? ell_max + 1 : 1);
    Scaled g = a.G;
    if (keep_all) gs[0] = g;
    Scaled g_top = g;
    for (int lam = 1; lam <= ell_max; ++lam) {
        const double R = rec_R(lam, eta), S = rec_S(lam, eta, rho);
        const double gv = (S * g.v - g.dv) / R;
        const double gdv = R * g.v - S * gv;
        g = {gv, gdv, g.e2};
        renorm(g);
        if (keep_all) gs[lam] = g;
        if (lam == ell_max) g_top = g;
    }
    if (ell_max == 0) g_top = g;

    std::vector<Scaled> fs(keep_all ? ell_max + 1 : 1);
    Scaled ftil{1.0, 0.0, 0};
    if (ell_max > 0) {
        const Cf1 c1 = cf1_logderiv(ell_max, eta, rho);
        ftil = {1.0, c1.f, 0};
    } else {
        ftil = {a.F.v, a.F.dv, a.F.e2};
    }
    Scaled ftil_top = ftil;
    if (keep_all) fs[ell_max] = ftil;
    for (int lam = ell_max; lam >= 1; --lam) {
        const double R = rec_R(lam, eta), S = rec_S(lam, eta, rho);
        const double fv = (S * ftil.v + ftil.dv) / R;
        const double fdv = S * fv - R * ftil.v;
        ftil = {fv, fdv, ftil.e2};
        renorm(ftil);
        if (keep_all) fs[lam - 1] = ftil;
    }

    // normalization: true F_lam = F0_true * ftil_lam / ftil_0
    const double f0 = ftil.v;
    if (f0 == 0.0) throw accuracy_loss("specfun", "downward recurrence hit a zero at order 0");
    const double scale = a.F.v / f0;
    const long escale = a.F.e2 - ftil.e2;

    Assembled out;
    const int n = keep_all ? ell_max + 1 : 1;
    out.values.resize(n);
    auto emit = [&](int idx, const Scaled& fl, const Scaled& gl) {
        CoulombScaled cs;
        cs.exponent = double(gl.e2) * kLn2;
        cs.ghat = gl.v;
        cs.dghat = gl.dv;
        // fhat = F * 2^{gl.e2}; F*G is bounded so the combined shift is safe
        const long sh = fl.e2 + escale + gl.e2;
        cs.fhat = std::ldexp(scale * fl.v, int(sh));
        cs.dfhat = std::ldexp(scale * fl.dv, int(sh));
        out.values[idx] = cs;
    };
    if (keep_all) {
        for (int lam = 0; lam <= ell_max; ++lam) emit(lam, fs[lam], gs[lam]);
    } else {
        emit(0, ftil_top, g_top);
    }
    return out;
}

std::complex<double> im_log_gamma_stirling(std::complex<double> z) {
    // |z| >= 12 assumed
    const std::complex<double> lz = std::log(z);
    std::complex<double> s = (z - 0.5) * lz - z + 0.91893853320467274178;  // 0.5*ln(2*pi)
    const std::complex<double> z2 = z * z;
    std::complex<double> zp = z;
    static constexpr double kB[6] = {1.0 / 12,   -1.0 / 360,      1.0 / 1260,
                                     -1.0 / 1680, 1.0 / 1188,     -691.0 / 360360};
    for (double c : kB) {
        s += c / zp;
        zp *= z2;
    }
    return s;
}

}  // namespace

double coulomb_turning_point(int ell, double eta) {
    return eta + std::sqrt(eta * eta + double(ell) * (ell + 1.0));
}

CoulombScaled coulomb_fg_scaled(int ell, double eta, double rho) {
    check_args(ell, eta, rho);
    if (rho >= direct_threshold(ell, eta)) {
        const FgPlain s = steed(ell, eta, rho);
        return {s.F, s.Fp, s.G, s.Gp, 0.0};
    }
    return assemble(ell, eta, rho, false).values[0];
}

std::vector<CoulombScaled> coulomb_sweep(int ell_max, double eta, double rho) {
    check_args(ell_max, eta, rho, kSweepEllCap);
    return assemble(ell_max, eta, rho, true).values;
}

CoulombPair coulomb_h(int ell, double eta, double rho) {
    const CoulombScaled s = coulomb_fg_scaled(ell, eta, rho);
    if (s.exponent > 700.0)
        throw accuracy_loss("specfun",
                            "H overflows in the deep forbidden region (ell=" +
                                std::to_string(ell) + ", rho=" + std::to_string(rho) +
                                "); use coulomb_fg_scaled");
    const double up = std::exp(s.exponent), dn = std::exp(-s.exponent);
    CoulombPair out;
    out.h_plus = {s.ghat * up, s.fhat * dn};
    out.dh_plus = {s.dghat * up, s.dfhat * dn};
    out.h_minus = std::conj(out.h_plus);
    out.dh_minus = std::conj(out.dh_plus);
    return out;
}

double coulomb_sigma(int ell, double eta) {
    if (ell < 0 || ell > kEllCap) throw domain_error("specfun", "ell out of range");
    if (!(std::fabs(eta) <= kEtaMax)) throw domain_error("specfun", "|eta| too large");
    if (eta == 0.0) return 0.0;
    double x = double(ell) + 1.0;
    double acc = 0.0;
    while (x < 12.0) {
        acc += std::atan2(eta, x);
        x += 1.0;
    }
    return im_log_gamma_stirling({x, eta}).imag() - acc;
}

double coulomb_abs2_h(const CoulombScaled& fg) {
    const double g = fg.ghat * std::exp(fg.exponent);
    const double f = fg.fhat * std::exp(-fg.exponent);
    return f * f + g * g;
}

CoulombPhase coulomb_phase(int ell, double eta, double rho, const CoulombScaled& fg) {
    CoulombPhase p;
    p.sigma_l = coulomb_sigma(ell, eta);
    p.theta = rho - eta * std::log(2.0 * rho) - 0.5 * double(ell) * M_PI + p.sigma_l;
    p.vartheta = 2.0 * std::atan2(fg.fhat * std::exp(-2.0 * fg.exponent), fg.ghat);
    return p;
}

CoulombPhase coulomb_phase(int ell, double eta, double rho) {
    return coulomb_phase(ell, eta, rho, coulomb_fg_scaled(ell, eta, rho));
}

double legendre_p(int ell, double s) {
    if (ell < 0) throw domain_error("specfun", "legendre_p: ell < 0");
    if (!(s >= -1.0 && s <= 1.0))
        throw domain_error("specfun", "legendre_p: s outside [-1,1]");
    double p0 = 1.0, p1 = s;
    if (ell == 0) return p0;
    for (int j = 2; j <= ell; ++j) {
        const double p2 = ((2.0 * j - 1.0) * s * p1 - (j - 1.0) * p0) / double(j);
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

void legendre_sweep(int ell_max, double s, std::span<double> out) {
    if (ell_max < 0 || out.size() < std::size_t(ell_max) + 1)
        throw domain_error("specfun", "legendre_sweep: bad output span");
    if (!(s >= -1.0 && s <= 1.0))
        throw domain_error("specfun", "legendre_sweep: s outside [-1,1]");
    out[0] = 1.0;
    if (ell_max == 0) return;
    out[1] = s;
    for (int j = 2; j <= ell_max; ++j)
        out[j] = ((2.0 * j - 1.0) * s * out[j - 1] - (j - 1.0) * out[j - 2]) / double(j);
}

double unwrap_angle(double raw, double ref) {
    return raw - 2.0 * M_PI * std::round((raw - ref) / (2.0 * M_PI));
}

}  // namespace heliosolve::specfun
