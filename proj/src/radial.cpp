#include "heliosolve/radial.hpp"

#include <algorithm>
#include <cmath>

#include "heliosolve/errors.hpp"
#include "heliosolve/rk45.hpp"

namespace heliosolve::radial {
namespace {

constexpr const char* kMod = "radial";
using cplx = std::complex<double>;
using State = std::array<cplx, 2>;

struct SolveRecorder {
    std::vector<double> r;
    std::vector<cplx> phi, dphi;
    std::vector<double> ls;
    void push(double rr, const State& y, double scale) {
        r.push_back(rr);
        phi.push_back(y[0]);
        dphi.push_back(y[1]);
        ls.push_back(scale);
    }
};

// Integrates phi'' = (l(l+1)/r^2 + v - kappa^2) phi over [a, b] (either
// direction), renormalizing so max(|phi|, |phi'|/kappa) stays in
// [1e-2, 1e2]; log_scale accumulates the removed factor.
void integrate_schrodinger(const solar::PotentialProfile& pot, int ell, double a, double b,
                           State& y, double& log_scale, std::span<const double> stations,
                           SolveRecorder* rec, const SolveOptions& opt) {
    const double kappa = pot.kappa();
    const double ll1 = double(ell) * (ell + 1.0);
    const double k2 = kappa * kappa;
    solar::PotentialProfile::EvalHint hint;
    auto rhs = [&](double r, const State& s, State& out) {
        out[0] = s[1];
        out[1] = (ll1 / (r * r) + pot.v_hat(r, hint) - k2) * s[0];
    };
    Rk45Options<cplx, 2> o;
    o.rtol = opt.rtol;
    o.atol = 0.0;
    o.max_steps = opt.max_steps;
    o.weight = [kappa](const State& s, std::size_t i) {
        const double m = std::max(std::abs(s[0]), std::abs(s[1]) / kappa);
        return i == 0 ? m : m * kappa;
    };
    double* ls = &log_scale;
    o.post_step = [kappa, ls](double, State& s) {
        const double m = std::max(std::abs(s[0]), std::abs(s[1]) / kappa);
        if (m > 1e2 || (m > 0.0 && m < 1e-2)) {
            const int ex = int(std::lround(std::log2(m)));
            *ls += double(ex) * 0.69314718055994530942;
            return std::ldexp(1.0, -ex);
        }
        return 1.0;
    };
    if (rec) {
        o.on_station = [rec, ls](double r, const State& s) { rec->push(r, s, *ls); };
    }
    try {
        rk45_integrate(rhs, a, b, y, stations, o);
    } catch (const Error& e) {
        throw Error(kMod, e.code(), "ell=" + std::to_string(ell) + ": " + e.detail());
    }
}

double series_start(const solar::PotentialProfile& pot, int ell) {
    const double bound = 1e-12 * (2.0 * ell + 2.0) * (2.0 * ell + 3.0) /
                         (pot.max_abs_v_hat() + pot.kappa() * pot.kappa());
    return std::sqrt(bound);
}

// H^+ at r_hat as mantissas at scale exp(E); derivatives are d/d r_hat.
struct HplusScaled {
    cplx h, dh;
    cplx hm, dhm;  // H^- (complex conjugate branch)
    double E;
};

HplusScaled hplus_at(const solar::PotentialProfile& pot, int ell, double r_hat) {
    const auto fg = specfun::coulomb_fg_scaled(ell, pot.eta(), pot.kappa() * r_hat);
    HplusScaled out;
    const double damp = std::exp(-2.0 * fg.exponent);
    out.h = cplx(fg.ghat, fg.fhat * damp);
    out.dh = pot.kappa() * cplx(fg.dghat, fg.dfhat * damp);
    out.hm = std::conj(out.h);
    out.dhm = std::conj(out.dh);
    out.E = fg.exponent;
    return out;
}

MatchingResult match_at(const solar::PotentialProfile& pot, int ell, const cplx& phi,
                        const cplx& dphi, double ls, double r_hat) {
    const HplusScaled H = hplus_at(pot, ell, r_hat);
    const cplx wp = phi * H.dh - dphi * H.h;
    const cplx wm = phi * H.dhm - dphi * H.hm;
    const double scale = std::abs(phi) * std::abs(H.dh) + std::abs(dphi) * std::abs(H.h);
    if (std::abs(wp) < 1e-12 * scale)
        throw Error(kMod, "degenerate-matching",
                    "[phi, H+] vanishes at ell=" + std::to_string(ell) +
                        " (proximity to a resolvent pole)");
    MatchingResult m;
    m.cond_flag = std::abs(wp) < 1e-8 * scale;
    m.s = wm / wp;
    m.b_mantissa = wp / (cplx(0.0, 2.0) * pot.kappa());
    m.b_log_scale = ls + H.E;
    return m;
}

}  // namespace

RadialSolution integrate_regular(const solar::PotentialProfile& pot, int ell, double r_end_hat,
                                 std::span<const double> stations_hat, const SolveOptions& opt) {
    if (ell < 0) throw domain_error(kMod, "ell < 0");
    if (!(r_end_hat > 0.0)) throw domain_error(kMod, "r_end must be positive");

    double r0 = series_start(pot, ell);
    for (double s : stations_hat) r0 = std::min(r0, 0.5 * s);
    if (r0 >= r_end_hat) r0 = 0.5 * r_end_hat;

    RadialSolution sol;
    sol.ell = ell;
    sol.kappa = pot.kappa();
    sol.r_series_start = r0;

    const cplx a2 = (pot.v_hat(r0) - cplx(pot.kappa() * pot.kappa(), 0.0)) / (4.0 * ell + 6.0);
    State y{cplx(1.0, 0.0) + a2 * (r0 * r0),
            (cplx(double(ell) + 1.0, 0.0) + a2 * (r0 * r0) * (double(ell) + 3.0)) / r0};
    double ls = (double(ell) + 1.0) * std::log(r0);
    {
        const double m = std::max(std::abs(y[0]), std::abs(y[1]) / pot.kappa());
        const int ex = int(std::lround(std::log2(m)));
        y[0] = std::ldexp(1.0, -ex) * y[0];
        y[1] = std::ldexp(1.0, -ex) * y[1];
        ls += double(ex) * 0.69314718055994530942;
    }

    SolveRecorder rec;
    rec.push(r0, y, ls);
    std::vector<double> stations(stations_hat.begin(), stations_hat.end());
    std::sort(stations.begin(), stations.end());
    stations.erase(std::unique(stations.begin(), stations.end()), stations.end());
    if (stations.empty() || stations.back() < r_end_hat) stations.push_back(r_end_hat);
    integrate_schrodinger(pot, ell, r0, r_end_hat, y, ls, stations, &rec, opt);

    sol.grid = std::move(rec.r);
    sol.phi = std::move(rec.phi);
    sol.dphi = std::move(rec.dphi);
    sol.log_scale = std::move(rec.ls);
    return sol;
}

MatchingResult match_scattering(const RadialSolution& sol, const solar::PotentialProfile& pot) {
    const double ra = pot.ra_hat();
    std::size_t best = 0;
    double dbest = 1e300;
    for (std::size_t i = 0; i < sol.grid.size(); ++i) {
        const double d = std::fabs(sol.grid[i] - ra);
        if (d < dbest) {
            dbest = d;
            best = i;
        }
    }
    if (dbest > 1e-9 * ra)
        throw domain_error(kMod, "solution not sampled at R_a (integrate at least to R_a)");
    return match_at(pot, sol.ell, sol.phi[best], sol.dphi[best], sol.log_scale[best],
                    sol.grid[best]);
}

DiagonalResult greens_diagonal(const solar::PotentialProfile& pot, int ell,
                               std::span<const double> r_obs_hat, const SolveOptions& opt) {
    const double ra = pot.ra_hat();
    std::vector<double> interior;
    for (double r : r_obs_hat)
        if (r < ra) interior.push_back(r);
    std::sort(interior.begin(), interior.end());
    interior.erase(std::unique(interior.begin(), interior.end()), interior.end());

    RadialSolution sol = integrate_regular(pot, ell, ra, interior, opt);
    MatchingResult m = match_scattering(sol, pot);

    std::vector<cplx> phip(interior.size());
    std::vector<double> phip_ls(interior.size());
    if (!interior.empty()) {
        const HplusScaled H = hplus_at(pot, ell, ra);
        State y{H.h, H.dh};
        double ls = H.E;
        std::vector<double> down(interior.rbegin(), interior.rend());
        SolveRecorder rec;
        integrate_schrodinger(pot, ell, ra, interior.front(), y, ls, down, &rec, opt);
        if (rec.r.size() != interior.size())
            throw accuracy_loss(kMod, "inward station bookkeeping mismatch");
        for (std::size_t i = 0; i < rec.r.size(); ++i) {
            const std::size_t j = interior.size() - 1 - i;
            phip[j] = rec.phi[i];
            phip_ls[j] = rec.ls[i];
        }
    }

    const cplx denom = cplx(0.0, 2.0) * pot.kappa() * m.b_mantissa;
    DiagonalResult out;
    out.match = m;
    out.g_diag_hat.resize(r_obs_hat.size());
    for (std::size_t i = 0; i < r_obs_hat.size(); ++i) {
        const double r = r_obs_hat[i];
        cplx num;
        double ls_num;
        if (r < ra) {
            const auto it = std::lower_bound(interior.begin(), interior.end(), r);
            const std::size_t j = std::size_t(it - interior.begin());
            std::size_t ksol = 0;
            double db = 1e300;
            for (std::size_t k = 0; k < sol.grid.size(); ++k) {
                const double d = std::fabs(sol.grid[k] - r);
                if (d < db) {
                    db = d;
                    ksol = k;
                }
            }
            num = sol.phi[ksol] * phip[j];
            ls_num = sol.log_scale[ksol] + phip_ls[j];
        } else {
            const HplusScaled H = hplus_at(pot, ell, r);
            num = m.b_mantissa * (H.hm - m.s * H.h) * H.h;
            ls_num = m.b_log_scale + 2.0 * H.E;
        }
        out.g_diag_hat[i] = -num * std::exp(ls_num - m.b_log_scale) / denom;
    }
    return out;
}

RadialGreens::RadialGreens(const solar::PotentialProfile& pot, int ell, const SolveOptions& opt,
                           double interp_tol)
    : ell_(ell),
      kappa_(pot.kappa()),
      eta_(pot.eta()),
      ra_hat_(pot.ra_hat()),
      r_unit_(pot.r_unit()) {
    const double c_acc = std::pow(384.0 * interp_tol, 0.25);
    const double r0 = series_start(pot, ell);
    grid_.push_back(r0);
    while (grid_.back() < ra_hat_) {
        const double r = grid_.back();
        const double dr = c_acc / std::max(kappa_, (double(ell) + 1.0) / r);
        grid_.push_back(std::min(r + dr, ra_hat_));
        if (grid_.size() > 5'000'000) throw accuracy_loss(kMod, "interpolation grid too large");
    }

    {
        RadialSolution sol =
            integrate_regular(pot, ell, ra_hat_, std::span<const double>(grid_).subspan(1), opt);
        if (sol.grid.size() != grid_.size()) throw accuracy_loss(kMod, "grid bookkeeping mismatch");
        match_ = match_at(pot, ell, sol.phi.back(), sol.dphi.back(), sol.log_scale.back(),
                          sol.grid.back());
        reg_.v = std::move(sol.phi);
        reg_.dv = std::move(sol.dphi);
        reg_.ls = std::move(sol.log_scale);
    }

    {
        const HplusScaled H = hplus_at(pot, ell, ra_hat_);
        State y{H.h, H.dh};
        double ls = H.E;
        SolveRecorder rec;
        rec.push(ra_hat_, y, ls);
        std::vector<double> down(grid_.rbegin() + 1, grid_.rend());
        integrate_schrodinger(pot, ell, ra_hat_, grid_.front(), y, ls, down, &rec, opt);
        const std::size_t n = rec.r.size();
        if (n != grid_.size()) throw accuracy_loss(kMod, "inward grid bookkeeping mismatch");
        out_.v.resize(n);
        out_.dv.resize(n);
        out_.ls.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            out_.v[n - 1 - i] = rec.phi[i];
            out_.dv[n - 1 - i] = rec.dphi[i];
            out_.ls[n - 1 - i] = rec.ls[i];
        }
    }

    denom_mantissa_ = cplx(0.0, 2.0) * kappa_ * match_.b_mantissa;
    denom_ls_ = match_.b_log_scale;
}

void RadialGreens::value_at(const Branch& b, double r, cplx& val, double& ls) const {
    if (r <= grid_.front()) {
        // power-law continuation below the series start
        val = b.v.front();
        ls = b.ls.front() + (double(ell_) + 1.0) * std::log(r / grid_.front());
        return;
    }
    auto it = std::upper_bound(grid_.begin(), grid_.end(), r);
    std::size_t i = std::size_t(it - grid_.begin());
    i = std::min(std::max<std::size_t>(i, 1), grid_.size() - 1) - 1;
    const double h = grid_[i + 1] - grid_[i];
    const double t = (r - grid_[i]) / h;
    const double align = std::exp(b.ls[i + 1] - b.ls[i]);
    const cplx v1 = b.v[i + 1] * align, d1 = b.dv[i + 1] * align;
    const double t2 = t * t, t3 = t2 * t;
    val = (2 * t3 - 3 * t2 + 1) * b.v[i] + (t3 - 2 * t2 + t) * h * b.dv[i] +
          (-2 * t3 + 3 * t2) * v1 + (t3 - t2) * h * d1;
    ls = b.ls[i];
}

std::complex<double> RadialGreens::tail_regular(double r_hat, double& ls) const {
    const auto fg = specfun::coulomb_fg_scaled(ell_, eta_, kappa_ * r_hat);
    const double damp = std::exp(-2.0 * fg.exponent);
    const cplx h(fg.ghat, fg.fhat * damp);
    ls = match_.b_log_scale + fg.exponent;
    return match_.b_mantissa * (std::conj(h) - match_.s * h);
}

std::complex<double> RadialGreens::tail_outgoing(double r_hat, double& ls) const {
    const auto fg = specfun::coulomb_fg_scaled(ell_, eta_, kappa_ * r_hat);
    ls = fg.exponent;
    return {fg.ghat, fg.fhat * std::exp(-2.0 * fg.exponent)};
}

std::complex<double> RadialGreens::eval_hat(double r1_hat, double r2_hat) const {
    if (!(r1_hat > 0.0) || !(r2_hat > 0.0)) throw domain_error(kMod, "radii must be positive");
    const double rlo = std::min(r1_hat, r2_hat), rhi = std::max(r1_hat, r2_hat);
    cplx lo, hi;
    double ls_lo, ls_hi;
    if (rlo >= ra_hat_)
        lo = tail_regular(rlo, ls_lo);
    else
        value_at(reg_, rlo, lo, ls_lo);
    if (rhi >= ra_hat_)
        hi = tail_outgoing(rhi, ls_hi);
    else
        value_at(out_, rhi, hi, ls_hi);
    return -lo * hi * std::exp(ls_lo + ls_hi - denom_ls_) / denom_mantissa_;
}

std::complex<double> RadialGreens::eval(double r1, double r2) const {
    return eval_hat(r1 / r_unit_, r2 / r_unit_) * r_unit_;
}

double power_balance_residual(const RadialGreens& g, const solar::PotentialProfile& pot,
                              double r_hat, double R_hat) {
    if (!(R_hat > r_hat && r_hat > 0.0)) throw domain_error(kMod, "require R > r > 0");
    const double im_diag = g.eval_hat(r_hat, r_hat).imag();
    const double flux = pot.kappa() * std::norm(g.eval_hat(R_hat, r_hat));
    // Im v vanishes identically at and above R_a, so the interior grid
    // carries the whole absorption integral.
    const auto& nodes = g.interp_grid();
    double integral = 0.0;
    double prev_r = 0.0, prev_f = 0.0;
    bool have_prev = false;
    for (double rn : nodes) {
        if (rn > R_hat) break;
        const double imv = pot.v_hat(rn).imag();
        const double f = imv * std::norm(g.eval_hat(rn, r_hat));
        if (have_prev) integral += 0.5 * (f + prev_f) * (rn - prev_r);
        prev_r = rn;
        prev_f = f;
        have_prev = true;
    }
    return std::fabs(im_diag - flux + integral);
}

}  // namespace heliosolve::radial
