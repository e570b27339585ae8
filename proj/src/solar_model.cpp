#include "heliosolve/solar_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "heliosolve/errors.hpp"

namespace heliosolve::solar {
namespace {

constexpr const char* kMod = "solar-model";

double atmosphere_rho(double r, double rho0, double H, double R_a) {
    return rho0 * std::exp(-(r - R_a) / H);
}

struct UTables {
    std::vector<double> grid_hat;        // ascending
    std::vector<double> u1h, u2h, u3h;   // dimensionless (R_sun^2 * u)
    double atm_start_hat;
};

// Nodal values of the dimensionless unknowns. The density term comes
// from a cubic spline of w = rho^{-1/2}; at and above atm_start it is
// the closed form alpha_hat/r_hat.
UTables build_utables(const SolarModel& m) {
    const double R = m.R_sun();
    const double alpha_hat = R / m.H();
    const std::size_t n = m.grid_r().size();
    UTables t;
    t.atm_start_hat = m.atm_start() / R;
    t.grid_hat.resize(n);
    t.u1h.resize(n);
    t.u2h.resize(n);
    t.u3h.resize(n);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        t.grid_hat[i] = m.grid_r()[i] / R;
        w[i] = 1.0 / std::sqrt(m.rho()[i]);
    }
    CubicSpline ws(t.grid_hat, w);
    const double quarter_alpha2 = 0.25 * alpha_hat * alpha_hat;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = t.grid_hat[i];
        const double ci = m.c()[i];
        t.u1h[i] = R * R * (1.0 / (m.c0() * m.c0()) - 1.0 / (ci * ci));
        t.u3h[i] = R * R * m.gamma()[i] / (ci * ci);
        if (r >= t.atm_start_hat) {
            t.u2h[i] = alpha_hat / r;
        } else {
            std::size_t hint = i > 0 ? i - 1 : 0;
            const double wv = ws.eval(r, &hint);
            const double wd = ws.deriv(r, &hint);
            const double wdd = ws.deriv2(r, &hint);
            t.u2h[i] = (wdd + 2.0 / r * wd) / wv - quarter_alpha2;
        }
    }

    // Coarse-grid diagnostic: node-to-node oscillation of the density term
    // dominating its trend means the second-derivative estimate is not
    // trustworthy on this grid.
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(t.u2h[i]) || !std::isfinite(t.u1h[i]) || !std::isfinite(t.u3h[i]))
            throw Error(kMod, "smoothness",
                        "non-finite potential term at node " + std::to_string(i));
    // Only radii below min(atm_start, R_a) feed the potential through the
    // spline; skip a few samples at each end (local end effects).
    const double top = std::min(t.atm_start_hat, m.R_a() / R);
    double e_hf = 0.0, e_trend = 0.0;
    std::size_t interior = 0;
    std::vector<double> d2s, d1s;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (t.grid_hat[i + 1] >= top) break;
        d2s.push_back(t.u2h[i + 1] - 2.0 * t.u2h[i] + t.u2h[i - 1]);
        d1s.push_back(0.5 * (t.u2h[i + 1] - t.u2h[i - 1]));
    }
    for (std::size_t i = 12; i + 12 < d2s.size(); ++i) {
        ++interior;
        e_hf += d2s[i] * d2s[i];
        e_trend += d1s[i] * d1s[i];
    }
    if (interior > 16 && e_hf > std::max(e_trend, 1e-280))
        throw Error(kMod, "smoothness",
                    "density second-derivative estimate unstable (grid too coarse?)");
    return t;
}

}  // namespace

SolarModel::SolarModel(std::vector<double> grid_r, std::vector<double> c,
                       std::vector<double> rho, std::vector<double> gamma, double c0,
                       double rho0, double H, double h_a, double R_sun)
    : grid_r_(std::move(grid_r)),
      c_(std::move(c)),
      rho_(std::move(rho)),
      gamma_(std::move(gamma)),
      c0_(c0),
      rho0_(rho0),
      H_(H),
      h_a_(h_a),
      R_sun_(R_sun) {
    const std::size_t n = grid_r_.size();
    if (n < 3 || c_.size() != n || rho_.size() != n || gamma_.size() != n)
        throw Error(kMod, "invariant", "need >= 3 rows with equal column lengths");
    if (!(c0_ > 0.0 && rho0_ > 0.0 && H_ > 0.0 && h_a_ > 0.0 && R_sun_ > 0.0))
        throw Error(kMod, "invariant", "atmospheric constants must be positive");
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && !(grid_r_[i] > grid_r_[i - 1]))
            throw Error(kMod, "invariant",
                        "grid_r not strictly increasing at row " + std::to_string(i + 1));
        if (!(grid_r_[i] > 0.0))
            throw Error(kMod, "invariant",
                        "grid_r must be positive at row " + std::to_string(i + 1));
        if (!(c_[i] > 0.0) || !std::isfinite(c_[i]))
            throw Error(kMod, "invariant",
                        "non-positive sound speed at row " + std::to_string(i + 1));
        if (!(rho_[i] > 0.0) || !std::isfinite(rho_[i]))
            throw Error(kMod, "invariant",
                        "non-positive or non-finite density at row " + std::to_string(i + 1));
        if (!std::isfinite(gamma_[i]))
            throw Error(kMod, "invariant", "non-finite gamma at row " + std::to_string(i + 1));
    }
    const double Ra = R_a();
    if (grid_r_.back() < Ra)
        throw Error(kMod, "invariant", "last grid point below R_a");

    // Continuity with the atmosphere at R_a (1% tolerance), checked on the
    // tabulated profiles before they are rewritten.
    {
        auto it = std::lower_bound(grid_r_.begin(), grid_r_.end(), Ra);
        std::size_t j = std::size_t(it - grid_r_.begin());
        double rho_ra, c_ra;
        if (j == 0 || j >= n || grid_r_[j] == Ra) {
            const std::size_t k = std::min(j, n - 1);
            rho_ra = rho_[k];
            c_ra = c_[k];
        } else {
            const double f = (Ra - grid_r_[j - 1]) / (grid_r_[j] - grid_r_[j - 1]);
            rho_ra = std::exp((1.0 - f) * std::log(rho_[j - 1]) + f * std::log(rho_[j]));
            c_ra = (1.0 - f) * c_[j - 1] + f * c_[j];
        }
        if (std::fabs(rho_ra - rho0_) > 0.01 * rho0_)
            throw Error(kMod, "invariant", "tabulated density at R_a deviates from rho0 by >1%");
        if (std::fabs(c_ra - c0_) > 0.01 * c0_)
            throw Error(kMod, "invariant", "tabulated sound speed at R_a deviates from c0 by >1%");
    }

    // Apply the atmospheric extension at r >= R_a.
    for (std::size_t i = 0; i < n; ++i) {
        if (grid_r_[i] >= Ra) {
            c_[i] = c0_;
            rho_[i] = atmosphere_rho(grid_r_[i], rho0_, H_, Ra);
            gamma_[i] = 0.0;
        }
    }

    // Detect the exact-atmosphere suffix of the table.
    std::size_t j = n;
    while (j > 0) {
        const std::size_t i = j - 1;
        const double rr = atmosphere_rho(grid_r_[i], rho0_, H_, Ra);
        if (std::fabs(rho_[i] - rr) <= 1e-12 * rr && std::fabs(c_[i] - c0_) <= 1e-12 * c0_)
            --j;
        else
            break;
    }
    atm_start_ = (j == n) ? grid_r_.back() : grid_r_[j];

    std::vector<double> rhat(n), lnrho(n);
    for (std::size_t i = 0; i < n; ++i) {
        rhat[i] = grid_r_[i] / R_sun_;
        lnrho[i] = std::log(rho_[i]);
    }
    c_spline_ = CubicSpline(rhat, c_);
    lnrho_spline_ = CubicSpline(rhat, lnrho);
    gamma_spline_ = CubicSpline(rhat, gamma_);
}

double SolarModel::c_at(double r) const {
    if (r >= R_a()) return c0_;
    return c_spline_.eval(std::max(r / R_sun_, c_spline_.x_min()));
}

double SolarModel::rho_at(double r) const {
    if (r >= atm_start_) return atmosphere_rho(r, rho0_, H_, R_a());
    return std::exp(lnrho_spline_.eval(std::max(r / R_sun_, lnrho_spline_.x_min())));
}

double SolarModel::gamma_at(double r) const {
    if (r >= R_a()) return 0.0;
    return gamma_spline_.eval(std::max(r / R_sun_, gamma_spline_.x_min()));
}

SolarModel load_background(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(kMod, "io", "cannot open " + path);
    std::string line;
    long lineno = 0;
    bool header_seen = false;
    double c0 = 0, rho0 = 0, H = 0, h_a = 0, R_sun = 0;
    bool have_const = false;
    std::vector<double> r, c, rho, gamma;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1) {
            if (line.rfind("# heliosolve-model v1", 0) != 0)
                throw Error(kMod, "parse", "line 1: missing '# heliosolve-model v1' header");
            header_seen = true;
            continue;
        }
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ss(line);
            std::string hash, tag;
            ss >> hash >> tag;
            if (tag == "atmosphere") {
                std::string kv;
                while (ss >> kv) {
                    const auto eq = kv.find('=');
                    if (eq == std::string::npos) continue;
                    const std::string key = kv.substr(0, eq);
                    const double val = std::strtod(kv.c_str() + eq + 1, nullptr);
                    if (key == "c0") c0 = val;
                    else if (key == "rho0") rho0 = val;
                    else if (key == "H") H = val;
                    else if (key == "h_a") h_a = val;
                    else if (key == "R_sun") R_sun = val;
                    else
                        throw Error(kMod, "parse", "line " + std::to_string(lineno) +
                                                       ": unknown atmosphere key " + key);
                }
                have_const = true;
            }
            continue;
        }
        std::istringstream ss(line);
        double rv, cv, rhov, gv;
        if (!(ss >> rv >> cv >> rhov >> gv))
            throw Error(kMod, "parse",
                        "line " + std::to_string(lineno) + ": expected 4 numeric columns");
        std::string extra;
        if (ss >> extra)
            throw Error(kMod, "parse", "line " + std::to_string(lineno) + ": trailing fields");
        r.push_back(rv);
        c.push_back(cv);
        rho.push_back(rhov);
        gamma.push_back(gv);
    }
    if (!header_seen) throw Error(kMod, "parse", "empty file");
    if (!have_const)
        throw Error(kMod, "parse",
                    "missing '# atmosphere c0=... rho0=... H=... h_a=... R_sun=...' line");
    return SolarModel(std::move(r), std::move(c), std::move(rho), std::move(gamma), c0, rho0, H,
                      h_a, R_sun);
}

void save_background(const SolarModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(kMod, "io", "cannot write " + path);
    char buf[512];
    out << "# heliosolve-model v1\n";
    std::snprintf(buf, sizeof buf,
                  "# atmosphere c0=%.17g rho0=%.17g H=%.17g h_a=%.17g R_sun=%.17g\n", m.c0(),
                  m.rho0(), m.H(), m.h_a(), m.R_sun());
    out << buf;
    out << "# columns: r_meters c_m_per_s rho_kg_per_m3 gamma_rad_per_s\n";
    for (std::size_t i = 0; i < m.grid_r().size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g\n", m.grid_r()[i], m.c()[i],
                      m.rho()[i], m.gamma()[i]);
        out << buf;
    }
    if (!out) throw Error(kMod, "io", "write failed for " + path);
}

double wavenumber(const SolarModel& model, double omega) {
    const double cut = model.cutoff_omega();
    if (!(omega > cut))
        throw Error(kMod, "below-cutoff",
                    "omega=" + std::to_string(omega) + " <= c0/(2H)=" + std::to_string(cut));
    const double k2 =
        omega * omega / (model.c0() * model.c0()) - 1.0 / (4.0 * model.H() * model.H());
    return std::sqrt(k2);
}

PotentialProfile::PotentialProfile(const SolarModel& model, double omega)
    : omega_(omega),
      k_(wavenumber(model, omega)),
      alpha_(1.0 / model.H()),
      ra_hat_(model.R_a() / model.R_sun()),
      r_unit_(model.R_sun()),
      atm_start_hat_(model.atm_start() / model.R_sun()) {
    UTables t = build_utables(model);
    grid_min_hat_ = t.grid_hat.front();
    u1h_ = CubicSpline(t.grid_hat, t.u1h);
    u2h_ = CubicSpline(t.grid_hat, t.u2h);
    u3h_ = CubicSpline(t.grid_hat, t.u3h);
    finish();
}

PotentialProfile::PotentialProfile(const SolarModel& background, double omega,
                                   const std::vector<double>& grid_hat,
                                   const std::vector<double>& u1h, const std::vector<double>& u2h,
                                   const std::vector<double>& u3h)
    : omega_(omega),
      k_(wavenumber(background, omega)),
      alpha_(1.0 / background.H()),
      ra_hat_(background.R_a() / background.R_sun()),
      r_unit_(background.R_sun()),
      atm_start_hat_(background.atm_start() / background.R_sun()),
      grid_min_hat_(grid_hat.front()),
      u1h_(grid_hat, u1h),
      u2h_(grid_hat, u2h),
      u3h_(grid_hat, u3h) {
    finish();
}

PotentialProfile::PotentialProfile(double omega, double k_si, double alpha_si, double ra_hat,
                                   double r_unit, const std::vector<double>& grid_hat,
                                   const std::vector<double>& u1h, const std::vector<double>& u2h,
                                   const std::vector<double>& u3h, double atm_start_hat)
    : omega_(omega),
      k_(k_si),
      alpha_(alpha_si),
      ra_hat_(ra_hat),
      r_unit_(r_unit),
      atm_start_hat_(atm_start_hat),
      grid_min_hat_(grid_hat.front()),
      u1h_(grid_hat, u1h),
      u2h_(grid_hat, u2h),
      u3h_(grid_hat, u3h) {
    if (!(k_ > 0.0)) throw Error(kMod, "domain", "k must be positive");
    finish();
}

void PotentialProfile::finish() {
    double m = alpha_hat() / ra_hat();
    const double w2 = omega_ * omega_;
    const double step = (atm_start_hat_ - grid_min_hat_) / 512.0;
    for (double r = grid_min_hat_; r < atm_start_hat_; r += step) {
        const std::complex<double> v(w2 * u1h_.eval(r) + u2h_.eval(r),
                                     -2.0 * omega_ * u3h_.eval(r));
        m = std::max(m, std::abs(v));
    }
    max_abs_v_hat_ = m;
}

std::complex<double> PotentialProfile::v_hat(double r_hat) const {
    EvalHint hint;
    return v_hat(r_hat, hint);
}

std::complex<double> PotentialProfile::v_hat(double r_hat, EvalHint& hint) const {
    if (r_hat >= ra_hat_) return {alpha_hat() / r_hat, 0.0};
    const double r = std::max(r_hat, grid_min_hat_);
    const double u1 = u1h_.eval(r, &hint.h1);
    const double u3 = u3h_.eval(r, &hint.h3);
    const double u2 = (r >= atm_start_hat_) ? alpha_hat() / r : u2h_.eval(r, &hint.h2);
    return {omega_ * omega_ * u1 + u2, -2.0 * omega_ * u3};
}

PotentialProfile potential_from_model(const SolarModel& model, double omega) {
    return PotentialProfile(model, omega);
}

InversionUnknowns unknowns_from_model(const SolarModel& model, const SolarModel& background,
                                      double A1, double A2, int n_grid) {
    if (!(A1 > 0.0 && A2 > A1 && A2 <= model.R_sun()))
        throw Error(kMod, "domain", "require 0 < A1 < A2 <= R_sun");
    if (n_grid < 4) throw Error(kMod, "domain", "n_grid >= 4 required");

    auto check_outside = [&](const std::vector<double>& grid) {
        for (double r : grid) {
            if (r > A1 - 1e-9 * model.R_sun() && r < A2 + 1e-9 * model.R_sun()) continue;
            if (r > model.R_a()) continue;
            const double cb = background.c_at(r), cm = model.c_at(r);
            const double rb = background.rho_at(r), rm = model.rho_at(r);
            const double gb = background.gamma_at(r), gm = model.gamma_at(r);
            if (std::fabs(cm - cb) > 1e-10 * cb || std::fabs(rm - rb) > 1e-10 * rb ||
                std::fabs(gm - gb) > 1e-10 * (std::fabs(gb) + 1e-12))
                throw Error(kMod, "support-violation",
                            "model differs from background outside [A1,A2] at r=" +
                                std::to_string(r));
        }
    };
    check_outside(model.grid_r());
    check_outside(background.grid_r());

    UTables t = build_utables(model);
    CubicSpline s1(t.grid_hat, t.u1h), s2(t.grid_hat, t.u2h), s3(t.grid_hat, t.u3h);
    const double R = model.R_sun(), R2 = R * R;
    InversionUnknowns u;
    u.A1 = A1;
    u.A2 = A2;
    u.grid.resize(n_grid);
    u.u1.resize(n_grid);
    u.u2.resize(n_grid);
    u.u3.resize(n_grid);
    for (int i = 0; i < n_grid; ++i) {
        const double r = A1 + (A2 - A1) * double(i) / double(n_grid - 1);
        u.grid[i] = r;
        u.u1[i] = s1.eval(r / R) / R2;
        u.u2[i] = s2.eval(r / R) / R2;
        u.u3[i] = s3.eval(r / R) / R2;
    }
    return u;
}

PotentialProfile potential_from_unknowns(const SolarModel& background, const InversionUnknowns& u,
                                         double omega) {
    if (u.grid.size() < 2 || u.grid.size() != u.u1.size() || u.grid.size() != u.u2.size() ||
        u.grid.size() != u.u3.size())
        throw Error(kMod, "domain", "inconsistent unknown arrays");
    UTables t = build_utables(background);
    const double R = background.R_sun(), R2 = R * R;
    const double a1 = u.A1 / R, a2 = u.A2 / R;
    std::vector<double> g, u1, u2, u3;
    for (std::size_t i = 0; i < t.grid_hat.size() && t.grid_hat[i] < a1; ++i) {
        g.push_back(t.grid_hat[i]);
        u1.push_back(t.u1h[i]);
        u2.push_back(t.u2h[i]);
        u3.push_back(t.u3h[i]);
    }
    for (std::size_t i = 0; i < u.grid.size(); ++i) {
        const double r = u.grid[i] / R;
        if (!g.empty() && r <= g.back() * (1.0 + 1e-15)) continue;
        g.push_back(r);
        u1.push_back(u.u1[i] * R2);
        u2.push_back(u.u2[i] * R2);
        u3.push_back(u.u3[i] * R2);
    }
    for (std::size_t i = 0; i < t.grid_hat.size(); ++i) {
        if (t.grid_hat[i] <= a2) continue;
        g.push_back(t.grid_hat[i]);
        u1.push_back(t.u1h[i]);
        u2.push_back(t.u2h[i]);
        u3.push_back(t.u3h[i]);
    }
    return PotentialProfile(background, omega, g, u1, u2, u3);
}

// ---- synthetic backgrounds ---------------------------------------------

namespace {
double smootherstep(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}
}  // namespace

SolarModel make_background(const BackgroundSpec& s) {
    const double Ra = s.R_sun + s.h_a;
    const double xt = s.transition_depth / s.R_sun;
    const double m_surf = s.R_sun / s.H;
    const double m_deep = s.lnrho_deep_slope;
    const double lnrho_surf = std::log(s.rho0) + s.h_a / s.H;

    auto lnrho_interior = [&](double x) {
        const double T = std::min(x / xt, 1.0);
        const double Q = (T >= 1.0) ? 0.5 : T - T * T * T * T * (2.5 + T * (-3.0 + T));
        return lnrho_surf + m_deep * x + (m_surf - m_deep) * xt * Q;
    };
    auto c_interior = [&](double x) {
        return s.c0 * (1.0 + s.c_rise * x * x * (3.0 - 2.0 * x));
    };

    std::vector<double> rh;
    auto seg = [&rh](double a, double b, int n, bool include_a) {
        for (int i = include_a ? 0 : 1; i <= n; ++i) rh.push_back(a + (b - a) * double(i) / n);
    };
    const double x2 = std::max(2.0 * xt, 0.004);
    const double b1 = std::min(0.85, 1.0 - 3.0 * x2);
    const double b2 = std::min(0.97, 1.0 - 1.5 * x2);
    seg(s.r_min_frac, b1, 170, true);
    seg(b1, b2, 110, false);
    seg(b2, 1.0 - x2, 48, false);
    seg(1.0 - x2, 1.0, 90, false);
    const double top_hat = (Ra + 10.0 * s.H) / s.R_sun;
    seg(1.0, top_hat, 72, false);

    std::vector<double> r(rh.size()), c(rh.size()), rho(rh.size()), gam(rh.size());
    for (std::size_t i = 0; i < rh.size(); ++i) {
        const double rm = rh[i] * s.R_sun;
        r[i] = rm;
        if (rm >= s.R_sun) {
            c[i] = s.c0;
            rho[i] = atmosphere_rho(rm, s.rho0, s.H, Ra);
            gam[i] = s.gamma0 * (1.0 - smootherstep((rm - s.R_sun) / s.gamma_decay));
        } else {
            const double x = 1.0 - rh[i];
            c[i] = c_interior(x);
            rho[i] = std::exp(lnrho_interior(x));
            gam[i] = s.gamma0;
        }
    }
    return SolarModel(std::move(r), std::move(c), std::move(rho), std::move(gam), s.c0, s.rho0,
                      s.H, s.h_a, s.R_sun);
}

BackgroundSpec paper_background() { return BackgroundSpec{}; }

BackgroundSpec mini_background() {
    BackgroundSpec s;
    s.R_sun = 3.6276e7;  // kappa = k*R_sun ~ 100 at 5.3 mHz
    return s;
}

}  // namespace heliosolve::solar
