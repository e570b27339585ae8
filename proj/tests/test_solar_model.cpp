#include "heliosolve/solar_model.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "heliosolve/errors.hpp"
#include "model_helpers.hpp"

using namespace heliosolve;
using namespace heliosolve::solar;

namespace {

// all-atmosphere table: c = c0, rho = rho0*exp(-(r-R_a)/H) down to r_lo
SolarModel all_atmosphere_model(double r_lo_frac = 0.9) {
    BackgroundSpec s;
    const double Ra = s.R_sun + s.h_a;
    std::vector<double> r, c, rho, gam;
    for (int i = 0; i <= 400; ++i) {
        const double rv = (r_lo_frac + (1.02 - r_lo_frac) * i / 400.0) * s.R_sun;
        r.push_back(rv);
        c.push_back(s.c0);
        rho.push_back(s.rho0 * std::exp(-(rv - Ra) / s.H));
        gam.push_back(0.0);
    }
    return SolarModel(r, c, rho, gam, s.c0, s.rho0, s.H, s.h_a, s.R_sun);
}

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("minimal 3-line constant-atmosphere table is a valid model") {
    BackgroundSpec s;
    const double Ra = s.R_sun + s.h_a;
    std::vector<double> r{0.9 * s.R_sun, s.R_sun, 1.01 * Ra};
    std::vector<double> c{s.c0, s.c0, s.c0};
    std::vector<double> rho;
    for (double rv : r) rho.push_back(s.rho0 * std::exp(-(rv - Ra) / s.H));
    std::vector<double> g{0.0, 0.0, 0.0};
    SolarModel m(r, c, rho, g, s.c0, s.rho0, s.H, s.h_a, s.R_sun);
    CHECK(m.R_a() == Ra);
    CHECK(m.atm_start() == doctest::Approx(r[0]));
}

TEST_CASE("density discontinuity at R_a rejected") {
    BackgroundSpec s;
    const double Ra = s.R_sun + s.h_a;
    std::vector<double> r{0.9 * s.R_sun, s.R_sun, 1.01 * Ra};
    std::vector<double> c{s.c0, s.c0, s.c0};
    std::vector<double> rho;
    for (double rv : r) rho.push_back(1.05 * s.rho0 * std::exp(-(rv - Ra) / s.H));
    std::vector<double> g{0.0, 0.0, 0.0};
    CHECK_THROWS_WITH_AS(SolarModel(r, c, rho, g, s.c0, s.rho0, s.H, s.h_a, s.R_sun),
                         doctest::Contains("deviates from rho0"), Error);
}

TEST_CASE("save/load round trip is bit identical") {
    const SolarModel m = make_background(paper_background());
    const auto p1 = temp_path("hs_model_a.txt"), p2 = temp_path("hs_model_b.txt");
    save_background(m, p1);
    const SolarModel m2 = load_background(p1);
    save_background(m2, p2);
    std::ifstream f1(p1), f2(p2);
    std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(s1 == s2);
    CHECK(s1.size() > 1000);
    CHECK(m2.c0() == m.c0());
    CHECK(m2.rho0() == m.rho0());
    CHECK(m2.H() == m.H());
    CHECK(m2.grid_r() == m.grid_r());
    CHECK(m2.rho() == m.rho());
}

TEST_CASE("load_background rejects malformed input") {
    const auto p = temp_path("hs_model_bad.txt");
    {
        std::ofstream f(p);
        f << "# heliosolve-model v1\n# atmosphere c0=6855 rho0=2.886e-6 H=1.25e5 h_a=5e5 "
             "R_sun=6.957e8\n1e8 6855 bad 0\n";
    }
    CHECK_THROWS_WITH_AS((void)load_background(p), doctest::Contains("line 3"), Error);
    {
        std::ofstream f(p);
        f << "not a header\n";
    }
    CHECK_THROWS_WITH_AS((void)load_background(p), doctest::Contains("line 1"), Error);
}

TEST_CASE("wavenumber at the tabulated atmosphere") {
    const SolarModel m = make_background(paper_background());
    // independent recomputation: k = sqrt(omega^2/c0^2 - 1/(4H^2))
    const double k53 = wavenumber(m, 2.0 * M_PI * 5.3e-3);
    CHECK(k53 == doctest::Approx(2.7566575234453805e-06).epsilon(1e-13));
    const double k54 = wavenumber(m, 2.0 * M_PI * 5.4e-3);
    CHECK(k54 == doctest::Approx(2.9151494533333303e-06).epsilon(1e-13));
    CHECK(k54 > k53);
    CHECK(m.cutoff_omega() == doctest::Approx(0.02742));
    CHECK_THROWS_WITH_AS((void)wavenumber(m, m.cutoff_omega()), doctest::Contains("below-cutoff"),
                         Error);
}

TEST_CASE("all-atmosphere model gives v = 1/(H r) exactly") {
    const SolarModel m = all_atmosphere_model();
    const double om = 2.0 * M_PI * 5.3e-3;
    const PotentialProfile pot = potential_from_model(m, om);
    CHECK(pot.alpha() == doctest::Approx(8e-6).epsilon(1e-12));  // 1/H
    const double ah = pot.alpha_hat();
    for (double rh : {0.91, 0.95, 0.99, 1.0, pot.ra_hat(), 1.3}) {
        const auto v = pot.v_hat(rh);
        CHECK(std::fabs(v.real() - ah / rh) <= 1e-8 * std::fabs(ah / rh));
        CHECK(v.imag() == 0.0);
    }
}

TEST_CASE("potential against the analytic profile formulas in the deep interior") {
    // Below the slope-transition layer the generated background has
    // d(lnrho)/dr_hat = -m_deep exactly and c = c0(1 + c_rise x^2(3-2x)),
    // so v_hat has a closed form there: for rho = e^g the density term is
    // g'^2/4 - g''/2 - g'/r - alpha_hat^2/4.
    const BackgroundSpec s = paper_background();
    const SolarModel m = make_background(s);
    const double om = 2.0 * M_PI * 5.3e-3;
    const PotentialProfile pot = potential_from_model(m, om);
    const double ah = m.R_sun() / s.H;
    const double R2 = m.R_sun() * m.R_sun();
    for (double rh : {0.3, 0.6, 0.925}) {
        const double gp = -s.lnrho_deep_slope;
        const double u2 = gp * gp / 4.0 - gp / rh - ah * ah / 4.0;
        const double x = 1.0 - rh;
        const double c = s.c0 * (1.0 + s.c_rise * x * x * (3.0 - 2.0 * x));
        const double u1 = R2 * (1.0 / (s.c0 * s.c0) - 1.0 / (c * c));
        const double gamma = s.gamma0;
        const double oracle_re = om * om * u1 + u2;
        const double oracle_im = -2.0 * om * R2 * gamma / (c * c);
        const auto v = pot.v_hat(rh);
        CHECK(v.real() == doctest::Approx(oracle_re).epsilon(1e-6));
        CHECK(v.imag() == doctest::Approx(oracle_im).epsilon(1e-6));
    }
}

TEST_CASE("attenuation shifts Im v by -2 omega gamma / c^2") {
    BackgroundSpec with_g = paper_background();
    BackgroundSpec no_g = with_g;
    no_g.gamma0 = 0.0;
    const SolarModel m1 = make_background(with_g);
    const SolarModel m0 = make_background(no_g);
    const double om = 2.0 * M_PI * 5.3e-3;
    const PotentialProfile p1 = potential_from_model(m1, om);
    const PotentialProfile p0 = potential_from_model(m0, om);
    for (double rh : {0.5, 0.8, 0.95}) {
        const double c = m1.c_at(rh * m1.R_sun());
        const double expected = -2.0 * om * with_g.gamma0 / (c * c) * m1.R_sun() * m1.R_sun();
        CHECK(p1.v_hat(rh).imag() == doctest::Approx(expected).epsilon(1e-6));
        CHECK(p0.v_hat(rh).imag() == 0.0);
        CHECK(p1.v_hat(rh).real() == doctest::Approx(p0.v_hat(rh).real()).epsilon(1e-12));
    }
    // Im v <= 0 wherever gamma >= 0
    for (double rh = 0.1; rh < 1.3; rh += 0.01) CHECK(p1.v_hat(rh).imag() <= 0.0);
}

TEST_CASE("potential matches alpha/R_a at the interface") {
    const SolarModel m = make_background(paper_background());
    const PotentialProfile pot = potential_from_model(m, 2.0 * M_PI * 5.3e-3);
    const double ra = pot.ra_hat();
    const double target = pot.alpha_hat() / ra;
    CHECK(std::fabs(pot.v_hat(ra * (1.0 - 1e-9)).real() - target) < 1e-6 * target);
    // atmospheric tail is alpha/r by construction
    for (double rh = ra; rh < 2.0 * ra; rh += 0.01)
        CHECK(pot.v_hat(rh) == std::complex<double>(pot.alpha_hat() / rh, 0.0));
}

TEST_CASE("unknowns_from_model") {
    const SolarModel bg = make_background(mini_background());
    const double A1 = 0.88 * bg.R_sun(), A2 = 0.97 * bg.R_sun();

    SUBCASE("zero perturbation") {
        const auto u0 = unknowns_from_model(bg, bg, A1, A2, 40);
        const auto ub = unknowns_from_model(bg, bg, A1, A2, 40);
        for (int i = 0; i < 40; ++i) {
            CHECK(u0.u1[i] == ub.u1[i]);
            CHECK(u0.u2[i] == ub.u2[i]);
            CHECK(u0.u3[i] == ub.u3[i]);
        }
    }

    SUBCASE("c perturbation changes only u1 (gamma-free background)") {
        BackgroundSpec spec0 = mini_background();
        spec0.gamma0 = 0.0;
        const SolarModel bg0 = make_background(spec0);
        testutil::Perturbation p;
        p.dc_rel = 0.01;
        const SolarModel m = testutil::make_perturbed(bg0, p);
        const auto u = unknowns_from_model(m, bg0, A1, A2, 60);
        const auto u0 = unknowns_from_model(bg0, bg0, A1, A2, 60);
        double du1 = 0, du2 = 0, du3 = 0, s1 = 0;
        for (int i = 0; i < 60; ++i) {
            du1 = std::max(du1, std::fabs(u.u1[i] - u0.u1[i]));
            du2 = std::max(du2, std::fabs(u.u2[i] - u0.u2[i]));
            du3 = std::max(du3, std::fabs(u.u3[i] - u0.u3[i]));
            s1 = std::max(s1, std::fabs(u0.u1[i]));
        }
        CHECK(du1 > 1e-4 * s1);
        CHECK(du2 <= 1e-10 * std::fabs(u0.u2[0]));
        CHECK(du3 <= 1e-14);
    }

    SUBCASE("gamma bump lands in u3 = gamma/c^2 pointwise") {
        testutil::Perturbation p;
        p.dgamma_abs = 2.0 * M_PI * 20e-6;
        const SolarModel m = testutil::make_perturbed(bg, p);
        const auto u = unknowns_from_model(m, bg, A1, A2, 80);
        for (int i = 0; i < 80; ++i) {
            const double r = u.grid[i];
            const double oracle = m.gamma_at(r) / (m.c_at(r) * m.c_at(r));
            CHECK(u.u3[i] == doctest::Approx(oracle).epsilon(1e-8));
        }
    }

    SUBCASE("support violation detected") {
        testutil::Perturbation p;
        p.dc_rel = 0.01;
        const SolarModel m = testutil::make_perturbed(bg, p);
        CHECK_THROWS_WITH_AS(
            (void)unknowns_from_model(m, bg, 0.93 * bg.R_sun(), 0.97 * bg.R_sun(), 40),
            doctest::Contains("support-violation"), Error);
    }

    SUBCASE("u1 stays below 1/c0^2") {
        const auto u = unknowns_from_model(bg, bg, A1, A2, 40);
        for (double v : u.u1) CHECK(v < 1.0 / (bg.c0() * bg.c0()));
    }
}

TEST_CASE("decomposition consistency across frequencies") {
    const SolarModel bg = make_background(mini_background());
    const auto u = unknowns_from_model(bg, bg, 0.3 * bg.R_sun(), 0.9 * bg.R_sun(), 200);
    for (double nu : {5.3e-3, 5.4e-3}) {
        const double om = 2.0 * M_PI * nu;
        const PotentialProfile pot = potential_from_model(bg, om);
        const double R2 = bg.R_sun() * bg.R_sun();
        for (int i = 5; i < 200; i += 13) {
            const double rh = u.grid[i] / bg.R_sun();
            const std::complex<double> lhs(om * om * u.u1[i] + u.u2[i], -2.0 * om * u.u3[i]);
            const std::complex<double> rhs = pot.v_hat(rh) / R2;
            CHECK(std::abs(lhs - rhs) <= 1e-8 * std::abs(rhs));
        }
    }
}

TEST_CASE("nondimensionalization round trip") {
    const SolarModel m = make_background(paper_background());
    const PotentialProfile pot = potential_from_model(m, 2.0 * M_PI * 5.3e-3);
    for (double r : {1.0e8, 6.9e8, 7.2e8}) {
        const double back = (r / pot.r_unit()) * pot.r_unit();
        CHECK(std::fabs(back - r) <= 1e-14 * r);
    }
    CHECK(pot.kappa() == doctest::Approx(pot.k() * m.R_sun()).epsilon(1e-15));
}

TEST_CASE("smoothness diagnostic fires on a jagged coarse table") {
    BackgroundSpec s;
    const double Ra = s.R_sun + s.h_a;
    std::vector<double> r, c, rho, gam;
    unsigned seed = 12345;
    for (int i = 0; i <= 120; ++i) {
        const double rh = 0.9 + (1.01 * Ra / s.R_sun - 0.9) * i / 120.0;
        r.push_back(rh * s.R_sun);
        c.push_back(s.c0);
        seed = seed * 1664525u + 1013904223u;
        const double wig = (rh * s.R_sun < s.R_sun) ? 1e-2 * (double(seed % 1000) / 500.0 - 1.0) : 0.0;
        rho.push_back(s.rho0 * std::exp(-(rh * s.R_sun - Ra) / s.H) * (1.0 + wig));
        gam.push_back(0.0);
    }
    SolarModel m(r, c, rho, gam, s.c0, s.rho0, s.H, s.h_a, s.R_sun);
    CHECK_THROWS_WITH_AS((void)potential_from_model(m, 2.0 * M_PI * 5.3e-3),
                         doctest::Contains("smoothness"), Error);
}

TEST_CASE("mini background matches the paper atmosphere scaling") {
    const SolarModel m = make_background(mini_background());
    const PotentialProfile pot = potential_from_model(m, 2.0 * M_PI * 5.3e-3);
    CHECK(pot.kappa() == doctest::Approx(100.0).epsilon(1e-3));
    CHECK(pot.eta() == doctest::Approx(1.4510326241036429).epsilon(1e-12));
}
