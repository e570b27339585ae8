#include "heliosolve/multipole.hpp"

#include <cmath>
#include <complex>

#include "doctest.h"
#include "heliosolve/errors.hpp"
#include "heliosolve/radial.hpp"
#include "heliosolve/solar_model.hpp"
#include "heliosolve/specfun.hpp"
#include "model_helpers.hpp"

using namespace heliosolve;
using namespace heliosolve::multipole;
using cplx = std::complex<double>;

namespace {

// free-field diagonal G_l(R,R) = F_l(0,kR) H_l^+(0,kR)/k, in meters
PartialWaveDiagonal free_diag(double k, double R, int l_max) {
    PartialWaveDiagonal d;
    d.R = R;
    d.values.resize(l_max + 1);
    const auto sweep = specfun::coulomb_sweep(l_max, 0.0, k * R);
    for (int l = 0; l <= l_max; ++l) {
        const auto& s = sweep[l];
        const double fg = s.fhat * s.ghat;
        const double ff = s.fhat * s.fhat * std::exp(-2.0 * s.exponent);
        d.values[l] = cplx(fg, ff) / k;
    }
    return d;
}

}  // namespace

TEST_CASE("free-field assembly matches e^{ikd}/(4 pi d)") {
    const double k = 1.0, R = 50.0;
    const auto diag = free_diag(k, R, 200);
    const TailModel tail{k, 0.0};
    std::vector<double> thetas{0.1, 0.6, M_PI / 2.0, 2.5, M_PI - 0.1};
    const auto samples = assemble_circle(diag, thetas, tail);
    for (std::size_t j = 0; j < thetas.size(); ++j) {
        const double d = R * std::sqrt(2.0 - 2.0 * std::cos(thetas[j]));
        const cplx expect = std::exp(cplx(0.0, k * d)) / (4.0 * M_PI * d);
        CAPTURE(thetas[j]);
        CHECK(std::abs(samples.values[j] - expect) <= 1e-6 * std::abs(expect));
    }
    CHECK(samples.tail_warnings == 0);
}

TEST_CASE("single extra mode plus analytic tail") {
    // values = kernel-sum of R/(2l+1) everywhere except one unit bump at l=0
    const double k = 1.0, R = 10.0;
    PartialWaveDiagonal diag;
    diag.R = R;
    diag.values = {cplx(R, 0.0) + cplx(1.0, 0.0)};  // G_0 = R + 1
    const TailModel tail{k, 0.0};
    std::vector<double> thetas{0.7, 1.9};
    // assemble with an l_tail long enough that the free tail is converged,
    // then check value = bump/(4 pi R^2) + free-field value with G_0 = R
    const auto with_bump = assemble_circle(diag, thetas, tail);
    PartialWaveDiagonal base;
    base.R = R;
    base.values = {cplx(R, 0.0)};
    const auto base_s = assemble_circle(base, thetas, tail);
    for (std::size_t j = 0; j < thetas.size(); ++j) {
        const cplx got = with_bump.values[j] - base_s.values[j];
        const cplx expect = 1.0 / (4.0 * M_PI * R * R);  // (2*0+1)*1*P_0/(4 pi R^2)
        CHECK(std::abs(got - expect) < 1e-12);
    }
}

TEST_CASE("truncation convergence at theta = pi/2") {
    const double k = 1.0, R = 50.0;
    const TailModel tail{k, 0.0};
    std::vector<double> thetas{M_PI / 2.0};
    const auto a = assemble_circle(free_diag(k, R, 250), thetas, tail);
    const auto b = assemble_circle(free_diag(k, R, 400), thetas, tail);
    CHECK(std::abs(a.values[0] - b.values[0]) < 1e-6 * std::abs(b.values[0]));
}

TEST_CASE("free-field extraction matches the closed-form diagonal") {
    const double k = 1.0, R = 50.0;
    const int L = 120;
    const TailModel tail{k, 0.0};
    const int n = 2 * L + 40;
    const auto thetas = extraction_thetas(n);
    CircleSamples s;
    s.R = R;
    s.thetas = thetas;
    s.values.resize(n);
    for (int j = 0; j < n; ++j) {
        const double d = R * std::sqrt(2.0 - 2.0 * std::cos(thetas[j]));
        s.values[j] = std::exp(cplx(0.0, k * d)) / (4.0 * M_PI * d);
    }
    const auto got = extract_partial_waves(s, L, tail);
    const auto expect = free_diag(k, R, L);
    for (int l = 0; l <= L; ++l) {
        CAPTURE(l);
        CHECK(std::abs(got.values[l] - expect.values[l]) <= 1e-7 * std::abs(expect.values[l]));
    }
}

TEST_CASE("round trip on the mini background at an observation radius") {
    const solar::SolarModel m = solar::make_background(solar::mini_background());
    const auto pot = solar::potential_from_model(m, 2.0 * M_PI * 5.3e-3);
    const double r_obs_hat = 1.0 + 105e3 / m.R_sun();
    const int L = 60;
    PartialWaveDiagonal diag;
    diag.R = r_obs_hat * m.R_sun();
    diag.values.resize(L + 1);
    for (int l = 0; l <= L; ++l) {
        const auto d = radial::greens_diagonal(pot, l, std::vector<double>{r_obs_hat});
        diag.values[l] = d.g_diag_hat[0] * m.R_sun();
    }
    const TailModel tail{pot.k(), pot.alpha()};
    const int n = 2 * L + 32;
    const auto thetas = extraction_thetas(n);
    const auto samples = assemble_circle(diag, thetas, tail);
    const auto back = extract_partial_waves(samples, L, tail);
    for (int l = 0; l <= L; ++l) {
        CAPTURE(l);
        CHECK(std::abs(back.values[l] - diag.values[l]) <= 1e-8 * std::abs(diag.values[l]));
    }

    // quadrature stability under node doubling
    const auto thetas2 = extraction_thetas(2 * n);
    const auto samples2 = assemble_circle(diag, thetas2, tail);
    const auto back2 = extract_partial_waves(samples2, L, tail);
    for (int l = 0; l <= L; l += 10)
        CHECK(std::abs(back2.values[l] - back.values[l]) <= 1e-8 * std::abs(back.values[l]));
}

TEST_CASE("error paths") {
    const double k = 1.0, R = 10.0;
    const TailModel tail{k, 0.0};
    const auto diag = free_diag(k, R, 5);
    CHECK_THROWS_WITH_AS((void)assemble_circle(diag, std::vector<double>{1e-5}, tail),
                         doctest::Contains("theta-band"), Error);
    CircleSamples s;
    s.R = R;
    s.thetas = extraction_thetas(16);
    s.values.assign(16, cplx(0.0, 0.0));
    CHECK_THROWS_WITH_AS((void)extract_partial_waves(s, 10, tail), doctest::Contains("aliasing"),
                         Error);
    // off-node samples rejected
    CircleSamples s2;
    s2.R = R;
    s2.thetas.resize(52);
    for (int j = 0; j < 52; ++j) s2.thetas[j] = 0.05 + (M_PI - 0.1) * j / 51.0;
    s2.values.assign(52, cplx(0.0, 0.0));
    CHECK_THROWS_WITH_AS((void)extract_partial_waves(s2, 10, tail), doctest::Contains("Gauss"),
                         Error);
}
