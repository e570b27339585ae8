#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "heliosolve/errors.hpp"

namespace heliosolve {

struct GaussLegendre {
    std::vector<double> nodes;    // ascending in (-1, 1)
    std::vector<double> weights;
};

// Nodes/weights on (-1,1) by Newton iteration on the Legendre recurrence.
inline GaussLegendre gauss_legendre(std::size_t n) {
    if (n == 0) throw domain_error("quadrature", "gauss_legendre needs n >= 1");
    GaussLegendre gl;
    gl.nodes.resize(n);
    gl.weights.resize(n);
    const std::size_t m = (n + 1) / 2;
    for (std::size_t k = 0; k < m; ++k) {
        double x = std::cos(M_PI * (double(n - k) - 0.25) / (double(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (std::size_t j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / double(j);
                p0 = p1;
                p1 = p2;
            }
            dp = double(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        gl.nodes[k] = x;
        gl.nodes[n - 1 - k] = -x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        gl.weights[k] = w;
        gl.weights[n - 1 - k] = w;
    }
    // cos(pi*(n-k-0.25)/(n+0.5)) starts near -1 for k=0; flip to ascending.
    if (n > 1 && gl.nodes.front() > gl.nodes.back()) {
        std::reverse(gl.nodes.begin(), gl.nodes.end());
        std::reverse(gl.weights.begin(), gl.weights.end());
    }
    return gl;
}

inline double trapezoid(std::span<const double> x, std::span<const double> f) {
    if (x.size() != f.size() || x.size() < 2)
        throw domain_error("quadrature", "trapezoid needs matching sizes >= 2");
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i)
        s += 0.5 * (f[i] + f[i - 1]) * (x[i] - x[i - 1]);
    return s;
}

}  // namespace heliosolve
