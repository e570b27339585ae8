#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "heliosolve/errors.hpp"

namespace heliosolve {

// Interpolating cubic spline with not-a-knot ends (natural ends for
// very short tables). Stores nodal second derivatives; evaluation is
// O(log n), or O(1) with a caller-kept interval hint.
class CubicSpline {
public:
    CubicSpline() = default;

    CubicSpline(std::span<const double> x, std::span<const double> y) {
        const std::size_t n = x.size();
        if (n != y.size() || n < 2)
            throw domain_error("spline", "need >= 2 nodes with matching sizes");
        for (std::size_t i = 1; i < n; ++i)
            if (!(x[i] > x[i - 1]))
                throw domain_error("spline", "abscissae must be strictly increasing");
        x_.assign(x.begin(), x.end());
        y_.assign(y.begin(), y.end());
        m_.assign(n, 0.0);
        if (n == 2) return;  // linear

        auto h = [&](std::size_t i) { return x_[i + 1] - x_[i]; };
        auto rhs = [&](std::size_t i) {
            return (y_[i + 1] - y_[i]) / h(i) - (y_[i] - y_[i - 1]) / h(i - 1);
        };
        if (n == 3) {  // natural ends, single interior unknown
            m_[1] = rhs(1) / ((h(0) + h(1)) / 3.0);
            return;
        }

        // Not-a-knot: eliminate m_0 and m_{n-1} through the third-derivative
        // continuity conditions, leaving a tridiagonal system for the
        // interior second derivatives.
        const std::size_t m = n - 2;
        std::vector<double> a(m), b(m), c(m), d(m);
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t i = j + 1;
            a[j] = h(i - 1) / 6.0;
            b[j] = (h(i - 1) + h(i)) / 3.0;
            c[j] = h(i) / 6.0;
            d[j] = rhs(i);
        }
        // m_0 = ((h0+h1) m_1 - h0 m_2)/h1
        b[0] += a[0] * (h(0) + h(1)) / h(1);
        c[0] -= a[0] * h(0) / h(1);
        // m_{n-1} = ((h_{n-2}+h_{n-3}) m_{n-2} - h_{n-2} m_{n-3})/h_{n-3}
        b[m - 1] += c[m - 1] * (h(n - 2) + h(n - 3)) / h(n - 3);
        a[m - 1] -= c[m - 1] * h(n - 2) / h(n - 3);

        for (std::size_t j = 1; j < m; ++j) {
            const double w = a[j] / b[j - 1];
            b[j] -= w * c[j - 1];
            d[j] -= w * d[j - 1];
        }
        m_[m] = d[m - 1] / b[m - 1];
        for (std::size_t j = m - 1; j-- > 0;)
            m_[j + 1] = (d[j] - c[j] * m_[j + 2]) / b[j];
        m_[0] = ((h(0) + h(1)) * m_[1] - h(0) * m_[2]) / h(1);
        m_[n - 1] = ((h(n - 2) + h(n - 3)) * m_[n - 2] - h(n - 2) * m_[n - 3]) / h(n - 3);
    }

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

    // Value; `hint` caches the interval index across monotone sweeps.
    double eval(double x, std::size_t* hint = nullptr) const {
        const std::size_t i = interval(x, hint);
        double t, u, h;
        split(x, i, t, u, h);
        return t * y_[i + 1] + u * y_[i] +
               ((t * t * t - t) * m_[i + 1] + (u * u * u - u) * m_[i]) * h * h / 6.0;
    }

    double deriv(double x, std::size_t* hint = nullptr) const {
        const std::size_t i = interval(x, hint);
        double t, u, h;
        split(x, i, t, u, h);
        return (y_[i + 1] - y_[i]) / h +
               ((3 * t * t - 1) * m_[i + 1] - (3 * u * u - 1) * m_[i]) * h / 6.0;
    }

    double deriv2(double x, std::size_t* hint = nullptr) const {
        const std::size_t i = interval(x, hint);
        double t, u, h;
        split(x, i, t, u, h);
        return t * m_[i + 1] + u * m_[i];
    }

    std::size_t size() const { return x_.size(); }

private:
    std::size_t interval(double x, std::size_t* hint) const {
        const std::size_t n = x_.size();
        if (hint && *hint + 1 < n && x >= x_[*hint] && x <= x_[*hint + 1]) return *hint;
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t i = (it == x_.begin()) ? 0 : std::size_t(it - x_.begin()) - 1;
        i = std::min(i, n - 2);
        if (hint) *hint = i;
        return i;
    }
    void split(double x, std::size_t i, double& t, double& u, double& h) const {
        h = x_[i + 1] - x_[i];
        t = (x - x_[i]) / h;
        u = 1.0 - t;
    }

    std::vector<double> x_, y_, m_;
};

}  // namespace heliosolve
