#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <cstddef>

namespace pwsavg {

struct QuadratureOptions {
    // Stop doubling once successive composite estimates agree to this.
    double abs_tol = 1e-12;
    // Roundoff floor for integrals of large magnitude; the absolute target
    // is unreachable once |value| * eps exceeds it.
    double rel_floor = 1e-14;
    std::size_t max_panels = 1u << 14;
};

namespace detail {

inline constexpr unsigned kGaussOrder = 20;
using GaussRule = boost::math::quadrature::gauss<double, kGaussOrder>;

}  // namespace detail

// One Gauss-Legendre panel of order 20 on [a, b].
template <class F>
double gauss_panel(F&& f, double a, double b) {
    const auto& x = detail::GaussRule::abscissa();
    const auto& w = detail::GaussRule::weights();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    // Even order: the tabulated abscissae are the positive half only.
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double dx = half * x[k];
        sum += w[k] * (f(mid - dx) + f(mid + dx));
    }
    return sum * half;
}

template <class F>
double gauss_composite(F&& f, double a, double b, std::size_t panels) {
    const double width = (b - a) / static_cast<double>(panels);
    double sum = 0.0;
    double carry = 0.0;  // Kahan compensation
    for (std::size_t p = 0; p < panels; ++p) {
        const double lo = a + width * static_cast<double>(p);
        const double hi = (p + 1 == panels) ? b : a + width * static_cast<double>(p + 1);
        const double y = gauss_panel(f, lo, hi) - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum;
}

// Composite Gauss-Legendre with panel doubling until two successive
// estimates agree. Returns the finer estimate.
template <class F>
double integrate(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
    if (a == b) return 0.0;
    std::size_t panels = 1;
    double previous = gauss_composite(f, a, b, panels);
    while (panels < opts.max_panels) {
        panels *= 2;
        const double current = gauss_composite(f, a, b, panels);
        const double diff = std::abs(current - previous);
        if (diff < opts.abs_tol || diff <= opts.rel_floor * std::abs(current)) return current;
        previous = current;
    }
    return previous;
}

}  // namespace pwsavg
