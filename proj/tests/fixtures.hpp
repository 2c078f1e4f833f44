#pragma once

#include "pwsavg/pwsavg.hpp"

#include <numbers>
#include <random>
#include <vector>

namespace fixtures {

using namespace pwsavg;

inline constexpr double pi = std::numbers::pi;

// h = 0; psi = r (r - z0).
inline PerturbationSpec cone() {
    PerturbationSpec p(2);
    p.set(Side::plus, 0, 1, 0, 0.5);
    p.set(Side::minus, 0, 0, 1, -1.0 / pi);
    return p;
}

// h = cos; psi = r ((r - 3)^2 + z0^2 - 1/2) with the stated coefficients.
inline PerturbationSpec torus(double minus_constant = 8.0 / pi) {
    PerturbationSpec p(3);
    p.set(Side::plus, 2, 0, 0, 2.0 / pi);
    p.set(Side::plus, 0, 0, 2, 1.0 / (2.0 * pi));
    p.set(Side::plus, 0, 1, 0, -3.0);
    p.set(Side::minus, 0, 0, 2, 1.0 / (2.0 * pi));
    p.set(Side::minus, 0, 0, 0, minus_constant);
    return p;
}

inline constexpr double torus_radius_sq = 0.5;

inline std::vector<CircleProfile> profiles() { return {CircleProfile::zero(), CircleProfile::cosine()}; }

inline PerturbationSpec random_spec(std::mt19937_64& rng, int degree, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    PerturbationSpec p(degree);
    for (Side s : {Side::plus, Side::minus})
        for (int i = 0; i < degree; ++i)
            for (int j = 0; i + j < degree; ++j)
                for (int k = 0; i + j + k < degree; ++k) p.set(s, i, j, k, u(rng));
    return p;
}

inline AveragedPoly random_poly(std::mt19937_64& rng, int degree, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    AveragedPoly poly(degree);
    for (int i = 0; i < degree; ++i)
        for (int j = 0; i + j < degree; ++j) poly.set(i, j, u(rng));
    return poly;
}

}  // namespace fixtures
