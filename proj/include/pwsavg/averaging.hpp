#pragma once

#include "pwsavg/averaged_poly.hpp"
#include "pwsavg/circle_profile.hpp"
#include "pwsavg/perturbation.hpp"
#include "pwsavg/quadrature.hpp"

#include <map>
#include <tuple>

namespace pwsavg {

// Half-turn trig moments
//   int cos^i(t) sin^j(t) I_h(t)^e dt  over (0, pi) for Side::plus, (pi, 2 pi) for Side::minus.
// Read-through memo; one instance per profile.
class MomentCache {
public:
    MomentCache(const CircleProfile& profile, QuadratureOptions opts) : profile_(profile), opts_(opts) {}

    double operator()(int i, int j, int e, Side side) {
        const auto key = std::make_tuple(i, j, e, side);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        const double lo = side == Side::plus ? 0.0 : kPi;
        const double hi = side == Side::plus ? kPi : kTwoPi;
        const double v = integrate(
            [&](double t) {
                const double trig = ipow(std::cos(t), i) * ipow(std::sin(t), j);
                return e == 0 ? trig : trig * ipow(profile_.running_integral(t), e);
            },
            lo, hi, opts_);
        memo_.emplace(key, v);
        return v;
    }

private:
    const CircleProfile& profile_;
    QuadratureOptions opts_;
    std::map<std::tuple<int, int, int, Side>, double> memo_;
};

// Averaged function by direct monomial expansion. Each a x^i y^j z^k on a
// side contributes, after x = r cos t, y = r sin t, z = z0 + I_h(t),
//   a binom(k, m) r^(i+j) z0^m int cos^i sin^j I_h^(k-m)
// to C_{i+j, m}. Valid for any degree.
inline AveragedPoly averaged_generic(const PerturbationSpec& pert, const CircleProfile& profile,
                                     const QuadratureOptions& opts = {}) {
    require_periodic(profile);
    AveragedPoly poly(pert.degree());
    MomentCache moment(profile, opts);
    for (Side side : {Side::plus, Side::minus}) {
        for (const auto& [key, a] : pert.coeffs(side)) {
            for (int m = 0; m <= key.k; ++m) {
                const double mu = moment(key.i, key.j, key.k - m, side);
                poly.at(key.i + key.j, m) += a * binomial(key.k, m) * mu;
            }
        }
    }
    return poly;
}

// Explicit coefficient tables for n = 2 and n = 3 in terms of the eight
// c-constants. Independent of averaged_generic except for I_h itself.
inline AveragedPoly averaged_closed_form(const PerturbationSpec& pert, const CircleProfile& profile,
                                         const QuadratureOptions& opts = {}) {
    const int n = pert.degree();
    if (n != 2 && n != 3)
        throw UnsupportedDegree("averaged_closed_form: only degrees 2 and 3 have closed forms (got " +
                                std::to_string(n) + "); use averaged_generic");
    require_periodic(profile);
    const CConstantTable c = c_constants(profile, opts);
    const auto p = [&](int i, int j, int k) { return pert.coeff(Side::plus, i, j, k); };
    const auto m = [&](int i, int j, int k) { return pert.coeff(Side::minus, i, j, k); };

    AveragedPoly poly(n);
    if (n == 2) {
        poly.set(1, 0, 2.0 * (p(0, 1, 0) - m(0, 1, 0)));
        poly.set(0, 1, kPi * (p(0, 0, 1) + m(0, 0, 1)));
        poly.set(0, 0, kPi * (p(0, 0, 0) + m(0, 0, 0)) + c.c0_10 * p(0, 0, 1) + c.c0_01 * m(0, 0, 1));
        return poly;
    }
    poly.set(2, 0, 0.5 * kPi * (p(2, 0, 0) + p(0, 2, 0) + m(2, 0, 0) + m(0, 2, 0)));
    poly.set(1, 1, 2.0 * (p(0, 1, 1) - m(0, 1, 1)));
    poly.set(0, 2, kPi * (p(0, 0, 2) + m(0, 0, 2)));
    poly.set(1, 0, p(1, 0, 1) * c.c1_11 + p(0, 1, 1) * c.c1_21 + 2.0 * (p(0, 1, 0) - m(0, 1, 0)) +
                       m(1, 0, 1) * c.c1_12 + m(0, 1, 1) * c.c1_22);
    poly.set(0, 1, 2.0 * p(0, 0, 2) * c.c0_10 + kPi * p(0, 0, 1) + 2.0 * m(0, 0, 2) * c.c0_01 + kPi * m(0, 0, 1));
    poly.set(0, 0, p(0, 0, 2) * c.c2_10 + p(0, 0, 1) * c.c0_10 + kPi * (p(0, 0, 0) + m(0, 0, 0)) +
                       m(0, 0, 2) * c.c2_01 + m(0, 0, 1) * c.c0_01);
    return poly;
}

}  // namespace pwsavg
