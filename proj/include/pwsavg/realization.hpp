#pragma once

#include "pwsavg/averaging.hpp"

#include <stdexcept>

namespace pwsavg {

// Builds a perturbation whose averaged function is `target`.
//
// Top-down peeling over the total degree m = n, n-1, ..., 1: every
// coefficient C_{i, m-1-i} is matched by the single monomial
// a y^i z^(m-1-i) on the y > 0 side, with a = C / delta(m, i, m-1-i).
// That monomial also feeds C_{i, j'} for all j' < m-1-i through the
// binomial expansion of (z0 + I_h)^(m-1-i); the whole column is subtracted
// before descending. The output uses only x-free monomials on the plus side.
inline PerturbationSpec realize(const AveragedPoly& target, const CircleProfile& profile,
                                const QuadratureOptions& opts = {}) {
    require_periodic(profile);
    const int n = target.degree();
    AveragedPoly remaining = target;
    PerturbationSpec pert(n);
    for (int m = n; m >= 1; --m) {
        for (int i = 0; i <= m - 1; ++i) {
            const int top = m - 1 - i;
            const double lead = remaining.coeff(i, top);
            if (lead == 0.0) continue;
            const double d = delta(profile, m, i, top, opts);
            // int_0^pi sin^i > 0 for every i.
            if (!(d > 0.0)) throw std::logic_error("realize: vanishing leading delta");
            const double a = lead / d;
            pert.add(Side::plus, 0, i, top, a);
            remaining.at(i, top) = 0.0;
            for (int j = 0; j < top; ++j) remaining.at(i, j) -= a * delta(profile, m, i, j, opts);
        }
    }
    return pert;
}

struct RoundtripReport {
    PerturbationSpec perturbation;
    AveragedPoly achieved;
    double max_deviation = 0.0;
};

inline RoundtripReport realize_roundtrip_check(const AveragedPoly& target, const CircleProfile& profile,
                                               const QuadratureOptions& opts = {}) {
    RoundtripReport report{realize(target, profile, opts), AveragedPoly(target.degree()), 0.0};
    report.achieved = averaged_generic(report.perturbation, profile, opts);
    report.max_deviation = max_abs_diff(report.achieved, target);
    return report;
}

}  // namespace pwsavg
