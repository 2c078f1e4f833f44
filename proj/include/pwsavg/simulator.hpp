#pragma once

#include "pwsavg/circle_profile.hpp"
#include "pwsavg/errors.hpp"
#include "pwsavg/locus.hpp"
#include "pwsavg/perturbation.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace pwsavg {

struct IntegratorOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    double initial_step = 1e-3;
    // Reduced flow aborts when r leaves (0, r_bound).
    double r_bound = 1e6;
    // Trajectories within this distance of the z axis abort (tangency line).
    double guard_radius = 1e-6;
    // Relative resolution of crossing times.
    double event_time_tol = 1e-12;
    // |epsilon| must stay below this.
    double max_epsilon = 1.0;
};

// X' = f(X) + eps g(X), f = (-y, x, h), g^{+/-} = (x Psi, y Psi, 0) on y >< 0.
struct SystemSpec {
    CircleProfile profile;
    PerturbationSpec pert;
    double epsilon = 0.0;

    void validate(const IntegratorOptions& opts = {}) const {
        require_periodic(profile);
        if (!(std::abs(epsilon) < opts.max_epsilon))
            throw DomainError("SystemSpec: |epsilon| must be < " + std::to_string(opts.max_epsilon));
    }
};

struct CartState {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

struct CylState {
    double r = 0.0;
    double theta = 0.0;
    double z = 0.0;
};

inline CylState to_cylindrical(const CartState& c) { return {std::hypot(c.x, c.y), std::atan2(c.y, c.x), c.z}; }
inline CartState to_cartesian(const CylState& c) { return {c.r * std::cos(c.theta), c.r * std::sin(c.theta), c.z}; }

namespace detail {

using State1 = std::array<double, 1>;
using State3 = std::array<double, 3>;

template <class State>
auto controlled(const IntegratorOptions& o) {
    return boost::numeric::odeint::make_controlled(o.abs_tol, o.rel_tol,
                                                   boost::numeric::odeint::runge_kutta_dopri5<State>());
}

template <class State>
auto dense(const IntegratorOptions& o) {
    return boost::numeric::odeint::make_dense_output(o.abs_tol, o.rel_tol,
                                                     boost::numeric::odeint::runge_kutta_dopri5<State>());
}

// Smooth field of one side, in Cartesian coordinates.
struct CartesianField {
    const SystemSpec* spec;
    Side side;

    void operator()(const State3& s, State3& ds, double /*t*/) const {
        const double x = s[0], y = s[1], z = s[2];
        const double psi = spec->epsilon == 0.0 ? 0.0 : spec->pert.psi(side, x, y, z);
        ds[0] = -y + spec->epsilon * x * psi;
        ds[1] = x + spec->epsilon * y * psi;
        ds[2] = spec->profile.h(std::atan2(y, x));
    }
};

}  // namespace detail

// r(2 pi) of dr/dtheta = eps r Psi^{+/-}(r cos t, r sin t, z0 + I_h(t)),
// with the switch at theta = pi taken exactly.
inline double reduced_flow(const SystemSpec& spec, double r_start, double z0, const IntegratorOptions& opts = {}) {
    if (!(r_start > 0.0)) throw DomainError("reduced_flow: r must be > 0");
    if (spec.epsilon == 0.0) return r_start;
    using detail::State1;
    State1 state{r_start};
    const auto observe = [&](const State1& s, double theta) {
        if (!std::isfinite(s[0]) || s[0] <= 0.0 || s[0] >= opts.r_bound)
            throw IntegrationFailure("reduced_flow: r left (0, " + std::to_string(opts.r_bound) +
                                     ") at theta = " + std::to_string(theta));
    };
    for (Side side : {Side::plus, Side::minus}) {
        const auto field = [&](const State1& s, State1& ds, double theta) {
            const double r = s[0];
            const double z = z0 + spec.profile.running_integral(theta);
            ds[0] = spec.epsilon * r * spec.pert.psi(side, r * std::cos(theta), r * std::sin(theta), z);
        };
        const double from = side == Side::plus ? 0.0 : kPi;
        const double to = side == Side::plus ? kPi : kTwoPi;
        boost::numeric::odeint::integrate_adaptive(detail::controlled<State1>(opts), field, state, from, to,
                                                   opts.initial_step, observe);
    }
    return state[0];
}

struct CrossingEvent {
    double t = 0.0;
    CartState state;
    double y_residual = 0.0;  // y on the located crossing before snapping to 0
    int from_side = 0;
    int to_side = 0;
    double ydot_plus = 0.0;
    double ydot_minus = 0.0;
    bool crossing_ok = true;  // both one-sided y' agree in sign
};

struct TrajectorySample {
    double t = 0.0;
    CartState state;
    int side = 0;  // +1 / -1; 0 on event rows
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    std::vector<CrossingEvent> events;
    CartState final_state;
    int crossing_violations = 0;
};

// Direct simulation of the discontinuous system with event detection on y = 0.
inline Trajectory cartesian_flow(const SystemSpec& spec, const CartState& start, double t_end,
                                 const IntegratorOptions& opts = {}) {
    using detail::State3;
    if (std::hypot(start.x, start.y) <= opts.guard_radius)
        throw DomainError("cartesian_flow: start lies on the z axis");
    if (!(t_end >= 0.0)) throw DomainError("cartesian_flow: t_end must be >= 0");

    const auto side_of = [&](const State3& s) {
        if (s[1] > 0.0) return Side::plus;
        if (s[1] < 0.0) return Side::minus;
        // On the plane: y' = x, so the side entered is sign(x).
        return s[0] > 0.0 ? Side::plus : Side::minus;
    };
    const auto check_guard = [&](const State3& s, double t) {
        if (std::hypot(s[0], s[1]) <= opts.guard_radius)
            throw TangencyReached("cartesian_flow: trajectory reached the tangency line at t = " + std::to_string(t));
    };

    Trajectory traj;
    State3 state{start.x, start.y, start.z};
    Side side = side_of(state);
    double t = 0.0;
    traj.samples.push_back({t, start, side_sign(side)});

    const auto record_event = [&](double te, const State3& s, double y_residual, Side from) {
        if (std::abs(s[0]) <= opts.guard_radius)
            throw TangencyReached("cartesian_flow: crossing at x = " + std::to_string(s[0]) + " is within the guard");
        CrossingEvent ev;
        ev.t = te;
        ev.state = {s[0], 0.0, s[2]};
        ev.y_residual = y_residual;
        ev.from_side = side_sign(from);
        ev.to_side = -side_sign(from);
        const double eps = spec.epsilon;
        ev.ydot_plus = s[0] + eps * s[1] * spec.pert.psi(Side::plus, s[0], s[1], s[2]);
        ev.ydot_minus = s[0] + eps * s[1] * spec.pert.psi(Side::minus, s[0], s[1], s[2]);
        ev.crossing_ok = (ev.ydot_plus > 0.0) == (ev.ydot_minus > 0.0) && ev.ydot_plus != 0.0 && ev.ydot_minus != 0.0;
        if (!ev.crossing_ok) ++traj.crossing_violations;
        traj.events.push_back(ev);
        traj.samples.push_back({te, ev.state, 0});
    };

    auto stepper = detail::dense<State3>(opts);
    double dt = opts.initial_step;
    while (t < t_end) {
        detail::CartesianField field{&spec, side};
        stepper.initialize(state, t, std::min(dt, t_end - t));
        bool switched = false;
        while (stepper.current_time() < t_end) {
            if (stepper.current_time() + stepper.current_time_step() > t_end)
                stepper.initialize(stepper.current_state(), stepper.current_time(), t_end - stepper.current_time());
            const State3 before = stepper.current_state();
            const auto [t0, t1] = stepper.do_step(field);
            const State3& after = stepper.current_state();
            if (!std::isfinite(after[0]) || !std::isfinite(after[1]) || !std::isfinite(after[2]))
                throw IntegrationFailure("cartesian_flow: non-finite state at t = " + std::to_string(t1));
            const double sgn = side_sign(side);
            if (sgn * after[1] < 0.0) {
                // Bracket [t0, t1]: sgn*y >= 0 at t0, < 0 at t1.
                double lo = t0, hi = t1;
                State3 probe;
                while (hi - lo > opts.event_time_tol * std::max(1.0, std::abs(hi))) {
                    const double mid = 0.5 * (lo + hi);
                    stepper.calc_state(mid, probe);
                    if (sgn * probe[1] >= 0.0)
                        lo = mid;
                    else
                        hi = mid;
                }
                const double te = 0.5 * (lo + hi);
                // Land on te with genuine steps rather than the interpolant.
                State3 exact = before;
                boost::numeric::odeint::integrate_adaptive(detail::controlled<State3>(opts), field, exact, t0, te,
                                                           std::max((te - t0) * 0.5, 1e-14));
                check_guard(exact, te);
                record_event(te, exact, exact[1], side);
                exact[1] = 0.0;
                state = exact;
                t = te;
                dt = std::max(stepper.current_time_step(), 1e-8);
                side = side == Side::plus ? Side::minus : Side::plus;
                switched = true;
                break;
            }
            check_guard(after, t1);
            traj.samples.push_back({t1, {after[0], after[1], after[2]}, side_sign(side)});
        }
        if (!switched) {
            state = stepper.current_state();
            t = t_end;
        }
    }
    // A crossing that coincides with t_end (e.g. one full revolution from
    // the section) is reported when the state sits on the plane moving out
    // of the current side.
    const double r_end = std::hypot(state[0], state[1]);
    if (t_end > 0.0 && std::abs(state[1]) <= 1e-8 * std::max(1.0, r_end) &&
        (traj.events.empty() || traj.events.back().t < t_end - 1e-9)) {
        const double ydot = state[0] + spec.epsilon * state[1] * spec.pert.psi(side, state[0], state[1], state[2]);
        if (side_sign(side) * ydot < 0.0) record_event(t_end, state, state[1], side);
    }
    traj.final_state = {state[0], state[1], state[2]};
    return traj;
}

// First return to theta = 0. z returns exactly because I_h(2 pi) = 0.
inline std::pair<double, double> poincare_map(const SystemSpec& spec, double r, double z0,
                                              const IntegratorOptions& opts = {}) {
    return {reduced_flow(spec, r, z0, opts), z0};
}

struct FixedPointOptions {
    int max_iterations = 50;
    double tol = 1e-12;  // |P(r) - r| <= tol * max(1, r)
};

// Secant iteration on P(r) - r seeded at r_guess and r_guess (1 + 1e-3).
inline double find_fixed_point(const SystemSpec& spec, double z0, double r_guess, const IntegratorOptions& opts = {},
                               const FixedPointOptions& fp = {}) {
    if (!(r_guess > 0.0)) throw DomainError("find_fixed_point: r_guess must be > 0");
    if (spec.epsilon == 0.0) throw DomainError("find_fixed_point: epsilon = 0 makes the return map the identity");
    const auto F = [&](double r) { return poincare_map(spec, r, z0, opts).first - r; };
    double r0 = r_guess, r1 = r_guess * (1.0 + 1e-3);
    double f0 = F(r0), f1 = F(r1);
    if (std::abs(f0) <= fp.tol * std::max(1.0, r0)) return r0;
    for (int it = 0; it < fp.max_iterations; ++it) {
        if (std::abs(f1) <= fp.tol * std::max(1.0, r1)) return r1;
        if (f1 == f0) throw IntegrationFailure("find_fixed_point: secant slope vanished");
        const double r2 = r1 - f1 * (r1 - r0) / (f1 - f0);
        if (!(r2 > 0.0) || !(r2 < opts.r_bound))
            throw IntegrationFailure("find_fixed_point: iterate left (0, r_bound)");
        r0 = r1;
        f0 = f1;
        r1 = r2;
        f1 = F(r1);
    }
    if (std::abs(f1) <= fp.tol * std::max(1.0, r1)) return r1;
    throw IntegrationFailure("find_fixed_point: no convergence in " + std::to_string(fp.max_iterations) +
                             " iterations");
}

// Central difference of the return map.
inline double return_map_slope(const SystemSpec& spec, double z0, double r, const IntegratorOptions& opts = {}) {
    const double h = 1e-4 * std::max(1.0, r);
    return (poincare_map(spec, r + h, z0, opts).first - poincare_map(spec, r - h, z0, opts).first) / (2.0 * h);
}

struct EpsilonRecord {
    double epsilon = 0.0;
    bool converged = false;
    double fixed_point = std::numeric_limits<double>::quiet_NaN();
    double error = std::numeric_limits<double>::quiet_NaN();
    double return_map_slope = std::numeric_limits<double>::quiet_NaN();
    bool contracting = false;            // |P'(r*)| < 1
    bool predicted_contracting = false;  // eps * dpsi/dr(r0) < 0
    std::string message;
};

struct VerificationReport {
    double z0 = 0.0;
    double predicted_r0 = 0.0;
    double dpsi_dr = 0.0;
    std::vector<EpsilonRecord> records;
    double convergence_order = std::numeric_limits<double>::quiet_NaN();

    std::vector<double> epsilons() const {
        std::vector<double> v;
        for (const auto& r : records) v.push_back(r.epsilon);
        return v;
    }
    std::vector<double> errors() const {
        std::vector<double> v;
        for (const auto& r : records) v.push_back(r.error);
        return v;
    }
};

// Fixed points of the return map for a sequence of epsilons, compared with
// the averaging prediction r0(z0). convergence_order is the least-squares
// slope of log|r* - r0| against log|eps|.
inline VerificationReport verify_prediction(const CircleProfile& profile, const PerturbationSpec& pert,
                                            const LocusPoint& point, const std::vector<double>& epsilons,
                                            const IntegratorOptions& opts = {},
                                            double degeneracy_threshold = 1e-6) {
    if (std::abs(point.dpsi_dr) <= degeneracy_threshold)
        throw Degeneracy("verify_prediction: |dpsi/dr| = " + std::to_string(std::abs(point.dpsi_dr)) +
                         " at the locus point is below the degeneracy threshold");
    if (!(point.r0 > 0.0)) throw DomainError("verify_prediction: locus point needs r0 > 0");
    for (std::size_t k = 0; k < epsilons.size(); ++k) {
        if (epsilons[k] == 0.0) throw DomainError("verify_prediction: epsilons must be nonzero");
        if (k > 0 && std::abs(epsilons[k]) >= std::abs(epsilons[k - 1]))
            throw DomainError("verify_prediction: epsilons must decrease in magnitude");
    }
    VerificationReport report;
    report.z0 = point.z0;
    report.predicted_r0 = point.r0;
    report.dpsi_dr = point.dpsi_dr;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int used = 0;
    for (double eps : epsilons) {
        EpsilonRecord rec;
        rec.epsilon = eps;
        try {
            SystemSpec spec{profile, pert, eps};
            spec.validate(opts);
            rec.fixed_point = find_fixed_point(spec, point.z0, point.r0, opts);
            rec.converged = true;
            rec.error = std::abs(rec.fixed_point - point.r0);
            rec.return_map_slope = return_map_slope(spec, point.z0, rec.fixed_point, opts);
            rec.contracting = std::abs(rec.return_map_slope) < 1.0;
            rec.predicted_contracting = eps * point.dpsi_dr < 0.0;
            if (rec.error > 0.0) {
                const double lx = std::log(std::abs(eps)), ly = std::log(rec.error);
                sx += lx;
                sy += ly;
                sxx += lx * lx;
                sxy += lx * ly;
                ++used;
            }
        } catch (const Error& e) {
            rec.message = e.what();
        }
        report.records.push_back(rec);
    }
    if (used >= 2) {
        const double denom = used * sxx - sx * sx;
        if (denom != 0.0) report.convergence_order = (used * sxy - sx * sy) / denom;
    }
    return report;
}

}  // namespace pwsavg
