#include "fixtures.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace pwsavg;
using Catch::Matchers::WithinAbs;

namespace {

// Cone fixture with h = 0: on y > 0, dr/dt = eps r^2 sin t / 2 and on y < 0,
// dr/dt = -eps r z0 / pi. One turn is solvable in closed form.
double cone_return(double eps, double r, double z0) {
    const double after_plus = 1.0 / (1.0 / r - eps);
    return after_plus * std::exp(-eps * z0);
}

double cone_fixed_point(double eps, double z0) { return (1.0 - std::exp(-eps * z0)) / eps; }

SystemSpec cone_system(double eps) { return {CircleProfile::zero(), fixtures::cone(), eps}; }
SystemSpec torus_system(double eps) { return {CircleProfile::cosine(), fixtures::torus(), eps}; }

}  // namespace

TEST_CASE("frozen dynamics", "[simulator]") {
    const auto spec = cone_system(0.0);
    CHECK(reduced_flow(spec, 1.7, 0.4) == 1.7);
    CHECK(poincare_map(spec, 1.7, 0.4) == std::pair{1.7, 0.4});
    CHECK_THROWS_AS(find_fixed_point(spec, 2.0, 2.0), DomainError);
}

TEST_CASE("reduced flow matches the closed-form cone map", "[simulator][oracle]") {
    for (double eps : {1e-2, 1e-3, -5e-3})
        for (double r : {0.5, 1.0, 2.0, 3.5})
            for (double z0 : {-1.0, 0.5, 2.0}) {
                const auto spec = cone_system(eps);
                CHECK_THAT(reduced_flow(spec, r, z0), WithinAbs(cone_return(eps, r, z0), 1e-10));
            }
}

TEST_CASE("first-order displacement of the return map", "[simulator]") {
    const auto spec = cone_system(1e-3);
    CHECK(std::abs(reduced_flow(spec, 2.0, 2.0) - 2.0) <= 10 * 1e-6);
    const double shift = reduced_flow(spec, 1.0, 2.0) - 1.0;
    CHECK(shift < 0.0);
    CHECK_THAT(shift, WithinAbs(-1e-3, 1e-5));

    const auto tor = torus_system(1e-4);
    const auto poly = averaged_generic(fixtures::torus(), CircleProfile::cosine());
    const double on = 3.0 + std::sqrt(fixtures::torus_radius_sq);
    CHECK(std::abs(reduced_flow(tor, on, 0.0) - on) <= 1e-6);
    for (double r : {2.0, 3.0, 4.5}) {
        const double d = reduced_flow(tor, r, 0.0) - r;
        CHECK((d > 0) == (eval_psi(poly, r, 0.0) > 0));
        CHECK_THAT(d, WithinAbs(1e-4 * eval_psi(poly, r, 0.0), 1e-5));
    }
}

TEST_CASE("cartesian flow without perturbation", "[simulator]") {
    const auto traj = cartesian_flow(cone_system(0.0), {1.0, 0.0, 0.0}, kTwoPi);
    CHECK_THAT(traj.final_state.x, WithinAbs(1.0, 1e-9));
    CHECK_THAT(traj.final_state.y, WithinAbs(0.0, 1e-9));
    CHECK_THAT(traj.final_state.z, WithinAbs(0.0, 1e-9));
    REQUIRE(traj.events.size() == 2);
    CHECK_THAT(traj.events[0].t, WithinAbs(kPi, 1e-9));
    CHECK_THAT(traj.events[1].t, WithinAbs(kTwoPi, 1e-9));
}

TEST_CASE("cartesian flow lifts z along the running integral", "[simulator]") {
    const auto traj = cartesian_flow(torus_system(0.0), {1.0, 0.0, 0.0}, kTwoPi);
    CHECK_THAT(traj.final_state.x, WithinAbs(1.0, 1e-9));
    CHECK_THAT(traj.final_state.z, WithinAbs(0.0, 1e-9));
    double zmax = -1.0, tmax = 0.0;
    for (const auto& s : traj.samples) {
        CHECK_THAT(s.state.z, WithinAbs(std::sin(s.t), 1e-9));
        if (s.state.z > zmax) zmax = s.state.z, tmax = s.t;
    }
    CHECK(zmax <= 1.0 + 1e-9);
    CHECK(zmax > 0.99);
    CHECK_THAT(tmax, WithinAbs(kPi / 2, 0.2));
}

TEST_CASE("radius is conserved without perturbation", "[simulator][property]") {
    for (const auto& prof : fixtures::profiles()) {
        const SystemSpec spec{prof, fixtures::torus(), 0.0};
        const auto traj = cartesian_flow(spec, {1.3, 0.4, -0.2}, 20 * kPi);
        const double r2 = 1.3 * 1.3 + 0.4 * 0.4;
        double drift = 0.0;
        for (const auto& s : traj.samples) drift = std::max(drift, std::abs(s.state.x * s.state.x + s.state.y * s.state.y - r2));
        CHECK(drift <= 1e-9);
        CHECK(traj.events.size() == 20);
    }
}

TEST_CASE("cartesian and reduced flows agree over one turn", "[simulator][property]") {
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> ue(-1e-2, 1e-2), ur(0.5, 3.0), uz(-1.0, 1.0);
    for (int draw = 0; draw < 20; ++draw) {
        const auto prof = fixtures::profiles()[draw % 2];
        const SystemSpec spec{prof, fixtures::random_spec(rng, 1 + draw % 3), ue(rng)};
        const double r = ur(rng), z0 = uz(rng);
        const auto traj = cartesian_flow(spec, {r, 0.0, z0}, kTwoPi);
        const double r_cart = std::hypot(traj.final_state.x, traj.final_state.y);
        CHECK_THAT(r_cart, WithinAbs(reduced_flow(spec, r, z0), 1e-8));
        CHECK_THAT(traj.final_state.z, WithinAbs(z0, 1e-9));
    }
}

TEST_CASE("events are sound", "[simulator][property]") {
    std::mt19937_64 rng(4);
    for (int draw = 0; draw < 10; ++draw) {
        const SystemSpec spec{CircleProfile::cosine(), fixtures::random_spec(rng, 3), 5e-3};
        const auto traj = cartesian_flow(spec, {1.0, 0.3, 0.2}, 6 * kPi);
        REQUIRE(traj.events.size() >= 5);
        CHECK(traj.crossing_violations == 0);
        int prev = 0;
        for (const auto& ev : traj.events) {
            CHECK(std::abs(ev.y_residual) <= 1e-10);
            CHECK(ev.state.y == 0.0);
            CHECK(ev.crossing_ok);
            CHECK((ev.ydot_plus > 0) == (ev.ydot_minus > 0));
            CHECK(ev.to_side == -ev.from_side);
            if (prev != 0) CHECK(ev.from_side == prev);
            prev = ev.to_side;
        }
    }
}

TEST_CASE("start on the axis is rejected", "[simulator]") {
    CHECK_THROWS_AS(cartesian_flow(cone_system(0.0), {0.0, 0.0, 1.0}, 1.0), DomainError);
    CHECK_THROWS_AS(reduced_flow(cone_system(0.1), -1.0, 0.0), DomainError);
    SystemSpec loud = cone_system(2.0);
    CHECK_THROWS_AS(loud.validate(), DomainError);
    SystemSpec spiral{CircleProfile::constant(1.0), fixtures::cone(), 0.01};
    CHECK_THROWS_AS(spiral.validate(), NonPeriodicProfile);
}

TEST_CASE("blow-up is reported as an integration failure", "[simulator]") {
    // Plus side dr/dt = eps r^2 sin t / 2 blows up within half a turn once
    // 1/r < eps.
    CHECK_THROWS_AS(reduced_flow(cone_system(0.5), 5.0, 0.0), IntegrationFailure);
}

TEST_CASE("fixed points on the cone", "[simulator][oracle]") {
    const double e3 = std::abs(find_fixed_point(cone_system(1e-3), 2.0, 2.1) - 2.0);
    const double e4 = std::abs(find_fixed_point(cone_system(1e-4), 2.0, 2.1) - 2.0);
    CHECK(e3 <= 0.05);
    CHECK(e4 < e3 / 5);
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        const double r = find_fixed_point(cone_system(eps), 2.0, 2.0);
        CHECK_THAT(r, WithinAbs(cone_fixed_point(eps, 2.0), 1e-9));
    }
}

TEST_CASE("stability follows the sign of eps times dpsi/dr", "[simulator][property]") {
    const auto poly = averaged_generic(fixtures::torus(), CircleProfile::cosine());
    for (double z0 : {-0.5, 0.0, 0.3})
        for (const auto& p : roots_at_slice(poly, z0, 10.0).points)
            for (double eps : {1e-2, -1e-2, 1e-3}) {
                const auto spec = torus_system(eps);
                const double r = find_fixed_point(spec, z0, p.r0);
                const double slope = return_map_slope(spec, z0, r);
                CHECK((std::abs(slope) < 1.0) == (eps * p.dpsi_dr < 0.0));
            }
}

TEST_CASE("verification report", "[simulator]") {
    const auto poly = averaged_generic(fixtures::cone(), CircleProfile::zero());
    const auto pt = roots_at_slice(poly, 2.0, 10.0).points.at(0);
    const auto rep = verify_prediction(CircleProfile::zero(), fixtures::cone(), pt, {1e-2, 1e-3, 1e-4});
    REQUIRE(rep.records.size() == 3);
    for (const auto& rec : rep.records) {
        CHECK(rec.converged);
        CHECK(rec.contracting == rec.predicted_contracting);
    }
    CHECK(rep.errors()[0] > rep.errors()[1]);
    CHECK(rep.errors()[1] > rep.errors()[2]);
    CHECK(rep.convergence_order >= 0.8);
    CHECK(rep.convergence_order <= 1.5);
    // Outer torus branch: d psi/dr > 0 so eps > 0 repels.
    const auto tpoly = averaged_generic(fixtures::torus(), CircleProfile::cosine());
    const auto outer = roots_at_slice(tpoly, 0.0, 10.0).points.at(1);
    const auto trep = verify_prediction(CircleProfile::cosine(), fixtures::torus(), outer, {1e-2, 1e-3, 1e-4});
    for (const auto& rec : trep.records) CHECK_FALSE(rec.contracting);

    LocusPoint flat{0.0, 3.0, 1e-9, 1};
    CHECK_THROWS_AS(verify_prediction(CircleProfile::cosine(), fixtures::torus(), flat, {1e-2}), Degeneracy);
    CHECK_THROWS_AS(verify_prediction(CircleProfile::zero(), fixtures::cone(), pt, {1e-3, 1e-2}), DomainError);
    CHECK_THROWS_AS(verify_prediction(CircleProfile::zero(), fixtures::cone(), pt, {0.0}), DomainError);
}
