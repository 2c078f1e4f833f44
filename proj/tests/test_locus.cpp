#include "fixtures.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace pwsavg;
using Catch::Matchers::WithinAbs;

namespace {

AveragedPoly cone_poly() { return averaged_generic(fixtures::cone(), CircleProfile::zero()); }
AveragedPoly torus_poly() { return averaged_generic(fixtures::torus(), CircleProfile::cosine()); }

const double rho = std::sqrt(fixtures::torus_radius_sq);

}  // namespace

TEST_CASE("cone slices", "[locus]") {
    const auto poly = cone_poly();
    const auto s = roots_at_slice(poly, 2.0, 10.0);
    REQUIRE(s.points.size() == 1);
    CHECK_THAT(s.points[0].r0, WithinAbs(2.0, 1e-12));
    CHECK_THAT(s.points[0].dpsi_dr, WithinAbs(2.0, 1e-10));
    CHECK(s.points[0].brouwer_sign == 1);
    CHECK(roots_at_slice(poly, -1.0, 10.0).points.empty());
}

TEST_CASE("torus slice at z0 = 0", "[locus]") {
    const auto s = roots_at_slice(torus_poly(), 0.0, 10.0);
    REQUIRE(s.points.size() == 2);
    const auto& inner = s.points[0];
    const auto& outer = s.points[1];
    CHECK_THAT(inner.r0, WithinAbs(3.0 - rho, 1e-12));
    CHECK_THAT(outer.r0, WithinAbs(3.0 + rho, 1e-12));
    // d psi/dr = 2 r (r - 3) on the circle.
    CHECK_THAT(inner.dpsi_dr, WithinAbs(-2.0 * inner.r0 * rho, 1e-9));
    CHECK_THAT(outer.dpsi_dr, WithinAbs(2.0 * outer.r0 * rho, 1e-9));
    CHECK(inner.brouwer_sign == -1);
    CHECK(outer.brouwer_sign == 1);
}

TEST_CASE("root completeness on the torus", "[locus][property]") {
    const auto poly = torus_poly();
    for (int k = 0; k <= 400; ++k) {
        const double z = -2.0 + 0.01 * k;
        const auto s = roots_at_slice(poly, z, 10.0);
        const double w = rho * rho - z * z;
        INFO("z0 = " << z);
        if (w > 1e-6) {
            REQUIRE(s.points.size() == 2);
            CHECK_THAT(s.points[0].r0, WithinAbs(3.0 - std::sqrt(w), 1e-9));
            CHECK_THAT(s.points[1].r0, WithinAbs(3.0 + std::sqrt(w), 1e-9));
        } else if (w < -1e-6) {
            CHECK(s.points.empty());
        }
    }
}

TEST_CASE("returned points are simple zeros", "[locus][property]") {
    std::mt19937_64 rng(5);
    for (int n = 2; n <= 5; ++n)
        for (int draw = 0; draw < 20; ++draw) {
            const auto poly = fixtures::random_poly(rng, n);
            for (double z : {-1.5, -0.2, 0.0, 0.9, 2.0}) {
                for (const auto& p : roots_at_slice(poly, z, 50.0).points) {
                    CHECK(p.r0 > 0.0);
                    CHECK(std::abs(eval_psi(poly, p.r0, z)) <= 1e-10 * (1.0 + std::pow(p.r0, n)));
                    CHECK(std::abs(p.dpsi_dr) > 1e-6);
                    CHECK(p.brouwer_sign == (p.dpsi_dr > 0 ? 1 : -1));
                }
            }
        }
}

TEST_CASE("double root is reported as degenerate", "[locus]") {
    // psi = r (r - 2)^2 at every z0.
    AveragedPoly poly(3);
    poly.set(2, 0, 1.0).set(1, 0, -4.0).set(0, 0, 4.0);
    const auto s = roots_at_slice(poly, 0.3, 10.0);
    CHECK(s.points.empty());
    REQUIRE(s.degenerate.size() == 1);
    CHECK_THAT(s.degenerate[0].r0, WithinAbs(2.0, 1e-6));
}

TEST_CASE("slice that vanishes identically", "[locus]") {
    // psi = r (r - 1) z0
    AveragedPoly poly(3);
    poly.set(1, 1, 1.0).set(0, 1, -1.0);
    CHECK(roots_at_slice(poly, 0.0, 10.0).identically_zero);
    CHECK_FALSE(roots_at_slice(poly, 0.5, 10.0).identically_zero);
}

TEST_CASE("cone locus is the segment r = z0", "[locus]") {
    const auto curve = trace_locus(cone_poly(), 0.5, 5.0, 0.01);
    REQUIRE(curve.branches.size() == 1);
    double worst = 0.0;
    for (const auto& p : curve.branches[0].points) worst = std::max(worst, std::abs(p.r0 - p.z0));
    CHECK(worst <= 1e-10);
    CHECK(curve.branches[0].start.kind == EndKind::range_limit);
    CHECK(curve.branches[0].end.kind == EndKind::range_limit);
    CHECK(curve.classification.kind == ManifoldKind::line);
    CHECK_THAT(curve.classification.slope, WithinAbs(1.0, 1e-12));
    CHECK_THAT(curve.classification.intercept, WithinAbs(0.0, 1e-12));
}

TEST_CASE("cone locus below z0 = 0 ends at the axis", "[locus]") {
    const auto curve = trace_locus(cone_poly(), -1.0, 1.0, 0.05);
    REQUIRE(curve.branches.size() == 1);
    CHECK(curve.branches[0].start.kind == EndKind::boundary);
    CHECK_THAT(curve.branches[0].start.z0, WithinAbs(0.0, 1e-4));
}

TEST_CASE("torus locus is one closed curve", "[locus]") {
    const auto curve = trace_locus(torus_poly(), -2.0, 2.0, 0.01);
    REQUIRE(curve.branches.size() == 2);
    REQUIRE(curve.components.size() == 1);
    CHECK(curve.components[0].closed);
    for (const auto& br : curve.branches) {
        for (const BranchEnd* e : {&br.start, &br.end}) {
            CHECK(e->kind == EndKind::fold);
            CHECK_THAT(std::abs(e->z0), WithinAbs(rho, 1e-8));
            CHECK_THAT(e->r0, WithinAbs(3.0, 1e-6));
            CHECK(std::abs(e->dpsi_dr) < 1e-4);
        }
        for (const auto& p : br.points)
            CHECK_THAT((p.r0 - 3) * (p.r0 - 3) + p.z0 * p.z0, WithinAbs(fixtures::torus_radius_sq, 1e-9));
    }
    const auto& mc = curve.classification;
    CHECK(mc.kind == ManifoldKind::conic);
    CHECK(mc.conic == ConicType::ellipse);
    CHECK_THAT(mc.discriminant, WithinAbs(-4.0, 1e-12));
    CHECK_THAT(mc.center_r, WithinAbs(3.0, 1e-12));
    CHECK_THAT(mc.center_z, WithinAbs(0.0, 1e-12));
}

TEST_CASE("trace_locus input checks", "[locus]") {
    CHECK_THROWS_AS(trace_locus(AveragedPoly(3), -1, 1, 0.1), MethodNotApplicable);
    CHECK_THROWS_AS(trace_locus(cone_poly(), 1, -1, 0.1), DomainError);
    CHECK_THROWS_AS(trace_locus(cone_poly(), -1, 1, 0.0), DomainError);
}

TEST_CASE("classification", "[locus]") {
    AveragedPoly no_c10(2);
    no_c10.set(0, 1, 1.0).set(0, 0, 2.0);
    CHECK(classify(no_c10).kind == ManifoldKind::not_applicable);
    CHECK(classify(AveragedPoly(2)).kind == ManifoldKind::not_applicable);

    AveragedPoly constant(1);
    constant.set(0, 0, 2.0);
    CHECK(classify(constant).kind == ManifoldKind::empty);

    AveragedPoly hyper(3);  // r^2 - z0^2 - 1
    hyper.set(2, 0, 1.0).set(0, 2, -1.0).set(0, 0, -1.0);
    CHECK(classify(hyper).conic == ConicType::hyperbola);

    AveragedPoly para(3);  // r^2 - z0
    para.set(2, 0, 1.0).set(0, 1, -1.0);
    CHECK(classify(para).conic == ConicType::parabola);

    AveragedPoly pair(3);  // (r - z0)(r + z0)
    pair.set(2, 0, 1.0).set(0, 2, -1.0);
    CHECK(classify(pair).conic == ConicType::degenerate);

    std::mt19937_64 rng(1);
    const auto quartic = fixtures::random_poly(rng, 5);
    CHECK(classify(quartic).kind == ManifoldKind::algebraic_curve);
    CHECK(classify(quartic).curve_degree == 4);
}

TEST_CASE("classification is invariant under positive scaling", "[locus][property]") {
    std::mt19937_64 rng(2);
    for (int n = 2; n <= 4; ++n)
        for (int draw = 0; draw < 30; ++draw) {
            auto poly = fixtures::random_poly(rng, n);
            const auto before = classify(poly);
            for (double lambda : {1e-3, 0.5, 7.0, 1e4}) {
                auto scaled = poly;
                scaled *= lambda;
                const auto after = classify(scaled);
                CHECK(after.kind == before.kind);
                CHECK(after.conic == before.conic);
            }
        }
}

TEST_CASE("revolve", "[locus]") {
    const auto curve = trace_locus(cone_poly(), 2.0, 2.0 + 1e-3, 0.01);
    LocusCurve single;
    single.branches.push_back(curve.branches.at(0));
    single.branches[0].points.resize(1);
    const auto mesh = revolve(single, 4);
    REQUIRE(mesh.size() == 4);
    const double expect[4][2] = {{2, 0}, {0, 2}, {-2, 0}, {0, -2}};
    for (int k = 0; k < 4; ++k) {
        CHECK_THAT(mesh[k].x, WithinAbs(expect[k][0], 1e-12));
        CHECK_THAT(mesh[k].y, WithinAbs(expect[k][1], 1e-12));
        CHECK_THAT(mesh[k].z, WithinAbs(2.0, 1e-12));
    }
    CHECK_THROWS_AS(revolve(single, 2), DomainError);
    CHECK_THROWS_AS(revolve(LocusCurve{}, 8), DomainError);
}

TEST_CASE("torus mesh lies on the torus", "[locus]") {
    const auto mesh = revolve(trace_locus(torus_poly(), -2.0, 2.0, 0.05), 16);
    REQUIRE(!mesh.empty());
    for (const auto& m : mesh) {
        const double r = std::hypot(m.x, m.y);
        CHECK_THAT((r - 3) * (r - 3) + m.z * m.z, WithinAbs(fixtures::torus_radius_sq, 1e-8));
    }
}
