#pragma once

#include "pwsavg/averaged_poly.hpp"
#include "pwsavg/circle_profile.hpp"
#include "pwsavg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace pwsavg {

struct LocusOptions {
    // Zeros with |d psi / dr| at or below this are excluded from S.
    double degeneracy_threshold = 1e-6;
    // |psi(r0, z0)| <= root_residual * (1 + r0^n) for accepted roots.
    double root_residual = 1e-10;
    int scan_points = 512;
    // Upper end of the radial search; <= 0 selects a Cauchy root bound.
    double r_max = 0.0;
    // Fold bisection stops at step / fold_refinement.
    int fold_refinement = 1024;
};

// A nondegenerate zero of psi_n on the slice z0. brouwer_sign is the local
// Brouwer degree, i.e. sign(d psi / dr); 0 marks a degenerate entry.
struct LocusPoint {
    double z0 = 0.0;
    double r0 = 0.0;
    double dpsi_dr = 0.0;
    int brouwer_sign = 0;
};

struct SliceRoots {
    std::vector<LocusPoint> points;      // members of S, sorted by r0
    std::vector<LocusPoint> degenerate;  // |d psi / dr| <= threshold
    bool identically_zero = false;       // psi(., z0) vanishes for every r
};

namespace detail {

inline double horner(const std::vector<double>& b, double r) {
    double acc = 0.0;
    for (auto it = b.rbegin(); it != b.rend(); ++it) acc = acc * r + *it;
    return acc;
}

inline std::vector<double> derivative(const std::vector<double>& b) {
    std::vector<double> d;
    for (std::size_t i = 1; i < b.size(); ++i) d.push_back(static_cast<double>(i) * b[i]);
    return d;
}

inline bool all_zero(const std::vector<double>& b) {
    return std::all_of(b.begin(), b.end(), [](double v) { return v == 0.0; });
}

// Cauchy bound 1 + max |b_i / b_d| on the moduli of the roots.
inline double cauchy_bound(const std::vector<double>& b) {
    std::size_t d = b.size();
    while (d > 0 && b[d - 1] == 0.0) --d;
    if (d <= 1) return 1.0;
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < d; ++i) m = std::max(m, std::abs(b[i] / b[d - 1]));
    return 1.0 + m;
}

// All sign-change roots of the polynomial b in (r_lo, r_hi], bracketed on a
// uniform scan grid, bisected, then Newton-polished inside the bracket.
inline std::vector<double> bracketed_roots(const std::vector<double>& b, double r_lo, double r_hi, int scan_points) {
    std::vector<double> roots;
    if (all_zero(b)) return roots;
    const auto db = derivative(b);
    const auto f = [&](double r) { return horner(b, r); };
    const auto refine = [&](double lo, double hi, double flo) {
        for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi);
             ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = f(mid);
            if (fm == 0.0) return mid;
            if ((fm < 0.0) == (flo < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        double r = 0.5 * (lo + hi);
        for (int it = 0; it < 4; ++it) {
            const double d = horner(db, r);
            if (d == 0.0) break;
            const double next = r - f(r) / d;
            if (next < lo || next > hi) break;
            r = next;
        }
        return r;
    };
    double prev_r = r_lo;
    double prev_f = f(prev_r);
    if (prev_f == 0.0) roots.push_back(prev_r);
    for (int k = 1; k <= scan_points; ++k) {
        const double r = r_lo + (r_hi - r_lo) * static_cast<double>(k) / scan_points;
        const double fr = f(r);
        if (fr == 0.0) {
            roots.push_back(r);
        } else if (prev_f != 0.0 && (fr < 0.0) != (prev_f < 0.0)) {
            roots.push_back(refine(prev_r, r, prev_f));
        }
        prev_r = r;
        prev_f = fr;
    }
    return roots;
}

}  // namespace detail

// Zeros of psi_n(., z0) in (0, r_max].
inline SliceRoots roots_at_slice(const AveragedPoly& poly, double z0, double r_max, const LocusOptions& opts = {}) {
    if (!(r_max > 0.0)) throw DomainError("roots_at_slice: r_max must be > 0");
    SliceRoots out;
    const auto b = poly.slice(z0);
    if (detail::all_zero(b)) {
        out.identically_zero = true;
        return out;
    }
    const double r_lo = r_max * 1e-12;
    const int n = poly.degree();
    const auto residual_ok = [&](double r) {
        return std::abs(poly.value(r, z0)) <= opts.root_residual * (1.0 + std::pow(std::abs(r), n));
    };
    for (double r : detail::bracketed_roots(b, r_lo, r_max, opts.scan_points)) {
        LocusPoint p{z0, r, poly.derivative_r(r, z0), 0};
        if (std::abs(p.dpsi_dr) > opts.degeneracy_threshold && residual_ok(r)) {
            p.brouwer_sign = p.dpsi_dr > 0.0 ? 1 : -1;
            out.points.push_back(p);
        } else {
            out.degenerate.push_back(p);
        }
    }
    // Even-multiplicity zeros produce no sign change; catch them as
    // critical points of psi / r where psi itself vanishes.
    for (double rc : detail::bracketed_roots(detail::derivative(b), r_lo, r_max, opts.scan_points)) {
        if (!residual_ok(rc)) continue;
        const auto near = [&](const LocusPoint& p) { return std::abs(p.r0 - rc) <= 1e-8 * std::max(1.0, rc); };
        if (std::any_of(out.points.begin(), out.points.end(), near) ||
            std::any_of(out.degenerate.begin(), out.degenerate.end(), near))
            continue;
        out.degenerate.push_back({z0, rc, poly.derivative_r(rc, z0), 0});
    }
    return out;
}

enum class EndKind {
    range_limit,  // branch runs into z0_min or z0_max
    fold,         // two roots merge; d psi / dr -> 0
    boundary,     // root leaves through r -> 0 or r -> r_max
};

struct BranchEnd {
    EndKind kind = EndKind::range_limit;
    double z0 = 0.0;
    double r0 = 0.0;
    double dpsi_dr = 0.0;
};

// A connected piece of psi^{-1}(0) inside R+ x S, ordered by increasing z0.
struct LocusBranch {
    std::vector<LocusPoint> points;
    BranchEnd start;
    BranchEnd end;
};

enum class ManifoldKind { empty, line, conic, algebraic_curve, not_applicable };
enum class ConicType { none, ellipse, parabola, hyperbola, degenerate };

struct ManifoldClass {
    ManifoldKind kind = ManifoldKind::empty;
    ConicType conic = ConicType::none;
    int curve_degree = 0;
    // line: r = slope * z0 + intercept
    double slope = 0.0;
    double intercept = 0.0;
    // conic: C11^2 - 4 C20 C02, center (r, z0), psi/r at the center
    double discriminant = 0.0;
    double center_r = 0.0;
    double center_z = 0.0;
    double center_value = 0.0;
    std::string note;
};

inline const char* to_string(ManifoldKind k) {
    switch (k) {
        case ManifoldKind::empty: return "empty";
        case ManifoldKind::line: return "line";
        case ManifoldKind::conic: return "conic";
        case ManifoldKind::algebraic_curve: return "algebraic-curve";
        case ManifoldKind::not_applicable: return "not-applicable";
    }
    return "?";
}

inline const char* to_string(ConicType c) {
    switch (c) {
        case ConicType::none: return "none";
        case ConicType::ellipse: return "ellipse";
        case ConicType::parabola: return "parabola";
        case ConicType::hyperbola: return "hyperbola";
        case ConicType::degenerate: return "degenerate";
    }
    return "?";
}

inline const char* to_string(EndKind k) {
    switch (k) {
        case EndKind::range_limit: return "range-limit";
        case EndKind::fold: return "fold";
        case EndKind::boundary: return "boundary";
    }
    return "?";
}

// Shape of the generating curve {psi_n = 0, r > 0} from the coefficients.
inline ManifoldClass classify(const AveragedPoly& poly) {
    ManifoldClass mc;
    const int n = poly.degree();
    const double scale = poly.max_abs_coeff();
    if (scale == 0.0) {
        mc.kind = ManifoldKind::not_applicable;
        mc.note = "identically-zero psi";
        return mc;
    }
    const double tiny = 1e-12 * scale;
    if (n == 1) {
        mc.kind = ManifoldKind::empty;
        mc.note = "psi = r * C00 has no zeros with r > 0";
        return mc;
    }
    if (n == 2) {
        const double c10 = poly.coeff(1, 0);
        if (std::abs(c10) <= tiny) {
            mc.kind = ManifoldKind::not_applicable;
            mc.note = "C10 = 0: the method does not apply";
            return mc;
        }
        mc.kind = ManifoldKind::line;
        mc.curve_degree = 1;
        mc.slope = -poly.coeff(0, 1) / c10;
        mc.intercept = -poly.coeff(0, 0) / c10;
        return mc;
    }
    if (n >= 4) {
        mc.kind = ManifoldKind::algebraic_curve;
        mc.curve_degree = n - 1;
        return mc;
    }
    const double a = poly.coeff(2, 0), b = poly.coeff(1, 1), c = poly.coeff(0, 2);
    const double d = poly.coeff(1, 0), e = poly.coeff(0, 1), f = poly.coeff(0, 0);
    mc.kind = ManifoldKind::conic;
    mc.curve_degree = 2;
    mc.discriminant = b * b - 4.0 * a * c;
    const double det = a * (c * f - e * e / 4.0) - (b / 2.0) * (b / 2.0 * f - e * d / 4.0) +
                       (d / 2.0) * (b * e / 4.0 - c * d / 2.0);
    const double quad_scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
    if (quad_scale <= tiny || std::abs(det) <= 1e-12 * scale * scale * scale) {
        mc.conic = ConicType::degenerate;
    } else if (std::abs(mc.discriminant) <= 1e-12 * scale * scale) {
        mc.conic = ConicType::parabola;
    } else {
        mc.conic = mc.discriminant < 0.0 ? ConicType::ellipse : ConicType::hyperbola;
    }
    if (std::abs(mc.discriminant) > 1e-12 * scale * scale) {
        const double det2 = -mc.discriminant;  // 4ac - b^2
        mc.center_r = (-2.0 * c * d + b * e) / det2;
        mc.center_z = (-2.0 * a * e + b * d) / det2;
        mc.center_value = poly.reduced(mc.center_r, mc.center_z);
    }
    return mc;
}

struct LocusComponent {
    std::vector<std::size_t> branches;
    bool closed = false;
};

struct LocusCurve {
    std::vector<LocusBranch> branches;
    std::vector<LocusComponent> components;
    ManifoldClass classification;
    std::vector<double> zero_slices;  // z0 values where psi(., z0) == 0 identically

    std::size_t point_count() const {
        std::size_t n = 0;
        for (const auto& b : branches) n += b.points.size();
        return n;
    }
};

namespace detail {

// d^k(psi/r)/dr^k, mixed with d/dz0 when dz is set.
inline double reduced_partial(const AveragedPoly& poly, double r, double z0, int dr, int dz) {
    const int n = poly.degree();
    double sum = 0.0;
    for (int i = dr; i < n; ++i)
        for (int j = dz; i + j <= n - 1; ++j) {
            double fi = 1.0;
            for (int t = 0; t < dr; ++t) fi *= i - t;
            double fj = 1.0;
            for (int t = 0; t < dz; ++t) fj *= j - t;
            sum += poly.coeff(i, j) * fi * fj * ipow(r, i - dr) * ipow(z0, j - dz);
        }
    return sum;
}

// Newton on {q = 0, q_r = 0} where q = psi / r.
inline bool polish_fold(const AveragedPoly& poly, double& r, double& z) {
    for (int it = 0; it < 60; ++it) {
        const double q = reduced_partial(poly, r, z, 0, 0);
        const double qr = reduced_partial(poly, r, z, 1, 0);
        const double qz = reduced_partial(poly, r, z, 0, 1);
        const double qrr = reduced_partial(poly, r, z, 2, 0);
        const double qrz = reduced_partial(poly, r, z, 1, 1);
        const double det = qr * qrz - qz * qrr;
        if (det == 0.0 || !std::isfinite(det)) return false;
        const double dr = (q * qrz - qz * qr) / det;
        const double dz = (qr * qr - q * qrr) / det;
        r -= dr;
        z -= dz;
        if (!std::isfinite(r) || !std::isfinite(z)) return false;
        if (std::abs(dr) + std::abs(dz) <= 1e-15 * (1.0 + std::abs(r) + std::abs(z))) return true;
    }
    const double q = reduced_partial(poly, r, z, 0, 0);
    const double qr = reduced_partial(poly, r, z, 1, 0);
    return std::abs(q) < 1e-12 && std::abs(qr) < 1e-10;
}

inline double link_threshold(const AveragedPoly& poly, const LocusPoint& p, double step) {
    const double qr = p.dpsi_dr / p.r0;  // at a root psi_r = r q_r
    const double qz = reduced_partial(poly, p.r0, p.z0, 0, 1);
    const double slope = qr == 0.0 ? std::numeric_limits<double>::infinity() : std::abs(qz / qr);
    return 5.0 * step * std::max(1.0, slope);
}

inline const LocusPoint* nearest_same_sign(const SliceRoots& s, const LocusPoint& ref) {
    const LocusPoint* best = nullptr;
    for (const auto& p : s.points)
        if (p.brouwer_sign == ref.brouwer_sign && (!best || std::abs(p.r0 - ref.r0) < std::abs(best->r0 - ref.r0)))
            best = &p;
    return best;
}

// `inside` carries a root continuing `anchor`; `outside` does not. Bisect
// in z0, then try to land exactly on the fold.
inline BranchEnd refine_end(const AveragedPoly& poly, LocusPoint anchor, double outside, double step, double r_max,
                            const LocusOptions& opts) {
    double inside = anchor.z0;
    const double resolution = step / opts.fold_refinement;
    while (std::abs(outside - inside) > resolution) {
        const double mid = 0.5 * (inside + outside);
        const auto s = roots_at_slice(poly, mid, r_max, opts);
        if (const auto* p = nearest_same_sign(s, anchor)) {
            anchor = *p;
            inside = mid;
        } else {
            outside = mid;
        }
    }
    double r = anchor.r0;
    double z = anchor.z0;
    const double lo = std::min(inside, outside) - step;
    const double hi = std::max(inside, outside) + step;
    if (polish_fold(poly, r, z) && r > 0.0 && z >= lo && z <= hi) return {EndKind::fold, z, r, poly.derivative_r(r, z)};
    return {EndKind::boundary, anchor.z0, anchor.r0, anchor.dpsi_dr};
}

}  // namespace detail

// Samples psi_n^{-1}(0) over [z0_min, z0_max], links slice roots into
// branches, and refines every branch end that falls inside the range.
inline LocusCurve trace_locus(const AveragedPoly& poly, double z0_min, double z0_max, double step,
                              const LocusOptions& opts = {}) {
    if (!(z0_min < z0_max)) throw DomainError("trace_locus: need z0_min < z0_max");
    if (!(step > 0.0)) throw DomainError("trace_locus: step must be > 0");
    if (poly.is_zero()) throw MethodNotApplicable("trace_locus: identically-zero psi has no isolated zeros");

    std::vector<double> zs;
    const auto count = static_cast<long>(std::floor((z0_max - z0_min) / step + 1e-9));
    for (long k = 0; k <= count; ++k) zs.push_back(z0_min + static_cast<double>(k) * step);
    if (z0_max - zs.back() > 1e-9 * step) zs.push_back(z0_max);

    double r_max = opts.r_max;
    if (!(r_max > 0.0)) {
        r_max = 1.0;
        for (double z : zs) r_max = std::max(r_max, detail::cauchy_bound(poly.slice(z)));
        r_max = std::min(r_max, 1e6);
    }

    LocusCurve curve;
    curve.classification = classify(poly);
    std::vector<std::size_t> active;  // branches with a point on the previous slice
    for (std::size_t s = 0; s < zs.size(); ++s) {
        const double z = zs[s];
        const auto slice = roots_at_slice(poly, z, r_max, opts);
        if (slice.identically_zero) curve.zero_slices.push_back(z);
        const auto& roots = slice.points;

        struct Pair {
            double dist;
            std::size_t branch;
            std::size_t root;
        };
        std::vector<Pair> pairs;
        for (std::size_t b : active) {
            const auto& last = curve.branches[b].points.back();
            const double thr = detail::link_threshold(poly, last, z - last.z0);
            for (std::size_t k = 0; k < roots.size(); ++k) {
                if (roots[k].brouwer_sign != last.brouwer_sign) continue;
                const double dist = std::abs(roots[k].r0 - last.r0);
                if (dist <= thr) pairs.push_back({dist, b, k});
            }
        }
        std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
            return a.dist != b.dist ? a.dist < b.dist : (a.branch != b.branch ? a.branch < b.branch : a.root < b.root);
        });
        std::vector<bool> root_taken(roots.size(), false);
        std::vector<std::size_t> next_active;
        std::vector<bool> branch_taken(curve.branches.size(), false);
        for (const auto& p : pairs) {
            if (root_taken[p.root] || branch_taken[p.branch]) continue;
            root_taken[p.root] = true;
            branch_taken[p.branch] = true;
            curve.branches[p.branch].points.push_back(roots[p.root]);
            next_active.push_back(p.branch);
        }
        for (std::size_t b : active) {
            if (branch_taken[b]) continue;
            auto& br = curve.branches[b];
            br.end = detail::refine_end(poly, br.points.back(), z, zs[1] - zs[0], r_max, opts);
        }
        for (std::size_t k = 0; k < roots.size(); ++k) {
            if (root_taken[k]) continue;
            LocusBranch br;
            br.points.push_back(roots[k]);
            if (s == 0)
                br.start = {EndKind::range_limit, roots[k].z0, roots[k].r0, roots[k].dpsi_dr};
            else
                br.start = detail::refine_end(poly, roots[k], zs[s - 1], zs[1] - zs[0], r_max, opts);
            curve.branches.push_back(std::move(br));
            next_active.push_back(curve.branches.size() - 1);
        }
        active = std::move(next_active);
    }
    for (std::size_t b : active) {
        const auto& last = curve.branches[b].points.back();
        curve.branches[b].end = {EndKind::range_limit, last.z0, last.r0, last.dpsi_dr};
    }
    // Sort branches by (first z0, first r0) so output is canonical.
    std::stable_sort(curve.branches.begin(), curve.branches.end(), [](const LocusBranch& a, const LocusBranch& b) {
        const auto& pa = a.points.front();
        const auto& pb = b.points.front();
        return pa.z0 != pb.z0 ? pa.z0 < pb.z0 : pa.r0 < pb.r0;
    });

    // Components: branches glued at shared fold points.
    const std::size_t nb = curve.branches.size();
    std::vector<std::size_t> parent(nb);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    const auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    const auto same_fold = [](const BranchEnd& a, const BranchEnd& b) {
        return a.kind == EndKind::fold && b.kind == EndKind::fold && std::abs(a.z0 - b.z0) <= 1e-6 &&
               std::abs(a.r0 - b.r0) <= 1e-6;
    };
    std::vector<int> shared_ends(nb * 2, 0);
    for (std::size_t a = 0; a < nb; ++a)
        for (std::size_t b = a + 1; b < nb; ++b) {
            const BranchEnd* ea[2] = {&curve.branches[a].start, &curve.branches[a].end};
            const BranchEnd* eb[2] = {&curve.branches[b].start, &curve.branches[b].end};
            for (int u = 0; u < 2; ++u)
                for (int v = 0; v < 2; ++v)
                    if (same_fold(*ea[u], *eb[v])) {
                        parent[find(a)] = find(b);
                        ++shared_ends[2 * a + u];
                        ++shared_ends[2 * b + v];
                    }
        }
    std::vector<std::size_t> root_index(nb, nb);
    for (std::size_t b = 0; b < nb; ++b) {
        const std::size_t r = find(b);
        if (root_index[r] == nb) {
            root_index[r] = curve.components.size();
            curve.components.push_back({});
        }
        curve.components[root_index[r]].branches.push_back(b);
    }
    for (auto& comp : curve.components) {
        comp.closed = std::all_of(comp.branches.begin(), comp.branches.end(),
                                  [&](std::size_t b) { return shared_ends[2 * b] == 1 && shared_ends[2 * b + 1] == 1; });
    }
    return curve;
}

struct MeshPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    std::size_t branch = 0;
};

// Rotates every locus point about the z axis: S^1 x psi^{-1}(0).
inline std::vector<MeshPoint> revolve(const LocusCurve& curve, int angular_samples) {
    if (angular_samples < 3) throw DomainError("revolve: need at least 3 angular samples");
    if (curve.point_count() == 0) throw DomainError("revolve: empty locus curve");
    std::vector<MeshPoint> mesh;
    mesh.reserve(curve.point_count() * static_cast<std::size_t>(angular_samples));
    for (std::size_t b = 0; b < curve.branches.size(); ++b)
        for (const auto& p : curve.branches[b].points)
            for (int k = 0; k < angular_samples; ++k) {
                const double theta = kTwoPi * k / angular_samples;
                mesh.push_back({p.r0 * std::cos(theta), p.r0 * std::sin(theta), p.z0, b});
            }
    return mesh;
}

}  // namespace pwsavg
