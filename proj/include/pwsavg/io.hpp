#pragma once

// JSON and CSV formats for profiles, perturbations, averaged polynomials,
// loci, meshes, trajectories and verification reports. Numbers in CSV use
// 17 significant digits; JSON uses nlohmann's shortest round-trip form.

#include "pwsavg/averaged_poly.hpp"
#include "pwsavg/circle_profile.hpp"
#include "pwsavg/errors.hpp"
#include "pwsavg/locus.hpp"
#include "pwsavg/perturbation.hpp"
#include "pwsavg/simulator.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace pwsavg::io {

using json = nlohmann::json;

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline const json& require(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(path + "/" + key + ": missing");
    return *it;
}

inline double number(const json& j, const char* key, const std::string& path) {
    const auto& v = require(j, key, path);
    if (!v.is_number()) throw ConfigError(path + "/" + key + ": expected a number");
    return v.get<double>();
}

inline int integer(const json& j, const char* key, const std::string& path) {
    const auto& v = require(j, key, path);
    if (!v.is_number_integer()) throw ConfigError(path + "/" + key + ": expected an integer");
    return v.get<int>();
}

inline json nan_to_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace detail

// {"terms": [{"cos": p, "sin": q, "coeff": c}]} or {"preset": "cos" | "zero"}.
inline CircleProfile profile_from_json(const json& j, const std::string& path = "/profile") {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
    if (auto it = j.find("preset"); it != j.end()) {
        const auto name = it->is_string() ? it->get<std::string>() : std::string{};
        if (name == "cos") return CircleProfile::cosine();
        if (name == "zero") return CircleProfile::zero();
        throw ConfigError(path + "/preset: unknown preset '" + name + "' (expected \"cos\" or \"zero\")");
    }
    const auto& terms = detail::require(j, "terms", path);
    if (!terms.is_array()) throw ConfigError(path + "/terms: expected an array");
    std::vector<TrigTerm> out;
    for (std::size_t k = 0; k < terms.size(); ++k) {
        const std::string p = path + "/terms/" + std::to_string(k);
        const TrigTerm t{detail::integer(terms[k], "cos", p), detail::integer(terms[k], "sin", p),
                         detail::number(terms[k], "coeff", p)};
        if (t.cos_power < 0 || t.sin_power < 0) throw ConfigError(p + ": exponents must be non-negative");
        out.push_back(t);
    }
    return CircleProfile(out);
}

inline json to_json(const CircleProfile& profile) {
    json terms = json::array();
    for (const auto& t : profile.term_list()) terms.push_back({{"cos", t.cos_power}, {"sin", t.sin_power}, {"coeff", t.coeff}});
    return {{"terms", terms}};
}

// {"degree": n, "plus": [{"i":..,"j":..,"k":..,"a":..}], "minus": [...]}
inline PerturbationSpec perturbation_from_json(const json& j, const std::string& path = "/pert") {
    const int n = detail::integer(j, "degree", path);
    if (n < 1) throw ConfigError(path + "/degree: must be >= 1");
    PerturbationSpec pert(n);
    for (const auto& [name, side] : {std::pair{"plus", Side::plus}, std::pair{"minus", Side::minus}}) {
        auto it = j.find(name);
        if (it == j.end()) continue;
        if (!it->is_array()) throw ConfigError(path + "/" + name + ": expected an array");
        for (std::size_t k = 0; k < it->size(); ++k) {
            const std::string p = path + "/" + name + "/" + std::to_string(k);
            const auto& e = (*it)[k];
            const int i = detail::integer(e, "i", p), jj = detail::integer(e, "j", p), kk = detail::integer(e, "k", p);
            if (i < 0 || jj < 0 || kk < 0 || i + jj + kk > n - 1)
                throw ConfigError(p + ": monomial outside 0 <= i+j+k <= " + std::to_string(n - 1));
            pert.add(side, i, jj, kk, detail::number(e, "a", p));
        }
    }
    return pert;
}

inline json to_json(const PerturbationSpec& pert) {
    json out{{"degree", pert.degree()}};
    for (const auto& [name, side] : {std::pair{"plus", Side::plus}, std::pair{"minus", Side::minus}}) {
        json arr = json::array();
        for (const auto& [key, a] : pert.coeffs(side)) arr.push_back({{"i", key.i}, {"j", key.j}, {"k", key.k}, {"a", a}});
        out[name] = arr;
    }
    return out;
}

// {"degree": n, "coeffs": [{"i":..,"j":..,"C":..}]}
inline AveragedPoly poly_from_json(const json& j, const std::string& path = "/target") {
    const int n = detail::integer(j, "degree", path);
    if (n < 1) throw ConfigError(path + "/degree: must be >= 1");
    AveragedPoly poly(n);
    const auto& coeffs = detail::require(j, "coeffs", path);
    if (!coeffs.is_array()) throw ConfigError(path + "/coeffs: expected an array");
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        const std::string p = path + "/coeffs/" + std::to_string(k);
        const int i = detail::integer(coeffs[k], "i", p), jj = detail::integer(coeffs[k], "j", p);
        if (!AveragedPoly::in_support(n, i, jj))
            throw ConfigError(p + ": coefficient outside i + j <= " + std::to_string(n - 1));
        poly.at(i, jj) += detail::number(coeffs[k], "C", p);
    }
    return poly;
}

inline json to_json(const AveragedPoly& poly) {
    json arr = json::array();
    for (int i = 0; i < poly.degree(); ++i)
        for (int j = 0; i + j <= poly.degree() - 1; ++j) arr.push_back({{"i", i}, {"j", j}, {"C", poly.coeff(i, j)}});
    return {{"degree", poly.degree()}, {"coeffs", arr}};
}

inline json to_json(const ManifoldClass& mc) {
    json out{{"kind", to_string(mc.kind)}, {"curve_degree", mc.curve_degree}};
    if (mc.kind == ManifoldKind::line) {
        out["slope"] = mc.slope;
        out["intercept"] = mc.intercept;
    }
    if (mc.kind == ManifoldKind::conic) {
        out["subtype"] = to_string(mc.conic);
        out["discriminant"] = mc.discriminant;
        if (mc.conic == ConicType::ellipse || mc.conic == ConicType::hyperbola) {
            out["center"] = {mc.center_r, mc.center_z};
            out["center_value"] = mc.center_value;
        }
    }
    if (!mc.note.empty()) out["note"] = mc.note;
    return out;
}

inline json to_json(const BranchEnd& e) {
    return {{"kind", to_string(e.kind)}, {"z0", e.z0}, {"r0", e.r0}, {"dpsi_dr", e.dpsi_dr}};
}

inline json to_json(const LocusCurve& curve) {
    json branches = json::array();
    for (const auto& b : curve.branches) {
        json pts = json::array();
        for (const auto& p : b.points) pts.push_back({{"z0", p.z0}, {"r0", p.r0}, {"dpsi_dr", p.dpsi_dr}, {"sign", p.brouwer_sign}});
        branches.push_back({{"start", to_json(b.start)}, {"end", to_json(b.end)}, {"points", pts}});
    }
    json comps = json::array();
    for (const auto& c : curve.components) comps.push_back({{"branches", c.branches}, {"closed", c.closed}});
    return {{"classification", to_json(curve.classification)},
            {"branches", branches},
            {"components", comps},
            {"zero_slices", curve.zero_slices}};
}

// z0,r0,dpsi_dr,sign,branch
inline void write_locus_csv(std::ostream& os, const LocusCurve& curve) {
    os << "z0,r0,dpsi_dr,sign,branch\n";
    for (std::size_t b = 0; b < curve.branches.size(); ++b)
        for (const auto& p : curve.branches[b].points)
            os << fmt17(p.z0) << ',' << fmt17(p.r0) << ',' << fmt17(p.dpsi_dr) << ',' << p.brouwer_sign << ',' << b
               << '\n';
}

// x,y,z,branch
inline void write_mesh_csv(std::ostream& os, const std::vector<MeshPoint>& mesh) {
    os << "x,y,z,branch\n";
    for (const auto& m : mesh) os << fmt17(m.x) << ',' << fmt17(m.y) << ',' << fmt17(m.z) << ',' << m.branch << '\n';
}

// t,x,y,z,side with side = +1 / -1 and 0 on crossing-event rows.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,x,y,z,side\n";
    for (const auto& s : traj.samples)
        os << fmt17(s.t) << ',' << fmt17(s.state.x) << ',' << fmt17(s.state.y) << ',' << fmt17(s.state.z) << ','
           << s.side << '\n';
}

inline json to_json(const VerificationReport& rep) {
    json recs = json::array();
    for (const auto& r : rep.records) {
        json e{{"epsilon", r.epsilon},
               {"converged", r.converged},
               {"fixed_point", detail::nan_to_null(r.fixed_point)},
               {"error", detail::nan_to_null(r.error)},
               {"return_map_slope", detail::nan_to_null(r.return_map_slope)},
               {"contracting", r.contracting},
               {"predicted_contracting", r.predicted_contracting}};
        if (!r.message.empty()) e["message"] = r.message;
        recs.push_back(e);
    }
    return {{"z0", rep.z0},
            {"predicted_r0", rep.predicted_r0},
            {"dpsi_dr", rep.dpsi_dr},
            {"records", recs},
            {"convergence_order", detail::nan_to_null(rep.convergence_order)}};
}

}  // namespace pwsavg::io
