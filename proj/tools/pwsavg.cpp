// pwsavg: averaged functions, loci, realizations and simulations of
// piecewise smooth systems from a JSON config.

#include "pwsavg/io.hpp"
#include "pwsavg/pwsavg.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace pwsavg;
using io::json;

namespace {

enum Exit : int { ok = 0, other = 1, config = 2, not_applicable = 3, degeneracy = 4, integration = 5 };

struct Flags {
    std::string config_path;
    std::string out_dir = ".";
    std::string variant;
    std::optional<double> tol_quadrature;
    std::optional<double> tol_root;
    std::optional<double> degeneracy_threshold;
    std::uint64_t seed = 1;
    int sweep = 0;
};

struct Run {
    json cfg;
    QuadratureOptions quad;
    LocusOptions locus;
    IntegratorOptions integ;
    fs::path out;
};

json load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // Translate the byte offset into line:column.
        std::size_t line = 1, col = 1;
        for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
            if (text[k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
    }
}

double positive(const json& j, const char* key, double fallback, const std::string& path) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number() || !(v.get<double>() > 0.0)) throw ConfigError(path + "/" + key + ": expected a positive number");
    return v.get<double>();
}

const json& section(const json& cfg, const char* key) {
    if (!cfg.contains(key) || !cfg.at(key).is_object()) throw ConfigError(std::string("/") + key + ": missing object");
    return cfg.at(key);
}

double number(const json& j, const char* key, const std::string& path) {
    if (!j.contains(key) || !j.at(key).is_number()) throw ConfigError(path + "/" + key + ": expected a number");
    return j.at(key).get<double>();
}

std::vector<double> numbers(const json& j, const char* key, const std::string& path) {
    if (!j.contains(key) || !j.at(key).is_array()) throw ConfigError(path + "/" + key + ": expected an array");
    std::vector<double> out;
    for (std::size_t k = 0; k < j.at(key).size(); ++k) {
        const auto& v = j.at(key)[k];
        if (!v.is_number()) throw ConfigError(path + "/" + key + "/" + std::to_string(k) + ": expected a number");
        out.push_back(v.get<double>());
    }
    return out;
}

Run prepare(const Flags& f) {
    Run run;
    run.cfg = load(f.config_path);
    if (!run.cfg.is_object()) throw ConfigError(f.config_path + ": top level must be an object");
    if (!f.variant.empty()) {
        const auto ptr = "/variants/" + f.variant;
        if (!run.cfg.contains("variants") || !run.cfg["variants"].contains(f.variant))
            throw ConfigError(ptr + ": no such variant");
        for (const auto& [k, v] : run.cfg["variants"][f.variant].items())
            if (k != "label") run.cfg[k] = v;
    }
    const json tol = run.cfg.value("tolerances", json::object());
    run.quad.abs_tol = positive(tol, "quadrature", run.quad.abs_tol, "/tolerances");
    run.locus.root_residual = positive(tol, "root", run.locus.root_residual, "/tolerances");
    run.locus.degeneracy_threshold = positive(tol, "degeneracy", run.locus.degeneracy_threshold, "/tolerances");
    if (f.tol_quadrature) run.quad.abs_tol = *f.tol_quadrature;
    if (f.tol_root) run.locus.root_residual = *f.tol_root;
    if (f.degeneracy_threshold) run.locus.degeneracy_threshold = *f.degeneracy_threshold;
    for (double v : {run.quad.abs_tol, run.locus.root_residual, run.locus.degeneracy_threshold})
        if (!(v > 0.0)) throw ConfigError("tolerances must be positive");
    run.out = f.out_dir;
    fs::create_directories(run.out);
    return run;
}

CircleProfile profile_of(const Run& run) { return io::profile_from_json(section(run.cfg, "profile")); }
PerturbationSpec pert_of(const Run& run) { return io::perturbation_from_json(section(run.cfg, "pert")); }

void write_json(const fs::path& p, const json& j) {
    std::ofstream os(p);
    os << j.dump(2) << '\n';
}

template <class Writer>
void write_text(const fs::path& p, Writer&& w) {
    std::ofstream os(p);
    w(os);
}

int cmd_averaged(const Flags& f) {
    const Run run = prepare(f);
    const auto profile = profile_of(run);
    const auto pert = pert_of(run);
    const auto poly = averaged_generic(pert, profile, run.quad);
    json out = io::to_json(poly);
    if (pert.degree() == 2 || pert.degree() == 3)
        out["dual_path_deviation"] = max_abs_diff(poly, averaged_closed_form(pert, profile, run.quad));
    if (f.sweep > 0) {
        if (pert.degree() != 2 && pert.degree() != 3)
            throw ConfigError("/pert/degree: --sweep compares closed forms, which exist for degrees 2 and 3");
        std::mt19937_64 rng(f.seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        double worst = 0.0;
        for (int k = 0; k < f.sweep; ++k) {
            PerturbationSpec p(pert.degree());
            for (Side s : {Side::plus, Side::minus})
                for (int i = 0; i < p.degree(); ++i)
                    for (int j = 0; i + j < p.degree(); ++j)
                        for (int l = 0; i + j + l < p.degree(); ++l) p.set(s, i, j, l, u(rng));
            worst = std::max(worst, max_abs_diff(averaged_generic(p, profile, run.quad),
                                                 averaged_closed_form(p, profile, run.quad)));
        }
        out["sweep"] = {{"draws", f.sweep}, {"seed", f.seed}, {"max_dual_path_deviation", worst}};
    }
    write_json(run.out / "averaged.json", out);
    std::cout << out.dump(2) << '\n';
    return ok;
}

int cmd_locus(const Flags& f) {
    Run run = prepare(f);
    const auto poly = averaged_generic(pert_of(run), profile_of(run), run.quad);
    const json& lc = section(run.cfg, "locus");
    const double z_min = number(lc, "z0_min", "/locus"), z_max = number(lc, "z0_max", "/locus");
    const double step = positive(lc, "step", 0.01, "/locus");
    run.locus.r_max = lc.value("r_max", 0.0);
    const int samples = lc.value("mesh_samples", 0);

    const auto mc = classify(poly);
    write_json(run.out / "classification.json", io::to_json(mc));
    if (mc.kind == ManifoldKind::not_applicable) {
        std::cerr << "locus: " << mc.note << '\n';
        return not_applicable;
    }
    const auto curve = trace_locus(poly, z_min, z_max, step, run.locus);
    write_text(run.out / "locus.csv", [&](std::ostream& os) { io::write_locus_csv(os, curve); });
    json summary = io::to_json(curve);
    for (auto& b : summary["branches"]) b.erase("points");
    write_json(run.out / "classification.json", summary);
    if (samples > 0 && curve.point_count() > 0)
        write_text(run.out / "mesh.csv", [&](std::ostream& os) { io::write_mesh_csv(os, revolve(curve, samples)); });
    std::cout << summary.dump(2) << '\n';
    return ok;
}

int cmd_realize(const Flags& f) {
    const Run run = prepare(f);
    const auto profile = profile_of(run);
    const auto target = io::poly_from_json(section(run.cfg, "target"));
    const auto report = realize_roundtrip_check(target, profile, run.quad);
    write_json(run.out / "perturbation.json", io::to_json(report.perturbation));
    json residual{{"max_deviation", report.max_deviation}, {"achieved", io::to_json(report.achieved)}};
    if (f.sweep > 0) {
        std::mt19937_64 rng(f.seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        double worst = 0.0;
        for (int k = 0; k < f.sweep; ++k) {
            AveragedPoly t(target.degree());
            for (int i = 0; i < t.degree(); ++i)
                for (int j = 0; i + j < t.degree(); ++j) t.set(i, j, u(rng));
            worst = std::max(worst, realize_roundtrip_check(t, profile, run.quad).max_deviation);
        }
        residual["sweep"] = {{"draws", f.sweep}, {"seed", f.seed}, {"max_deviation", worst}};
    }
    write_json(run.out / "residual.json", residual);
    std::cout << residual.dump(2) << '\n';
    return ok;
}

int cmd_simulate(const Flags& f) {
    const Run run = prepare(f);
    const json& sc = section(run.cfg, "simulate");
    const auto start = numbers(sc, "start", "/simulate");
    if (start.size() != 3) throw ConfigError("/simulate/start: expected [x, y, z]");
    const SystemSpec spec{profile_of(run), pert_of(run), number(sc, "epsilon", "/simulate")};
    spec.validate(run.integ);
    const auto traj = cartesian_flow(spec, {start[0], start[1], start[2]}, positive(sc, "t_end", kTwoPi, "/simulate"),
                                     run.integ);
    write_text(run.out / "trajectory.csv", [&](std::ostream& os) { io::write_trajectory_csv(os, traj); });
    json events = json::array();
    for (const auto& e : traj.events)
        events.push_back({{"t", e.t}, {"x", e.state.x}, {"z", e.state.z}, {"from", e.from_side}, {"to", e.to_side},
                          {"y_residual", e.y_residual}, {"crossing_ok", e.crossing_ok}});
    json summary{{"final_state", {traj.final_state.x, traj.final_state.y, traj.final_state.z}},
                 {"events", events},
                 {"crossing_violations", traj.crossing_violations}};
    write_json(run.out / "simulation.json", summary);
    std::cout << "samples " << traj.samples.size() << ", events " << traj.events.size() << '\n';
    return ok;
}

int cmd_verify(const Flags& f) {
    Run run = prepare(f);
    const auto profile = profile_of(run);
    const auto pert = pert_of(run);
    const auto poly = averaged_generic(pert, profile, run.quad);
    const json& vc = section(run.cfg, "verify");
    const auto zs = numbers(vc, "z0", "/verify");
    const auto eps = numbers(vc, "epsilons", "/verify");
    const std::string branch = vc.value("branch", "all");
    if (branch != "all" && branch != "inner" && branch != "outer")
        throw ConfigError("/verify/branch: expected \"all\", \"inner\" or \"outer\"");

    json reports = json::array();
    for (double z0 : zs) {
        const double r_max = std::max(1.0, detail::cauchy_bound(poly.slice(z0)));
        const auto s = roots_at_slice(poly, z0, r_max, run.locus);
        std::vector<LocusPoint> all = s.points;
        all.insert(all.end(), s.degenerate.begin(), s.degenerate.end());
        std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.r0 < b.r0; });
        if (all.empty()) throw DomainError("verify: no locus point at z0 = " + io::fmt17(z0));
        std::vector<LocusPoint> picked;
        if (branch == "inner") picked = {all.front()};
        else if (branch == "outer") picked = {all.back()};
        else picked = all;
        for (const auto& p : picked)
            reports.push_back(io::to_json(verify_prediction(profile, pert, p, eps, run.integ,
                                                            run.locus.degeneracy_threshold)));
    }
    write_json(run.out / "verification.json", reports);
    std::cout << reports.dump(2) << '\n';
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Averaging for discontinuous piecewise smooth systems"};
    app.require_subcommand(1, 1);
    Flags flags;
    const auto common = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config_path, "JSON config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", flags.out_dir, "Output directory");
        sub->add_option("--variant", flags.variant, "Config variant to overlay");
        sub->add_option("--tol-quadrature", flags.tol_quadrature, "Quadrature convergence tolerance");
        sub->add_option("--tol-root", flags.tol_root, "Root residual tolerance");
        sub->add_option("--degeneracy-threshold", flags.degeneracy_threshold, "Minimum |dpsi/dr| at a locus point");
        sub->add_option("--seed", flags.seed, "Seed for --sweep draws");
        sub->add_option("--sweep", flags.sweep, "Randomized check over N draws");
    };
    std::vector<std::pair<CLI::App*, int (*)(const Flags&)>> subs = {
        {app.add_subcommand("averaged", "Averaged function coefficients"), cmd_averaged},
        {app.add_subcommand("locus", "Trace and classify the zero set"), cmd_locus},
        {app.add_subcommand("realize", "Perturbation realizing a target polynomial"), cmd_realize},
        {app.add_subcommand("simulate", "Cartesian flow with crossing detection"), cmd_simulate},
        {app.add_subcommand("verify", "Compare fixed points of the return map with the prediction"), cmd_verify},
    };
    for (auto& [sub, fn] : subs) common(sub);
    CLI11_PARSE(app, argc, argv);

    try {
        for (auto& [sub, fn] : subs)
            if (sub->parsed()) return fn(flags);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config;
    } catch (const NonPeriodicProfile& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config;
    } catch (const MethodNotApplicable& e) {
        std::cerr << "method does not apply: " << e.what() << '\n';
        return not_applicable;
    } catch (const Degeneracy& e) {
        std::cerr << "degeneracy: " << e.what() << '\n';
        return degeneracy;
    } catch (const IntegrationFailure& e) {
        std::cerr << "integration failure: " << e.what() << '\n';
        return integration;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return other;
    }
    return other;
}
