#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>

#include "degenfb/config.hpp"
#include "degenfb/sweep.hpp"

namespace degenfb {

enum class LogLevel { Quiet = 0, Info = 1, Trace = 2 };

inline LogLevel log_level() {
    const char* env = std::getenv("DEGENFB_LOG");
    if (!env) return LogLevel::Info;
    const std::string v(env);
    if (v == "quiet") return LogLevel::Quiet;
    if (v == "trace") return LogLevel::Trace;
    return LogLevel::Info;
}

inline void log_info(const std::string& msg) {
    if (log_level() >= LogLevel::Info) std::cerr << "[degenfb] " << msg << "\n";
}

constexpr const char* kSchemaVersion = "1";

inline json result_to_json(const SolveResult& r, double eps, std::uint64_t seed) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["eps"] = eps;
    j["iterations"] = r.iterations;
    j["final_residual"] = r.final_residual;
    j["monotone_violations"] = r.monotone_violations;
    j["converged"] = r.converged;
    j["dt_last"] = r.dt_last;
    j["seed"] = seed;
    double sup = 0.0;
    for (double x : r.u.v) sup = std::max(sup, x);
    j["sup_u"] = sup;
    return j;
}

inline json geometry_to_json(const GeometryReport& g) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["eps"] = g.eps;
    j["lipschitz"] = g.lipschitz;
    j["growth_min"] = g.growth_min;
    j["nondeg_min"] = g.nondeg_min;
    j["nondeg_upper"] = g.nondeg_upper;
    j["density_min"] = g.density_min;
    j["harnack_max"] = g.harnack_max;
    j["porosity"] = g.porosity;
    j["layer_nodes"] = g.layer_nodes;
    j["layer_bbox"] = g.layer_bbox;
    j["margin"] = g.margin;
    j["growth_threshold"] = g.growth_threshold;
    j["c1"] = g.c1;
    json entries = json::array();
    for (const auto& e : g.hausdorff) {
        json je;
        je["rho"] = e.rho;
        je["delta"] = e.delta;
        je["content"] = e.content;
        je["normalized"] = e.normalized;
        entries.push_back(je);
    }
    j["hausdorff"] = entries;
    return j;
}

inline json barrier_to_json(const BarrierParams& bp, const BarrierCheck& super,
                            const BarrierCheck& growth) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["t0"] = bp.t0;
    j["T0"] = bp.T0;
    j["A0"] = bp.A0;
    j["alpha"] = bp.alpha;
    j["L"] = bp.L;
    j["L0"] = bp.L0;
    j["phi"] = bp.phi;
    j["psi"] = bp.psi;
    j["kappa0"] = bp.kappa0;
    j["dim"] = bp.dim;
    j["lambda"] = bp.lambda;
    j["Lambda"] = bp.Lambda;
    j["L1"] = bp.L1;
    j["L2"] = bp.L2;
    j["p"] = bp.p;
    j["q"] = bp.q;
    j["a_sup"] = bp.a_sup;
    j["Istar"] = bp.Istar;
    j["supersolution"] = {{"pass", super.pass},
                          {"worst_margin", super.worst_margin},
                          {"worst_radius", super.worst_radius},
                          {"samples", super.samples}};
    j["growth"] = {{"pass", growth.pass},
                   {"worst_margin", growth.worst_margin},
                   {"worst_radius", growth.worst_radius}};
    return j;
}

inline json sweep_to_json(const SweepResult& s) {
    json j;
    j["schema_version"] = kSchemaVersion;
    json eps = json::array();
    for (const auto& e : s.entries) eps.push_back(e.eps);
    j["eps_list"] = eps;
    j["sup_differences"] = s.sup_differences;
    json hd = json::array();
    for (const auto& d : s.hausdorff_between) {
        if (d)
            hd.push_back(*d);
        else
            hd.push_back(nullptr);
    }
    j["hausdorff_between"] = hd;
    return j;
}

inline void write_json(const json& j, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw numerical_error("cannot open for writing: " + path);
    os << j.dump(2) << "\n";
}

/// Executes a parsed configuration. Returns the process exit code:
/// 0 success, 1 validation failure, 2 numerical failure.
inline int run_config(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    const auto errors = validate_config(cfg);
    if (!errors.empty()) {
        for (const auto& e : errors) std::cerr << "config error: " << e << "\n";
        return 1;
    }
    if (cfg.subcommand == "validate") {
        json rep;
        rep["schema_version"] = kSchemaVersion;
        rep["valid"] = true;
        rep["subcommand_checked"] = "validate";
        if (cfg.has_grid) {
            ProblemSpec spec = build_problem(
                cfg, cfg.eps_list.empty() ? cfg.eps : cfg.eps_list.front(), /*dry=*/true);
            const auto cert = certify(spec.reaction, 0.25, 0.75);
            rep["reaction_certificate"] = {{"A", cert.A},   {"B0", cert.B0}, {"B", cert.B},
                                           {"J", cert.J},   {"t0", cert.t0}, {"T0", cert.T0},
                                           {"pass", cert.pass}};
        }
        std::cout << rep.dump(2) << "\n";
        return 0;
    }

    fs::create_directories(cfg.out_dir);
    auto out = [&](const std::string& name) { return (fs::path(cfg.out_dir) / name).string(); };

    try {
        if (cfg.subcommand == "solve") {
            ProblemSpec spec = build_problem(cfg, cfg.eps);
            log_info("solve: grid " + std::to_string(cfg.grid.n[0]) + "x" +
                     std::to_string(cfg.grid.n[1]) + ", eps " + std::to_string(cfg.eps));
            // the strip datum is itself the extended 1D solution; start there
            const bool strip = cfg.g_preset.kind == FieldPreset::Kind::Strip;
            const SolveResult r = strip ? solve_peps(spec, cfg.solve, &spec.g)
                                        : solve_peps(spec, cfg.solve);
            write_field_csv(r.u, out("u.csv"));
            write_json(result_to_json(r, cfg.eps, cfg.seed), out("result.json"));
            log_info("solve: " + std::to_string(r.iterations) + " iterations, residual " +
                     std::to_string(r.final_residual));
        } else if (cfg.subcommand == "sweep") {
            ProblemSpec spec = build_problem(cfg, cfg.eps_list.front());
            std::function<ScalarField(double)> regen;
            std::function<ScalarField(double)> init;
            auto cache = std::make_shared<std::map<double, ScalarField>>();
            if (cfg.g_preset.kind == FieldPreset::Kind::Strip) {
                auto profile = [&cfg, cache](double e) -> const ScalarField& {
                    auto it = cache->find(e);
                    if (it == cache->end())
                        it = cache->emplace(e, make_strip_boundary(cfg, e)).first;
                    return it->second;
                };
                regen = [profile](double e) { return profile(e); };
                init = [profile](double e) { return profile(e); };
            }
            const SweepResult s =
                eps_sweep(spec, cfg.solve, cfg.eps_list, cfg.geometry, regen, init);
            for (std::size_t k = 0; k < s.entries.size(); ++k) {
                const std::string tag = std::to_string(k);
                write_field_csv(s.entries[k].result.u, out("u_" + tag + ".csv"));
                write_json(result_to_json(s.entries[k].result, s.entries[k].eps, cfg.seed),
                           out("result_" + tag + ".json"));
                write_json(geometry_to_json(s.entries[k].geometry), out("geometry_" + tag + ".json"));
            }
            write_json(sweep_to_json(s), out("sweep.json"));
        } else if (cfg.subcommand == "barrier") {
            const BarrierParams bp =
                select_params(cfg.barrier.dim, cfg.barrier.lambda, cfg.barrier.Lambda,
                              cfg.barrier.L1, cfg.barrier.L2, cfg.barrier.p, cfg.barrier.q,
                              cfg.barrier.a_sup, cfg.barrier.t0, cfg.barrier.T0, cfg.barrier.Istar,
                              cfg.barrier.L);
            const BarrierCheck super = verify_supersolution(bp, cfg.barrier.samples);
            const BarrierCheck growth = growth_check(bp);
            write_json(barrier_to_json(bp, super, growth), out("barrier.json"));
            if (!super.pass || !growth.pass) return 2;
        } else if (cfg.subcommand == "oned") {
            const SlopeLaw law{cfg.oned.p, cfg.oned.q, cfg.oned.kappa, 1.0};
            const double s_law = slope_from_law(law);
            const ProfileResult prof =
                integrate_profile(cfg.oned.p, cfg.oned.q, cfg.oned.kappa, cfg.oned.eps);
            const CrossValidation cv =
                cross_validate(cfg.oned.p, cfg.oned.q, cfg.oned.kappa, cfg.oned.eps, cfg.oned.h,
                               cfg.oned.g0, cfg.oned.length, cfg.solve);
            json j;
            j["schema_version"] = kSchemaVersion;
            j["p"] = cfg.oned.p;
            j["q"] = cfg.oned.q;
            j["kappa"] = cfg.oned.kappa;
            j["eps"] = cfg.oned.eps;
            j["law_slope"] = s_law;
            j["profile_slope_at_eps"] = prof.slope_at_eps;
            j["solver_slope"] = cv.solver_slope;
            j["discrepancy"] = cv.discrepancy;
            write_json(j, out("oned.json"));
        } else if (cfg.subcommand == "geometry") {
            const ScalarField u = read_field_csv(cfg.field_csv);
            const GeometryReport rep = measure_geometry(u, cfg.eps, cfg.geometry);
            write_json(geometry_to_json(rep), out("geometry.json"));
        }
    } catch (const precondition_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        // residual trace file for solver divergence post-mortems
        std::ofstream os(out("failure.txt"));
        os << e.what() << "\n";
        return 2;
    }
    return 0;
}

inline int run_config_file(const std::string& config_path, const std::string& out_override,
                           std::optional<std::uint64_t> seed_override,
                           std::optional<int> threads_override) {
    std::ifstream is(config_path);
    if (!is) {
        std::cerr << "config error: cannot open " << config_path << "\n";
        return 1;
    }
    json j;
    try {
        is >> j;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
    std::vector<std::string> parse_errors;
    RunConfig cfg = parse_config(j, parse_errors);
    if (!parse_errors.empty()) {
        for (const auto& e : parse_errors) std::cerr << "config error: " << e << "\n";
        return 1;
    }
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (seed_override) {
        cfg.seed = *seed_override;
        cfg.geometry.seed = *seed_override;
    }
    if (threads_override) {
        cfg.threads = *threads_override;
        cfg.solve.threads = *threads_override;
    }
    return run_config(cfg);
}

}  // namespace degenfb
