#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "degenfb/barrier.hpp"
#include "degenfb/common.hpp"
#include "degenfb/field_io.hpp"
#include "degenfb/geometry.hpp"
#include "degenfb/grid.hpp"
#include "degenfb/oned.hpp"
#include "degenfb/solver.hpp"

namespace degenfb {

using nlohmann::json;

/// Closed-form field presets named in configs. `constant` and `csv` apply to
/// any field; `strip` is a boundary-only preset that carries the matching 1D
/// profile along the side edges so strip problems stay y-independent.
struct FieldPreset {
    enum class Kind { Constant, LinearRamp, GaussianBump, Checkerboard, Strip, Csv };

    Kind kind = Kind::Constant;
    double value = 0.0;
    double base = 0.0;                     // additive floor (bump/checkerboard)
    std::array<double, 2> center{0.5, 0.5};
    double width = 0.1;
    int cells = 4;
    std::string csv_path;

    static FieldPreset constant(double v) {
        FieldPreset p;
        p.value = v;
        return p;
    }

    static FieldPreset parse(const json& j, const std::string& path,
                             std::vector<std::string>& errors) {
        FieldPreset p;
        if (j.is_number()) {
            p.value = j.get<double>();
            return p;
        }
        if (!j.is_object()) {
            errors.push_back(path + ": expected a number, preset object, or csv object");
            return p;
        }
        if (j.contains("csv")) {
            p.kind = Kind::Csv;
            p.csv_path = j.at("csv").get<std::string>();
            return p;
        }
        const std::string name = j.value("preset", "constant");
        if (name == "constant")
            p.kind = Kind::Constant;
        else if (name == "linear_ramp")
            p.kind = Kind::LinearRamp;
        else if (name == "gaussian_bump")
            p.kind = Kind::GaussianBump;
        else if (name == "checkerboard")
            p.kind = Kind::Checkerboard;
        else if (name == "strip")
            p.kind = Kind::Strip;
        else
            errors.push_back(path + ".preset: unknown preset '" + name + "'");
        p.value = j.value("value", 0.0);
        p.base = j.value("base", 0.0);
        p.width = j.value("width", 0.1);
        p.cells = j.value("cells", 4);
        if (j.contains("center")) {
            const auto c = j.at("center");
            p.center[0] = c.at(0).get<double>();
            if (c.size() > 1) p.center[1] = c.at(1).get<double>();
        }
        return p;
    }

    json to_json() const {
        json j;
        switch (kind) {
            case Kind::Constant: j["preset"] = "constant"; break;
            case Kind::LinearRamp: j["preset"] = "linear_ramp"; break;
            case Kind::GaussianBump: j["preset"] = "gaussian_bump"; break;
            case Kind::Checkerboard: j["preset"] = "checkerboard"; break;
            case Kind::Strip: j["preset"] = "strip"; break;
            case Kind::Csv: j["csv"] = csv_path; return j;
        }
        j["value"] = value;
        return j;
    }
};

/// Instantiates a preset on a grid (strip is handled by the caller, which
/// owns the solver coupling).
inline ScalarField build_field(const FieldPreset& p, const Grid& g) {
    ScalarField f(g);
    switch (p.kind) {
        case FieldPreset::Kind::Constant:
            for (double& x : f.v) x = p.value;
            break;
        case FieldPreset::Kind::LinearRamp: {
            const double lx = g.hi[0] - g.lo[0];
            for (int idx = 0; idx < g.node_count(); ++idx) {
                const auto pt = g.point(idx);
                f[idx] = p.base + p.value * (1.0 - (pt[0] - g.lo[0]) / lx);
            }
            break;
        }
        case FieldPreset::Kind::GaussianBump: {
            const double w2 = 2.0 * p.width * p.width;
            for (int idx = 0; idx < g.node_count(); ++idx) {
                const auto pt = g.point(idx);
                const double dx = pt[0] - p.center[0];
                const double dy = g.dim == 2 ? pt[1] - p.center[1] : 0.0;
                f[idx] = p.base + p.value * std::exp(-(dx * dx + dy * dy) / w2);
            }
            break;
        }
        case FieldPreset::Kind::Checkerboard: {
            for (int idx = 0; idx < g.node_count(); ++idx) {
                const auto pt = g.point(idx);
                const int cx = static_cast<int>((pt[0] - g.lo[0]) / (g.hi[0] - g.lo[0]) *
                               p.cells);
                const int cy = g.dim == 2 ? static_cast<int>((pt[1] - g.lo[1]) /
                                                              (g.hi[1] - g.lo[1]) * p.cells)
                                          : 0;
                f[idx] = p.base + ((cx + cy) % 2 == 0 ? p.value : 0.0);
            }
            break;
        }
        case FieldPreset::Kind::Csv: {
            ScalarField loaded = read_field_csv(p.csv_path);
            require(loaded.grid == g, "csv field does not match the configured grid: " +
                                          p.csv_path);
            f = loaded;
            break;
        }
        case FieldPreset::Kind::Strip:
            throw precondition_error("strip preset is only valid for the boundary datum");
    }
    return f;
}

struct BarrierRequest {
    int dim = 2;
    double lambda = 1.0;
    double Lambda = 1.0;
    double L1 = 1.0;
    double L2 = 1.0;
    double p = 1.0;
    double q = 2.0;
    double a_sup = 0.0;
    double t0 = 0.25;
    double T0 = 0.75;
    double Istar = 1.0;
    double L = -1.0;  // <= 0: use L0
    int samples = 1000;
};

struct OnedRequest {
    double p = 1.0;
    double q = 2.0;
    double kappa = 0.0;
    double eps = 1e-2;
    double h = 1.25e-3;
    double g0 = 0.25;
    double length = 0.3;
};

/// Parsed experiment configuration: one subcommand per run.
struct RunConfig {
    std::string subcommand = "solve";
    std::uint64_t seed = 1;
    int threads = 0;
    std::string out_dir = ".";

    // solve / sweep / geometry
    Grid grid = Grid::make2d(0, 0, 1, 1, 65, 65);
    double p = 1.0, q = 2.0, L1 = 1.0, L2 = 1.0;
    FieldPreset a_preset = FieldPreset::constant(0.0);
    OperatorKind op = OperatorKind::laplacian();
    double eps = 0.1;
    FieldPreset q_preset = FieldPreset::constant(1.0);
    FieldPreset f_preset = FieldPreset::constant(0.0);
    FieldPreset g_preset = FieldPreset::constant(0.0);
    SolveConfig solve;
    std::vector<double> eps_list;
    GeometryConfig geometry;
    std::string field_csv;  // geometry subcommand input

    BarrierRequest barrier;
    OnedRequest oned;

    bool has_grid = false;
};

namespace detail {

inline double get_num(const json& j, const char* key, double dflt) {
    return j.contains(key) ? j.at(key).get<double>() : dflt;
}

}  // namespace detail

/// Parses a config; structural problems (bad JSON types, unknown presets)
/// are appended to `errors`.
inline RunConfig parse_config(const json& j, std::vector<std::string>& errors) {
    RunConfig c;
    c.subcommand = j.value("subcommand", "solve");
    if (c.subcommand != "solve" && c.subcommand != "sweep" && c.subcommand != "barrier" &&
        c.subcommand != "oned" && c.subcommand != "geometry" && c.subcommand != "validate")
        errors.push_back("subcommand: unknown value '" + c.subcommand + "'");
    c.seed = j.value("seed", 1ull);
    c.threads = j.value("threads", 0);
    c.out_dir = j.value("out", ".");

    if (j.contains("grid")) {
        c.has_grid = true;
        const auto& gj = j.at("grid");
        const int dim = gj.value("dim", 2);
        try {
            if (dim == 1)
                c.grid = Grid::make1d(gj.at("lo").at(0).get<double>(),
                                      gj.at("hi").at(0).get<double>(), gj.at("n").at(0).get<int>());
            else
                c.grid = Grid::make2d(gj.at("lo").at(0).get<double>(), gj.at("lo").at(1).get<double>(),
                                      gj.at("hi").at(0).get<double>(), gj.at("hi").at(1).get<double>(),
                                      gj.at("n").at(0).get<int>(), gj.at("n").at(1).get<int>());
        } catch (const std::exception& e) {
            errors.push_back(std::string("grid: ") + e.what());
        }
    }

    if (j.contains("degeneracy")) {
        const auto& dj = j.at("degeneracy");
        c.p = detail::get_num(dj, "p", 1.0);
        c.q = detail::get_num(dj, "q", c.p);
        c.L1 = detail::get_num(dj, "L1", 1.0);
        c.L2 = detail::get_num(dj, "L2", 1.0);
        if (dj.contains("a")) c.a_preset = FieldPreset::parse(dj.at("a"), "degeneracy.a", errors);
    }

    if (j.contains("operator")) {
        const auto& oj = j.at("operator");
        const std::string kind = oj.value("kind", "laplacian");
        const double lam = detail::get_num(oj, "lambda", 1.0);
        const double Lam = detail::get_num(oj, "Lambda", 1.0);
        if (kind == "laplacian")
            c.op = OperatorKind::laplacian();
        else if (kind == "pucci_plus")
            c.op = OperatorKind::pucci_plus(lam, Lam);
        else if (kind == "pucci_minus")
            c.op = OperatorKind::pucci_minus(lam, Lam);
        else if (kind == "hessian_fm")
            c.op = OperatorKind::hessian_fm(oj.value("m", 3), lam, Lam);
        else
            errors.push_back("operator.kind: unknown value '" + kind + "'");
    }

    if (j.contains("reaction")) {
        const auto& rj = j.at("reaction");
        c.eps = detail::get_num(rj, "eps", 0.1);
        if (rj.contains("Q")) c.q_preset = FieldPreset::parse(rj.at("Q"), "reaction.Q", errors);
        if (rj.contains("f")) c.f_preset = FieldPreset::parse(rj.at("f"), "reaction.f", errors);
    }

    if (j.contains("boundary"))
        c.g_preset = FieldPreset::parse(j.at("boundary"), "boundary", errors);

    if (j.contains("solve")) {
        const auto& sj = j.at("solve");
        c.solve.cfl = detail::get_num(sj, "cfl", 0.4);
        c.solve.tol = detail::get_num(sj, "tol", 1e-8);
        c.solve.max_iter = static_cast<long>(detail::get_num(sj, "max_iter", 1e6));
        c.solve.project_nonneg = sj.value("project_nonneg", true);
    }
    c.solve.threads = c.threads;

    if (j.contains("sweep")) {
        const auto& sj = j.at("sweep");
        if (sj.contains("eps_list"))
            for (const auto& e : sj.at("eps_list")) c.eps_list.push_back(e.get<double>());
        c.geometry.c1 = detail::get_num(sj, "c1", 1.5);
    }

    if (j.contains("geometry")) {
        const auto& gj = j.at("geometry");
        c.geometry.margin = detail::get_num(gj, "margin", 0.1);
        c.geometry.growth_threshold = detail::get_num(gj, "growth_threshold", 10.0);
        c.geometry.c1 = detail::get_num(gj, "c1", c.geometry.c1);
        c.geometry.density_rho = detail::get_num(gj, "density_rho", 0.05);
        c.geometry.samples = static_cast<int>(detail::get_num(gj, "samples", 200));
        auto read_list = [&](const char* key, std::vector<double>& dst) {
            if (gj.contains(key)) {
                dst.clear();
                for (const auto& e : gj.at(key)) dst.push_back(e.get<double>());
            }
        };
        read_list("nondeg_radii", c.geometry.nondeg_radii);
        read_list("content_rho", c.geometry.content_rho);
        read_list("content_delta", c.geometry.content_delta);
        read_list("porosity_radii", c.geometry.porosity_radii);
        if (gj.contains("field_csv")) c.field_csv = gj.at("field_csv").get<std::string>();
        if (gj.contains("eps")) c.eps = gj.at("eps").get<double>();
    }
    c.geometry.seed = c.seed;

    if (j.contains("barrier")) {
        const auto& bj = j.at("barrier");
        c.barrier.dim = static_cast<int>(detail::get_num(bj, "dim", 2));
        c.barrier.lambda = detail::get_num(bj, "lambda", 1.0);
        c.barrier.Lambda = detail::get_num(bj, "Lambda", 1.0);
        c.barrier.L1 = detail::get_num(bj, "L1", 1.0);
        c.barrier.L2 = detail::get_num(bj, "L2", 1.0);
        c.barrier.p = detail::get_num(bj, "p", 1.0);
        c.barrier.q = detail::get_num(bj, "q", c.barrier.p);
        c.barrier.a_sup = detail::get_num(bj, "a_sup", 0.0);
        c.barrier.t0 = detail::get_num(bj, "t0", 0.25);
        c.barrier.T0 = detail::get_num(bj, "T0", 0.75);
        c.barrier.Istar = detail::get_num(bj, "Istar", 1.0);
        c.barrier.L = detail::get_num(bj, "L", -1.0);
        c.barrier.samples = static_cast<int>(detail::get_num(bj, "samples", 1000));
    }

    if (j.contains("oned")) {
        const auto& oj = j.at("oned");
        c.oned.p = detail::get_num(oj, "p", 1.0);
        c.oned.q = detail::get_num(oj, "q", std::max(1.0, c.oned.p));
        c.oned.kappa = detail::get_num(oj, "kappa", 0.0);
        c.oned.eps = detail::get_num(oj, "eps", 1e-2);
        c.oned.h = detail::get_num(oj, "h", c.oned.eps / 8.0);
        c.oned.g0 = detail::get_num(oj, "g0", 0.25);
        c.oned.length = detail::get_num(oj, "length", 0.3);
    }

    return c;
}

/// The strip boundary profile: the 1D solve of the same problem along the
/// x-axis, imposed on all four edges. A 2D strip problem with this datum is
/// exactly y-independent at the discrete level.
inline ScalarField make_strip_boundary(const RunConfig& c, double eps) {
    require(c.a_preset.kind == FieldPreset::Kind::Constant &&
                c.q_preset.kind == FieldPreset::Kind::Constant &&
                c.f_preset.kind == FieldPreset::Kind::Constant,
            "boundary strip preset requires constant a, Q and f");
    const Grid& g = c.grid;
    const Grid line = Grid::make1d(g.lo[0], g.hi[0], g.n[0]);

    ProblemSpec spec;
    spec.grid = line;
    spec.deg.p = c.p;
    spec.deg.q = c.q;
    spec.deg.L1 = c.L1;
    spec.deg.L2 = c.L2;
    spec.deg.a = ScalarField(line, c.a_preset.value);
    spec.op = c.op;
    spec.reaction.eps = eps;
    spec.reaction.Q = ScalarField(line, c.q_preset.value);
    spec.reaction.f = ScalarField(line, c.f_preset.value);
    spec.g = ScalarField(line, 0.0);
    spec.g[0] = c.g_preset.value;
    spec.g[line.n[0] - 1] = 0.0;

    const SolveResult r = solve_peps(spec, c.solve);

    ScalarField out(g);
    for (int idx = 0; idx < g.node_count(); ++idx) {
        const auto coords = g.coords(idx);
        out[idx] = r.u[coords[0]];
    }
    return out;
}

/// Builds the full problem instance from a parsed config. In dry mode the
/// strip boundary is replaced by its constant left value, so validation never
/// solves anything.
inline ProblemSpec build_problem(const RunConfig& c, double eps, bool dry = false) {
    ProblemSpec spec;
    spec.grid = c.grid;
    spec.deg.p = c.p;
    spec.deg.q = c.q;
    spec.deg.L1 = c.L1;
    spec.deg.L2 = c.L2;
    spec.deg.a = build_field(c.a_preset, c.grid);
    spec.op = c.op;
    spec.reaction.eps = eps;
    spec.reaction.Q = build_field(c.q_preset, c.grid);
    spec.reaction.f = build_field(c.f_preset, c.grid);
    if (c.g_preset.kind == FieldPreset::Kind::Strip) {
        if (dry) {
            FieldPreset flat = FieldPreset::constant(c.g_preset.value);
            spec.g = build_field(flat, c.grid);
            require(c.a_preset.kind == FieldPreset::Kind::Constant &&
                        c.q_preset.kind == FieldPreset::Kind::Constant &&
                        c.f_preset.kind == FieldPreset::Kind::Constant,
                    "boundary strip preset requires constant a, Q and f");
        } else {
            spec.g = make_strip_boundary(c, eps);
        }
    } else {
        spec.g = build_field(c.g_preset, c.grid);
    }
    return spec;
}

/// Semantic validation with collected (never fail-fast) diagnostics. Mirrors
/// every rejection the run path performs for validation reasons.
inline std::vector<std::string> validate_config(const RunConfig& c) {
    std::vector<std::string> errs;
    auto guard = [&](const std::function<void()>& fn, const std::string& where) {
        try {
            fn();
        } catch (const std::exception& e) {
            errs.push_back(where + ": " + e.what());
        }
    };

    if (c.subcommand == "solve" || c.subcommand == "sweep" || c.subcommand == "validate") {
        if (c.p <= 0.0) errs.push_back("degeneracy.p: must be positive");
        if (c.q < c.p) errs.push_back("degeneracy.q: must be >= p");
        if (c.L1 <= 0.0 || c.L2 < c.L1) errs.push_back("degeneracy: need 0 < L1 <= L2");
        guard([&] { c.op.validate(); }, "operator");
        if (c.eps <= 0.0 && c.eps_list.empty()) errs.push_back("reaction.eps: must be positive");

        const double hmax = c.grid.dim == 2 ? std::max(c.grid.h[0], c.grid.h[1]) : c.grid.h[0];
        std::vector<double> eps_all = c.eps_list.empty() ? std::vector<double>{c.eps} : c.eps_list;
        for (double e : eps_all)
            if (e < 4.0 * hmax * (1.0 - 1e-12))
                errs.push_back("reaction.eps: eps = " + std::to_string(e) +
                               " < 4h; the transition layer is unresolvable on this grid");
        for (std::size_t k = 1; k < c.eps_list.size(); ++k)
            if (c.eps_list[k] > c.eps_list[k - 1] * (1.0 + 1e-12))
                errs.push_back("sweep.eps_list: must be descending");

        guard(
            [&] {
                ProblemSpec spec = build_problem(c, eps_all.front(), /*dry=*/true);
                spec.validate();
                // certification is executed and reported, not enforced: zero
                // reactions are legitimate solver inputs
                certify(spec.reaction, 0.25, 0.75);
            },
            "problem");
    }

    if (c.subcommand == "barrier" || c.subcommand == "validate") {
        if (c.barrier.t0 <= 0.0 || c.barrier.t0 >= c.barrier.T0 || c.barrier.T0 >= 1.0)
            errs.push_back("barrier: need 0 < t0 < T0 < 1");
        if (c.barrier.Istar <= 0.0) errs.push_back("barrier.Istar: must be positive");
        if (errs.empty())
            guard(
                [&] {
                    select_params(c.barrier.dim, c.barrier.lambda, c.barrier.Lambda, c.barrier.L1,
                                  c.barrier.L2, c.barrier.p, c.barrier.q, c.barrier.a_sup,
                                  c.barrier.t0, c.barrier.T0, c.barrier.Istar, c.barrier.L);
                },
                "barrier");
    }

    if (c.subcommand == "oned") {
        if (c.oned.p <= 0.0) errs.push_back("oned.p: must be positive");
        if (c.oned.q < c.oned.p) errs.push_back("oned.q: must be >= p");
        if (c.oned.kappa < 0.0) errs.push_back("oned.kappa: must be >= 0");
        if (c.oned.eps <= 0.0) errs.push_back("oned.eps: must be positive");
        if (c.oned.eps < 4.0 * c.oned.h * (1.0 - 1e-12))
            errs.push_back("oned: eps < 4h; the transition layer is unresolvable");
        if (c.oned.g0 <= 0.0) errs.push_back("oned.g0: must be positive");
    }

    if (c.subcommand == "geometry") {
        if (c.field_csv.empty()) errs.push_back("geometry.field_csv: required");
        if (c.eps <= 0.0) errs.push_back("geometry.eps: must be positive");
    }

    return errs;
}

}  // namespace degenfb
