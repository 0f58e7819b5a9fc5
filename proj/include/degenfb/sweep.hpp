#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "degenfb/geometry.hpp"
#include "degenfb/solver.hpp"

namespace degenfb {

struct SweepEntry {
    double eps = 0.0;
    SolveResult result;
    GeometryReport geometry;
};

struct SweepResult {
    std::vector<SweepEntry> entries;
    std::vector<double> sup_differences;                   // ||u_k - u_{k+1}||_inf
    std::vector<std::optional<double>> hausdorff_between;  // between {u > c1 eps} sets
};

/// Solves a descending list of eps values, each warm-started from the
/// previous solution, and measures the geometry after every solve. Requires
/// every eps to resolve the transition layer: eps >= 4h.
///
/// boundary_for_eps, when set, regenerates the boundary datum per eps (the
/// strip preset ties the side profile to the layer position). init_for_eps,
/// when set, supplies a per-eps starting field that takes precedence over
/// the previous-eps warm start (the strip preset's one-dimensional extension
/// already solves the 2D system exactly).
inline SweepResult eps_sweep(ProblemSpec spec, const SolveConfig& cfg,
                             const std::vector<double>& eps_list, const GeometryConfig& geo,
                             const std::function<ScalarField(double)>& boundary_for_eps = {},
                             const std::function<ScalarField(double)>& init_for_eps = {}) {
    require(!eps_list.empty(), "eps_sweep: empty eps list");
    const double hmax = spec.grid.dim == 2 ? std::max(spec.grid.h[0], spec.grid.h[1])
                                           : spec.grid.h[0];
    for (std::size_t k = 0; k < eps_list.size(); ++k) {
        require(eps_list[k] >= 4.0 * hmax * (1.0 - 1e-12),
                "eps_sweep: eps < 4h, the transition layer is unresolvable");
        if (k > 0)
            require(eps_list[k] <= eps_list[k - 1] * (1.0 + 1e-12),
                    "eps_sweep: eps list must be descending");
    }

    SweepResult sweep;
    const ScalarField* warm = nullptr;
    for (std::size_t k = 0; k < eps_list.size(); ++k) {
        spec.reaction.eps = eps_list[k];
        if (boundary_for_eps) spec.g = boundary_for_eps(eps_list[k]);
        SweepEntry entry;
        entry.eps = eps_list[k];
        if (init_for_eps) {
            const ScalarField start = init_for_eps(eps_list[k]);
            entry.result = solve_peps(spec, cfg, &start);
        } else {
            entry.result = solve_peps(spec, cfg, warm);
        }
        entry.geometry = measure_geometry(entry.result.u, entry.eps, geo);
        sweep.entries.push_back(std::move(entry));
        warm = &sweep.entries.back().result.u;
    }

    for (std::size_t k = 0; k + 1 < sweep.entries.size(); ++k) {
        const ScalarField& a = sweep.entries[k].result.u;
        const ScalarField& b = sweep.entries[k + 1].result.u;
        double d = 0.0;
        for (int idx = 0; idx < a.grid.node_count(); ++idx)
            d = std::max(d, std::fabs(a[idx] - b[idx]));
        sweep.sup_differences.push_back(d);

        std::vector<char> ma(static_cast<std::size_t>(a.grid.node_count()), 0);
        std::vector<char> mb(static_cast<std::size_t>(a.grid.node_count()), 0);
        bool any_a = false, any_b = false;
        for (int idx = 0; idx < a.grid.node_count(); ++idx) {
            if (a[idx] > geo.c1 * sweep.entries[k].eps) {
                ma[static_cast<std::size_t>(idx)] = 1;
                any_a = true;
            }
            if (b[idx] > geo.c1 * sweep.entries[k + 1].eps) {
                mb[static_cast<std::size_t>(idx)] = 1;
                any_b = true;
            }
        }
        if (any_a && any_b)
            sweep.hausdorff_between.push_back(hausdorff_distance(a.grid, ma, mb));
        else
            sweep.hausdorff_between.push_back(std::nullopt);
    }
    return sweep;
}

}  // namespace degenfb
