#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>
#include <utility>
#include <vector>

#include "degenfb/common.hpp"
#include "degenfb/grid.hpp"

namespace degenfb {

namespace detail {

inline std::array<int, 2> margin_offsets(const Grid& g, double margin) {
    std::array<int, 2> off{1, 1};
    for (int k = 0; k < g.dim; ++k) {
        off[k] = std::max(1, static_cast<int>(std::lround(margin / g.h[k])));
        require(2 * off[k] < g.n[k] - 1, "geometry: margin consumes the whole grid");
    }
    return off;
}

inline bool ball_inside(const Grid& g, const std::array<double, 2>& c, double rho) {
    for (int k = 0; k < g.dim; ++k)
        if (c[k] - rho < g.lo[k] || c[k] + rho > g.hi[k]) return false;
    return true;
}

/// Deterministic subsample of at most `want` entries.
inline std::vector<int> subsample(const std::vector<int>& pool, int want, Rng& rng) {
    if (static_cast<int>(pool.size()) <= want) return pool;
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(want));
    // Floyd's algorithm over indices keeps the draw order-independent of pool size.
    std::set<std::uint64_t> chosen;
    const std::uint64_t n = pool.size();
    for (std::uint64_t j = n - static_cast<std::uint64_t>(want); j < n; ++j) {
        std::uint64_t t = rng.below(j + 1);
        if (!chosen.insert(t).second) chosen.insert(j);
    }
    for (std::uint64_t k : chosen) out.push_back(pool[static_cast<std::size_t>(k)]);
    return out;
}

}  // namespace detail

/// Max of |grad u| over nodes at least `margin` inside the domain.
inline double lipschitz_norm(const ScalarField& u, double margin) {
    const Grid& g = u.grid;
    const auto off = detail::margin_offsets(g, margin);
    double best = 0.0;
    bool any = false;
    for (int idx = 0; idx < g.node_count(); ++idx) {
        const auto c = g.coords(idx);
        if (!g.interior(c[0], c[1], std::max(off[0], g.dim == 2 ? off[1] : off[0]))) continue;
        any = true;
        best = std::max(best, gradient_norm_at(u, idx));
    }
    require(any, "lipschitz_norm: margin consumes the whole grid");
    return best;
}

struct GrowthResult {
    double min_ratio = std::numeric_limits<double>::infinity();
    int arg_node = -1;
    int qualifying = 0;
};

/// Linear growth away from the layer: min over nodes with
/// d_eps >= threshold * eps (inside the margin) of u / d_eps, where d_eps is
/// the exact distance to {u <= eps}.
inline GrowthResult growth_ratio(const ScalarField& u, double eps, double threshold,
                                 double margin) {
    const Grid& g = u.grid;
    std::vector<char> low(static_cast<std::size_t>(g.node_count()), 0);
    bool any_low = false;
    for (int idx = 0; idx < g.node_count(); ++idx)
        if (u[idx] <= eps) {
            low[static_cast<std::size_t>(idx)] = 1;
            any_low = true;
        }
    require(any_low, "growth_ratio: {u <= eps} is empty");
    const ScalarField dist = dist_to_set(g, low);

    const auto off = detail::margin_offsets(g, margin);
    GrowthResult r;
    for (int idx = 0; idx < g.node_count(); ++idx) {
        const auto c = g.coords(idx);
        if (!g.interior(c[0], c[1], std::max(off[0], g.dim == 2 ? off[1] : off[0]))) continue;
        if (dist[idx] <= 0.0 || dist[idx] < threshold * eps) continue;
        ++r.qualifying;
        const double ratio = u[idx] / dist[idx];
        if (ratio < r.min_ratio) {
            r.min_ratio = ratio;
            r.arg_node = idx;
        }
    }
    require(r.qualifying > 0, "growth_ratio: no far-field positivity nodes");
    return r;
}

struct NondegResult {
    double lower_min = std::numeric_limits<double>::infinity();  // min sup_B u / rho
    double upper_max = 0.0;  // max sup_B u / (rho + u(x0))
    int samples = 0;
};

/// Strong non-degeneracy: over sampled centers in {u > eps} within the
/// margin, with B_rho inside the domain, report the extremal ratios of the
/// two-sided bound  c rho <= sup_{B_rho} u <= c^{-1} (rho + u(x0)).
inline NondegResult strong_nondegeneracy(const ScalarField& u, double eps,
                                         const std::vector<double>& radii, double margin,
                                         int samples, std::uint64_t seed) {
    const Grid& g = u.grid;
    const auto off = detail::margin_offsets(g, margin);
    NondegResult r;
    Rng rng(seed);
    for (double rho : radii) {
        std::vector<int> pool;
        for (int idx = 0; idx < g.node_count(); ++idx) {
            const auto c = g.coords(idx);
            if (!g.interior(c[0], c[1], std::max(off[0], g.dim == 2 ? off[1] : off[0]))) continue;
            if (u[idx] <= eps) continue;
            if (!detail::ball_inside(g, g.point(idx), rho)) continue;
            pool.push_back(idx);
        }
        for (int idx : detail::subsample(pool, samples, rng)) {
            const double s = ball_sup(u, g.point(idx), rho);
            r.lower_min = std::min(r.lower_min, s / rho);
            r.upper_max = std::max(r.upper_max, s / (rho + u[idx]));
            ++r.samples;
        }
    }
    require(r.samples > 0, "strong_nondegeneracy: no admissible centers");
    return r;
}

/// Positivity density: min over centers of the node-count fraction of
/// {u > eps} within the discrete ball B_rho.
inline double density(const ScalarField& u, double eps, double rho,
                      const std::vector<int>& centers) {
    const Grid& g = u.grid;
    require(!centers.empty(), "density: no centers");
    double worst = 1.0;
    for (int c0 : centers) {
        const auto x0 = g.point(c0);
        const double r2 = rho * rho;
        int inside = 0, positive = 0;
        for (int idx = 0; idx < g.node_count(); ++idx)
            if (dist2(g, idx, x0) <= r2) {
                ++inside;
                if (u[idx] > eps) ++positive;
            }
        require(inside > 0, "density: empty discrete ball");
        worst = std::min(worst, static_cast<double>(positive) / inside);
    }
    return worst;
}

/// Centers for density sampling: nodes of {u > eps} within the margin whose
/// ball stays inside the domain.
inline std::vector<int> density_centers(const ScalarField& u, double eps, double rho,
                                        double margin, int samples, std::uint64_t seed) {
    const Grid& g = u.grid;
    const auto off = detail::margin_offsets(g, margin);
    std::vector<int> pool;
    for (int idx = 0; idx < g.node_count(); ++idx) {
        const auto c = g.coords(idx);
        if (!g.interior(c[0], c[1], std::max(off[0], g.dim == 2 ? off[1] : off[0]))) continue;
        if (u[idx] <= eps) continue;
        if (!detail::ball_inside(g, g.point(idx), rho)) continue;
        pool.push_back(idx);
    }
    Rng rng(seed);
    return detail::subsample(pool, samples, rng);
}

struct HarnackResult {
    double max_ratio = 0.0;
    int samples = 0;
};

/// Harnack ratio on balls that touch the layer: for centers x0 in {u > eps}
/// with d = dist(x0, {u <= eps}) >= eps and B_{d/2} inside the domain,
/// sup / inf of u over B_{d/2}(x0). The ball avoids {u <= eps} by
/// construction, so a nonpositive inf means the layer leaked inside.
inline HarnackResult harnack_ratio(const ScalarField& u, double eps, double margin, int samples,
                                   std::uint64_t seed) {
    const Grid& g = u.grid;
    std::vector<char> low(static_cast<std::size_t>(g.node_count()), 0);
    bool any_low = false;
    for (int idx = 0; idx < g.node_count(); ++idx)
        if (u[idx] <= eps) {
            low[static_cast<std::size_t>(idx)] = 1;
            any_low = true;
        }
    require(any_low, "harnack_ratio: {u <= eps} is empty");
    const ScalarField dist = dist_to_set(g, low);

    const auto off = detail::margin_offsets(g, margin);
    std::vector<int> pool;
    for (int idx = 0; idx < g.node_count(); ++idx) {
        const auto c = g.coords(idx);
        if (!g.interior(c[0], c[1], std::max(off[0], g.dim == 2 ? off[1] : off[0]))) continue;
        if (u[idx] <= eps) continue;
        const double d = dist[idx];
        if (d < eps) continue;
        if (!detail::ball_inside(g, g.point(idx), 0.5 * d)) continue;
        pool.push_back(idx);
    }
    HarnackResult r;
    Rng rng(seed);
    for (int idx : detail::subsample(pool, samples, rng)) {
        const auto x0 = g.point(idx);
        const double rho = 0.5 * dist[idx];
        const double s = ball_sup(u, x0, rho);
        const double i = ball_inf(u, x0, rho);
        if (i <= 0.0)
            throw numerical_error("harnack_ratio: ball leaked across the layer at node " +
                                  std::to_string(idx));
        r.max_ratio = std::max(r.max_ratio, s / i);
        ++r.samples;
    }
    require(r.samples > 0, "harnack_ratio: no admissible centers");
    return r;
}

/// Inner boundary nodes of {u > level}: nodes in the set with an axis
/// neighbor outside. This is the stable discrete stand-in for the level set
/// {u = level}.
inline std::vector<char> level_mask(const ScalarField& u, double level) {
    const Grid& g = u.grid;
    std::vector<char> mask(static_cast<std::size_t>(g.node_count()), 0);
    for (int idx = 0; idx < g.node_count(); ++idx) {
        if (!(u[idx] > level)) continue;
        const auto c = g.coords(idx);
        bool edge = false;
        const int nbrs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (int k = 0; k < (g.dim == 2 ? 4 : 2); ++k) {
            const int ix = c[0] + nbrs[k][0];
            const int iy = c[1] + nbrs[k][1];
            if (ix < 0 || ix >= g.n[0] || (g.dim == 2 && (iy < 0 || iy >= g.n[1]))) continue;
            if (!(u[g.index(ix, iy)] > level)) {
                edge = true;
                break;
            }
        }
        if (edge) mask[static_cast<std::size_t>(idx)] = 1;
    }
    return mask;
}

/// Box-counting Hausdorff content: number of boxes of a fixed axis-aligned
/// delta-tiling (anchored at the grid corner) that contain a mask node
/// within B_rho(x0), times delta^(N-1). Upper-bounds the true content within
/// a dimensional factor.
inline double hausdorff_content(const Grid& g, const std::vector<char>& mask,
                                const std::array<double, 2>& x0, double rho, double delta) {
    require(delta >= 2.0 * g.h[0] * (1.0 - 1e-12) &&
                (g.dim == 1 || delta >= 2.0 * g.h[1] * (1.0 - 1e-12)),
            "hausdorff_content: delta must be at least 2h");
    std::set<std::pair<long, long>> boxes;
    const double r2 = rho * rho;
    for (int idx = 0; idx < g.node_count(); ++idx) {
        if (!mask[static_cast<std::size_t>(idx)]) continue;
        if (dist2(g, idx, x0) > r2) continue;
        const auto p = g.point(idx);
        const long bx = static_cast<long>(std::floor((p[0] - g.lo[0]) / delta));
        const long by = g.dim == 2 ? static_cast<long>(std::floor((p[1] - g.lo[1]) / delta)) : 0;
        boxes.insert({bx, by});
    }
    const double count = static_cast<double>(boxes.size());
    return g.dim == 2 ? count * delta : count;
}

/// Porosity by brute force: the largest delta on the grid {0.05, ..., 0.50}
/// such that every mask node x (inside the margin) and every radius r admit
/// a node y with B_{delta r}(y) inside B_r(x) and clear of the mask.
inline double porosity(const Grid& g, const std::vector<char>& mask,
                       const std::vector<double>& radii, double margin) {
    bool any = false;
    for (char m : mask)
        if (m) {
            any = true;
            break;
        }
    require(any, "porosity: mask is empty");
    const ScalarField dist = dist_to_set(g, mask);
    const auto off = detail::margin_offsets(g, margin);

    std::vector<int> mask_nodes;
    for (int idx = 0; idx < g.node_count(); ++idx) {
        if (!mask[static_cast<std::size_t>(idx)]) continue;
        const auto c = g.coords(idx);
        if (g.interior(c[0], c[1], std::max(off[0], g.dim == 2 ? off[1] : off[0])))
            mask_nodes.push_back(idx);
    }
    if (mask_nodes.empty()) return 0.0;

    double best = 0.0;
    for (int step = 1; step <= 10; ++step) {
        const double delta = 0.05 * step;
        bool all_pass = true;
        for (int xi : mask_nodes) {
            const auto cx = g.coords(xi);
            for (double r : radii) {
                const double reach = (1.0 - delta) * r;
                const int wx = static_cast<int>(std::floor(reach / g.h[0]));
                const int wy = g.dim == 2 ? static_cast<int>(std::floor(reach / g.h[1])) : 0;
                bool found = false;
                for (int dj = -wy; dj <= wy && !found; ++dj) {
                    const int jy = cx[1] + dj;
                    if (g.dim == 2 && (jy < 0 || jy >= g.n[1])) continue;
                    for (int di = -wx; di <= wx; ++di) {
                        const int jx = cx[0] + di;
                        if (jx < 0 || jx >= g.n[0]) continue;
                        const double ddx = di * g.h[0];
                        const double ddy = g.dim == 2 ? dj * g.h[1] : 0.0;
                        if (ddx * ddx + ddy * ddy > reach * reach) continue;
                        if (dist[g.index(jx, jy)] > delta * r) {
                            found = true;
                            break;
                        }
                    }
                }
                if (!found) {
                    all_pass = false;
                    break;
                }
            }
            if (!all_pass) break;
        }
        if (all_pass)
            best = delta;
        else
            break;
    }
    return best;
}

/// Symmetric Hausdorff distance between two node masks, via two exact
/// distance transforms.
inline double hausdorff_distance(const Grid& g, const std::vector<char>& a,
                                 const std::vector<char>& b) {
    const ScalarField da = dist_to_set(g, a);
    const ScalarField db = dist_to_set(g, b);
    double d_ab = 0.0, d_ba = 0.0;
    for (int idx = 0; idx < g.node_count(); ++idx) {
        if (a[static_cast<std::size_t>(idx)]) d_ab = std::max(d_ab, db[idx]);
        if (b[static_cast<std::size_t>(idx)]) d_ba = std::max(d_ba, da[idx]);
    }
    return std::max(d_ab, d_ba);
}

struct HausdorffEntry {
    double rho = 0.0;
    double delta = 0.0;
    double content = 0.0;
    double normalized = 0.0;  // content / rho^(N-1)
};

struct GeometryConfig {
    double margin = 0.1;
    double growth_threshold = 10.0;
    double c1 = 1.5;  // positivity sets are {u > c1 * eps}
    std::vector<double> nondeg_radii = {0.05, 0.1};
    double density_rho = 0.05;
    std::vector<double> content_rho = {0.1, 0.2};
    std::vector<double> content_delta = {0.025, 0.05};
    std::vector<double> porosity_radii = {0.05, 0.1};
    int samples = 200;
    std::uint64_t seed = 1;
};

/// Per-solve measurement record.
struct GeometryReport {
    double eps = 0.0;
    double lipschitz = 0.0;
    double growth_min = 0.0;
    double nondeg_min = 0.0;
    double nondeg_upper = 0.0;
    double density_min = 0.0;
    double harnack_max = 0.0;
    double porosity = 0.0;
    std::vector<HausdorffEntry> hausdorff;
    int layer_nodes = 0;
    std::array<double, 4> layer_bbox{0.0, 0.0, 0.0, 0.0};  // xmin, xmax, ymin, ymax
    double margin = 0.0;
    double growth_threshold = 0.0;
    double c1 = 0.0;
};

/// Runs the whole measurement battery on a solved field.
inline GeometryReport measure_geometry(const ScalarField& u, double eps,
                                       const GeometryConfig& cfg) {
    const Grid& g = u.grid;
    GeometryReport rep;
    rep.eps = eps;
    rep.margin = cfg.margin;
    rep.growth_threshold = cfg.growth_threshold;
    rep.c1 = cfg.c1;

    rep.lipschitz = lipschitz_norm(u, cfg.margin);
    rep.growth_min = growth_ratio(u, eps, cfg.growth_threshold, cfg.margin).min_ratio;

    const auto nd = strong_nondegeneracy(u, eps, cfg.nondeg_radii, cfg.margin, cfg.samples,
                                         cfg.seed * 2 + 1);
    rep.nondeg_min = nd.lower_min;
    rep.nondeg_upper = nd.upper_max;

    const auto centers =
        density_centers(u, eps, cfg.density_rho, cfg.margin, cfg.samples, cfg.seed * 2 + 2);
    rep.density_min = density(u, eps, cfg.density_rho, centers);

    rep.harnack_max = harnack_ratio(u, eps, cfg.margin, cfg.samples, cfg.seed * 2 + 3).max_ratio;

    const auto mask = level_mask(u, cfg.c1 * eps);
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    std::vector<int> layer_nodes;
    for (int idx = 0; idx < g.node_count(); ++idx)
        if (mask[static_cast<std::size_t>(idx)]) {
            layer_nodes.push_back(idx);
            const auto p = g.point(idx);
            xmin = std::min(xmin, p[0]);
            xmax = std::max(xmax, p[0]);
            ymin = std::min(ymin, p[1]);
            ymax = std::max(ymax, p[1]);
        }
    rep.layer_nodes = static_cast<int>(layer_nodes.size());
    require(rep.layer_nodes > 0, "measure_geometry: empty level mask");
    rep.layer_bbox = {xmin, xmax, ymin, ymax};

    // Content balls are centered on the layer node nearest the layer's
    // centroid; a deterministic choice keeps reports reproducible.
    std::array<double, 2> centroid{0.0, 0.0};
    for (int idx : layer_nodes) {
        const auto p = g.point(idx);
        centroid[0] += p[0];
        centroid[1] += p[1];
    }
    centroid[0] /= rep.layer_nodes;
    centroid[1] /= rep.layer_nodes;
    int center_node = layer_nodes.front();
    double best = std::numeric_limits<double>::infinity();
    for (int idx : layer_nodes) {
        const double d2c = dist2(g, idx, centroid);
        if (d2c < best) {
            best = d2c;
            center_node = idx;
        }
    }
    const auto x0 = g.point(center_node);
    for (double rho : cfg.content_rho)
        for (double delta : cfg.content_delta) {
            HausdorffEntry e;
            e.rho = rho;
            e.delta = delta;
            e.content = hausdorff_content(g, mask, x0, rho, delta);
            e.normalized = g.dim == 2 ? e.content / rho : e.content;
            rep.hausdorff.push_back(e);
        }

    rep.porosity = porosity(g, mask, cfg.porosity_radii, cfg.margin);
    return rep;
}

}  // namespace degenfb
