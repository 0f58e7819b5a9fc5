#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "degenfb/common.hpp"
#include "degenfb/grid.hpp"
#include "degenfb/operators.hpp"
#include "degenfb/reaction.hpp"

namespace degenfb {

/// Full instance of the singularly perturbed one-phase problem
///   H(x, grad u) F(D^2 u) = zeta_eps(x, u) in Omega,  u = g on the boundary,
/// plus two synthetic routes used by checks: a constant right-hand side
/// (rhs_mode = Constant) and unit diffusion H == 1 (the pure F route).
struct ProblemSpec {
    enum class RhsMode { Reaction, Constant };

    Grid grid;
    DegeneracyParams deg;
    OperatorKind op;
    ReactionParams reaction;
    ScalarField g;  // boundary datum; interior entries ignored

    RhsMode rhs_mode = RhsMode::Reaction;
    double rhs_value = 0.0;     // Constant mode only
    bool unit_diffusion = false;

    void validate() const {
        require(grid.node_count() > 0, "spec: empty grid");
        deg.validate();
        op.validate();
        require(deg.a.grid == grid, "spec: modulating field lives on a different grid");
        require(g.grid == grid, "spec: boundary field lives on a different grid");
        if (rhs_mode == RhsMode::Reaction) {
            require(reaction.Q.grid == grid && reaction.f.grid == grid,
                    "spec: reaction fields live on a different grid");
            require(reaction.eps > 0.0, "spec: reaction eps must be positive");
            for (double x : reaction.Q.v) require(x >= 0.0, "spec: Q must be nonnegative");
            for (double x : reaction.f.v) require(x >= 0.0, "spec: f must be nonnegative");
        }
        for (int idx = 0; idx < grid.node_count(); ++idx)
            if (grid.boundary(idx)) require(g[idx] >= 0.0, "spec: boundary datum must be >= 0");
    }

    double sup_boundary_g() const {
        double m = 0.0;
        for (int idx = 0; idx < grid.node_count(); ++idx)
            if (grid.boundary(idx)) m = std::max(m, g[idx]);
        return m;
    }

    /// inf of the right-hand side over Omega x [0, infinity): the singular
    /// part vanishes for t >= eps, so only f survives.
    double rhs_infimum() const {
        if (rhs_mode == RhsMode::Constant) return rhs_value;
        double m = std::numeric_limits<double>::infinity();
        for (double x : reaction.f.v) m = std::min(m, x);
        return m;
    }
};

struct SolveConfig {
    double cfl = 0.4;           // explicit-step safety factor
    double tol = 1e-8;          // sup-norm threshold on the projected residual
    long max_iter = 1000000;
    bool project_nonneg = true; // one-phase floor u := max(u, 0)
    int threads = 0;            // 0 = library default; affects speed only

    void validate() const {
        require(cfl > 0.0 && cfl < 1.0, "solve config: cfl must lie in (0,1)");
        require(tol > 0.0, "solve config: tol must be positive");
        require(max_iter > 0, "solve config: max_iter must be positive");
    }
};

struct SolveResult {
    ScalarField u;
    long iterations = 0;
    double final_residual = 0.0;
    long monotone_violations = 0;  // iterations where sup u rose beyond 1e-12
    bool converged = false;
    double dt_last = 0.0;
};

namespace detail {

/// |g|^e given the squared magnitude g2 = |g|^2, fast paths for the common
/// exponents.
inline double pow_half(double g2, double e) {
    if (e == 1.0) return std::sqrt(g2);
    if (e == 2.0) return g2;
    if (e == 0.5) return std::sqrt(std::sqrt(g2));
    if (e == 3.0) return g2 * std::sqrt(g2);
    if (g2 == 0.0) return 0.0;
    return std::pow(g2, 0.5 * e);
}

struct StepScratch {
    std::vector<double> next;
    double sup_residual = 0.0;
    double sup_u = 0.0;
};

/// One Jacobi sweep: reads u, writes scratch.next on interior nodes
/// (boundary entries are preserved). Returns the sup of the projected
/// residual |P(u + dt R) - u| / dt and the new global sup of u. Each node
/// depends on the previous iterate only, so the sweep parallelizes with
/// bit-identical results for any thread count.
template <OperatorKind::Kind K>
void jacobi_sweep(const ProblemSpec& spec, const ScalarField& u, double dt, bool project,
                  StepScratch& sc) {
    const Grid& g = spec.grid;
    const int nx = g.n[0];
    const int ny = g.dim == 2 ? g.n[1] : 1;
    const double inv2hx = 1.0 / (2.0 * g.h[0]);
    const double invhx2 = 1.0 / (g.h[0] * g.h[0]);
    const double inv2hy = g.dim == 2 ? 1.0 / (2.0 * g.h[1]) : 0.0;
    const double invhy2 = g.dim == 2 ? 1.0 / (g.h[1] * g.h[1]) : 0.0;
    const double invcross = g.dim == 2 ? 1.0 / (4.0 * g.h[0] * g.h[1]) : 0.0;
    const double inv_dt = 1.0 / dt;
    const double p = spec.deg.p, q = spec.deg.q;
    const double lam = spec.op.lambda, Lam = spec.op.Lambda;
    const int m = spec.op.m;
    const bool unit_h = spec.unit_diffusion;
    const bool const_rhs = spec.rhs_mode == ProblemSpec::RhsMode::Constant;
    const double rhs_const = spec.rhs_value;
    const double eps = spec.reaction.eps;
    const double inv_eps = const_rhs ? 0.0 : 1.0 / eps;
    const double bump_c = const_rhs ? 0.0 : bump_profile::normalization();
    const double* uv = u.v.data();
    const double* av = spec.deg.a.v.data();
    const double* Qv = const_rhs ? nullptr : spec.reaction.Q.v.data();
    const double* fv = const_rhs ? nullptr : spec.reaction.f.v.data();
    double* out = sc.next.data();

    double res_max = 0.0;
    double u_max = 0.0;

    // Parallel sweeps only pay off on large grids; the per-iteration region
    // launch dominates small (1D) problems.
    const bool parallel = g.node_count() >= 4096;

#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(max : res_max) reduction(max : u_max) \
    if (parallel)
#else
    (void)parallel;
#endif
    for (int j = (g.dim == 2 ? 1 : 0); j < (g.dim == 2 ? ny - 1 : 1); ++j) {
        const int row = j * nx;
        for (int i = 1; i < nx - 1; ++i) {
            const int idx = row + i;
            const double uc = uv[idx];
            const double ue = uv[idx + 1];
            const double uw = uv[idx - 1];

            // gradient magnitude squared and second differences
            double gxc = (ue - uw) * inv2hx;
            double g2 = gxc * gxc;
            double dxx = (ue - 2.0 * uc + uw) * invhx2;
            double dyy = 0.0, dxy = 0.0;
            if (g.dim == 2) {
                const double un = uv[idx + nx];
                const double us = uv[idx - nx];
                const double gyc = (un - us) * inv2hy;
                g2 += gyc * gyc;
                dyy = (un - 2.0 * uc + us) * invhy2;
                if constexpr (K == OperatorKind::Kind::PucciPlus ||
                              K == OperatorKind::Kind::PucciMinus ||
                              K == OperatorKind::Kind::HessianFm) {
                    dxy = (uv[idx + nx + 1] + uv[idx - nx - 1] - uv[idx - nx + 1] -
                           uv[idx + nx - 1]) *
                          invcross;
                }
            }

            double fval;
            if constexpr (K == OperatorKind::Kind::Laplacian) {
                fval = dxx + dyy;
            } else {
                double e1 = dxx, e2 = dyy;
                if (g.dim == 2) {
                    const double mean = 0.5 * (dxx + dyy);
                    const double disc = std::sqrt(0.25 * (dxx - dyy) * (dxx - dyy) + dxy * dxy);
                    e1 = mean - disc;
                    e2 = mean + disc;
                }
                if constexpr (K == OperatorKind::Kind::PucciPlus) {
                    fval = (e1 > 0.0 ? Lam * e1 : lam * e1);
                    if (g.dim == 2) fval += (e2 > 0.0 ? Lam * e2 : lam * e2);
                } else if constexpr (K == OperatorKind::Kind::PucciMinus) {
                    fval = (e1 > 0.0 ? lam * e1 : Lam * e1);
                    if (g.dim == 2) fval += (e2 > 0.0 ? lam * e2 : Lam * e2);
                } else {
                    fval = odd_root(1.0 + odd_pow(e1, m), m) - 1.0;
                    if (g.dim == 2) fval += odd_root(1.0 + odd_pow(e2, m), m) - 1.0;
                }
            }

            const double hval = unit_h ? 1.0 : pow_half(g2, p) + av[idx] * pow_half(g2, q);

            double rhs;
            if (const_rhs) {
                rhs = rhs_const;
            } else {
                rhs = fv[idx];
                if (uc < eps) {
                    const double s = uc <= 0.0 ? 0.0 : uc * inv_eps;
                    if (s > 0.0 && s < 1.0)
                        rhs += Qv[idx] * inv_eps * bump_c * std::exp(-1.0 / (s * (1.0 - s)));
                }
            }

            double unew = uc + dt * (hval * fval - rhs);
            if (project && unew < 0.0) unew = 0.0;
            out[idx] = unew;
            const double r = std::fabs(unew - uc) * inv_dt;
            if (r > res_max) res_max = r;
            if (unew > u_max) u_max = unew;
        }
    }
    sc.sup_residual = res_max;
    sc.sup_u = u_max;
}

inline void dispatch_sweep(const ProblemSpec& spec, const ScalarField& u, double dt, bool project,
                           StepScratch& sc) {
    switch (spec.op.kind) {
        case OperatorKind::Kind::Laplacian:
            jacobi_sweep<OperatorKind::Kind::Laplacian>(spec, u, dt, project, sc);
            break;
        case OperatorKind::Kind::PucciPlus:
            jacobi_sweep<OperatorKind::Kind::PucciPlus>(spec, u, dt, project, sc);
            break;
        case OperatorKind::Kind::PucciMinus:
            jacobi_sweep<OperatorKind::Kind::PucciMinus>(spec, u, dt, project, sc);
            break;
        case OperatorKind::Kind::HessianFm:
            jacobi_sweep<OperatorKind::Kind::HessianFm>(spec, u, dt, project, sc);
            break;
    }
}

inline double max_gradient(const ProblemSpec& spec, const ScalarField& u) {
    const Grid& g = spec.grid;
    double gmax = 0.0;
    for (int j = (g.dim == 2 ? 1 : 0); j < (g.dim == 2 ? g.n[1] - 1 : 1); ++j)
        for (int i = 1; i < g.n[0] - 1; ++i) {
            const int idx = g.index(i, j);
            const double gx = (u[idx + 1] - u[idx - 1]) / (2.0 * g.h[0]);
            double g2 = gx * gx;
            if (g.dim == 2) {
                const double gy = (u[idx + g.n[0]] - u[idx - g.n[0]]) / (2.0 * g.h[1]);
                g2 += gy * gy;
            }
            gmax = std::max(gmax, g2);
        }
    return std::sqrt(gmax);
}

/// Explicit step size: parabolic bound from H at the current max gradient,
/// plus the explicit-reaction Lipschitz cap (the singular term has slope up
/// to ||Q|| Lip(zeta) / eps^2 in u). H is floored at its unit-gradient value
/// so flat starts with a nonzero right-hand side still step at a stable
/// parabolic scale instead of dt -> infinity.
inline double compute_dt(const ProblemSpec& spec, const SolveConfig& cfg, double gmax) {
    const double a_max = spec.deg.a_sup();
    double h_max = 1.0;
    if (!spec.unit_diffusion) {
        h_max = pow_abs(gmax, spec.deg.p) + a_max * pow_abs(gmax, spec.deg.q);
        h_max = std::max(h_max, 1.0 + a_max);
    }
    const double h_min_sq = spec.grid.dim == 2
                                ? std::min(spec.grid.h[0] * spec.grid.h[0],
                                           spec.grid.h[1] * spec.grid.h[1])
                                : spec.grid.h[0] * spec.grid.h[0];
    const double parab = 2.0 * spec.grid.dim * spec.op.Lambda * h_max / h_min_sq;
    double lip = 0.0;
    if (spec.rhs_mode == ProblemSpec::RhsMode::Reaction) {
        double qmax = 0.0;
        for (double x : spec.reaction.Q.v) qmax = std::max(qmax, x);
        lip = qmax * bump_lipschitz() / (spec.reaction.eps * spec.reaction.eps);
    }
    return cfg.cfl / (parab + lip);
}

/// Natural size of the right-hand side; residual tolerances are interpreted
/// relative to it ("scaled units").
inline double forcing_scale(const ProblemSpec& spec) {
    if (spec.rhs_mode == ProblemSpec::RhsMode::Constant)
        return std::max(1.0, std::fabs(spec.rhs_value));
    return std::max(1.0, spec.reaction.bound_amplitude() / spec.reaction.eps +
                             spec.reaction.bound_upper());
}

inline void check_finite_or_throw(const ScalarField& u, long iter) {
    for (int idx = 0; idx < u.grid.node_count(); ++idx)
        if (!std::isfinite(u[idx]))
            throw numerical_error("solver: non-finite value at node " + std::to_string(idx) +
                                  " after iteration " + std::to_string(iter));
}

}  // namespace detail

/// Pseudo-time descent to steady state from a given starting field.
/// Boundary rows of `start` must already carry g. Explicit Euler with the
/// step size refreshed every 100 iterations; Jacobi updates, so results are
/// independent of the parallel schedule.
inline SolveResult descend(const ProblemSpec& spec, const SolveConfig& cfg, ScalarField start) {
    spec.validate();
    cfg.validate();
#ifdef _OPENMP
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif

    SolveResult res;
    res.u = std::move(start);
    detail::StepScratch sc;
    sc.next = res.u.v;

    double sup_prev = -std::numeric_limits<double>::infinity();
    for (int idx = 0; idx < spec.grid.node_count(); ++idx)
        sup_prev = std::max(sup_prev, res.u[idx]);
    const double sup_bdry = spec.sup_boundary_g();
    const double scale = detail::forcing_scale(spec);

    double dt = detail::compute_dt(spec, cfg, detail::max_gradient(spec, res.u));
    std::vector<double> residual_trace;

    long iter = 0;
    for (; iter < cfg.max_iter; ++iter) {
        if (iter % 100 == 0 && iter > 0) {
            detail::check_finite_or_throw(res.u, iter);
            dt = detail::compute_dt(spec, cfg, detail::max_gradient(spec, res.u));
        }
        detail::dispatch_sweep(spec, res.u, dt, cfg.project_nonneg, sc);
        res.final_residual = sc.sup_residual / scale;

        // A start that already satisfies the equation is returned untouched:
        // zero iterations past the initializer.
        if (iter == 0 && res.final_residual <= cfg.tol) {
            res.converged = true;
            break;
        }
        res.u.v.swap(sc.next);

        const double sup_now = std::max(sc.sup_u, sup_bdry);
        if (sup_now > sup_prev + 1e-12) ++res.monotone_violations;
        sup_prev = sup_now;

        if (iter % 1000 == 0) residual_trace.push_back(res.final_residual);
        if (res.final_residual <= cfg.tol) {
            res.converged = true;
            ++iter;
            break;
        }
    }
    res.iterations = iter;
    res.dt_last = dt;
    if (!res.converged) {
        std::string trace;
        const std::size_t k0 = residual_trace.size() > 5 ? residual_trace.size() - 5 : 0;
        for (std::size_t k = k0; k < residual_trace.size(); ++k)
            trace += " " + std::to_string(residual_trace[k]);
        throw numerical_error("solver: no convergence within " + std::to_string(cfg.max_iter) +
                              " iterations; residual trace:" + trace +
                              " final=" + std::to_string(res.final_residual));
    }
    return res;
}

/// Field equal to g on the boundary and `fill` inside.
inline ScalarField with_boundary(const ProblemSpec& spec, double fill) {
    ScalarField u(spec.grid, fill);
    for (int idx = 0; idx < spec.grid.node_count(); ++idx)
        if (spec.grid.boundary(idx)) u[idx] = spec.g[idx];
    return u;
}

/// Supersolution start: solves the eps-free problem  G(u) = inf zeta  with
/// the same boundary datum. Since the right-hand side is a lower bound for
/// zeta_eps, the result dominates solutions of the full problem at the
/// discrete level.
///
/// Two stages. First the pure second-order problem F(D^2 u) = 0 with unit
/// diffusion, whose explicit step is gradient-independent (the constant
/// start has a boundary jump that would otherwise pin dt through H). Its
/// solution satisfies G = H * F = 0 <= inf zeta, so it is a supersolution of
/// the eps-free problem as well, and the second stage descends G = inf zeta
/// from there.
inline ScalarField supersolution_init(const ProblemSpec& spec, const SolveConfig& cfg) {
    ProblemSpec pure = spec;
    pure.rhs_mode = ProblemSpec::RhsMode::Constant;
    pure.rhs_value = 0.0;
    pure.unit_diffusion = true;
    ScalarField u0 = descend(pure, cfg, with_boundary(pure, pure.sup_boundary_g())).u;

    ProblemSpec aux = spec;
    aux.rhs_mode = ProblemSpec::RhsMode::Constant;
    aux.rhs_value = spec.rhs_infimum();
    if (aux.unit_diffusion && aux.rhs_value == 0.0) return u0;
    return descend(aux, cfg, std::move(u0)).u;
}

/// Solve the discrete problem by monotone descent from a supersolution
/// (or from the provided warm start).
inline SolveResult solve_peps(const ProblemSpec& spec, const SolveConfig& cfg,
                              const ScalarField* warm_start = nullptr) {
    ScalarField u0 = warm_start ? *warm_start : supersolution_init(spec, cfg);
    // re-impose the boundary datum (warm starts may come from another eps)
    for (int idx = 0; idx < spec.grid.node_count(); ++idx)
        if (spec.grid.boundary(idx)) u0[idx] = spec.g[idx];
    return descend(spec, cfg, std::move(u0));
}

struct ComparisonResult {
    bool pass = true;
    double worst_violation = 0.0;
    int worst_node = -1;
};

/// Discrete comparison: sub <= sup + tol at every node. Callers pair it with
/// solves whose right-hand sides are ordered pointwise.
inline ComparisonResult comparison_check(const ScalarField& sub, const ScalarField& sup,
                                         double tol) {
    require(sub.grid == sup.grid, "comparison_check: grids differ");
    ComparisonResult c;
    for (int idx = 0; idx < sub.grid.node_count(); ++idx) {
        const double viol = sub[idx] - sup[idx];
        if (viol > c.worst_violation) {
            c.worst_violation = viol;
            c.worst_node = idx;
        }
    }
    c.pass = c.worst_violation <= tol;
    return c;
}

struct CuttingResult {
    bool pass = false;
    double sup_difference = 0.0;
    SolveResult degenerate;
    SolveResult pure;
};

/// With zero reaction, solutions of H(x, grad u) F(D^2 u) = 0 must agree with
/// solutions of F(D^2 u) = 0: solve both routes with identical data and
/// compare in sup norm against 10 * tol.
inline CuttingResult cutting_check(const ProblemSpec& spec, const SolveConfig& cfg) {
    if (spec.rhs_mode == ProblemSpec::RhsMode::Constant) {
        require(spec.rhs_value == 0.0, "cutting_check: right-hand side must vanish");
    } else {
        for (double x : spec.reaction.Q.v)
            require(x == 0.0, "cutting_check: requires Q == 0");
        for (double x : spec.reaction.f.v)
            require(x == 0.0, "cutting_check: requires f == 0");
    }
    CuttingResult r;
    ProblemSpec deg_spec = spec;
    deg_spec.rhs_mode = ProblemSpec::RhsMode::Constant;
    deg_spec.rhs_value = 0.0;
    ProblemSpec pure_spec = deg_spec;
    pure_spec.unit_diffusion = true;

    r.degenerate = solve_peps(deg_spec, cfg);
    r.pure = solve_peps(pure_spec, cfg);
    for (int idx = 0; idx < spec.grid.node_count(); ++idx)
        r.sup_difference =
            std::max(r.sup_difference, std::fabs(r.degenerate.u[idx] - r.pure.u[idx]));
    r.pass = r.sup_difference <= 10.0 * cfg.tol;
    return r;
}

}  // namespace degenfb
