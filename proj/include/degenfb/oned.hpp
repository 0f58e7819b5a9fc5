#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "degenfb/common.hpp"
#include "degenfb/quadrature.hpp"
#include "degenfb/reaction.hpp"
#include "degenfb/solver.hpp"

namespace degenfb {

/// One-dimensional free-boundary slope law
///   s^(p+2)/(p+2) + kappa s^(q+2)/(q+2) = I,
/// with I the mass of the reaction profile and kappa the constant modulating
/// value. p = 0 is admitted here for the classical limit s = sqrt(2 I).
struct SlopeLaw {
    double p = 1.0;
    double q = 2.0;
    double kappa = 0.0;
    double I = 1.0;

    void validate() const {
        require(p >= 0.0, "slope law: p must be >= 0");
        require(q >= p, "slope law: q must be >= p");
        require(kappa >= 0.0, "slope law: kappa must be >= 0");
        require(I > 0.0, "slope law: I must be positive");
    }

    double lhs(double s) const {
        return pow_abs(s, p + 2.0) / (p + 2.0) + kappa * pow_abs(s, q + 2.0) / (q + 2.0);
    }
};

/// Unique positive root of the slope law: bisection on the strictly
/// increasing left side, then Newton polishing to machine precision (the
/// profile quadrature feeds on this root, so bisection-level noise is not
/// acceptable there).
inline double slope_from_law(const SlopeLaw& law) {
    law.validate();
    double hi = 1.0;
    while (law.lhs(hi) < law.I) hi *= 2.0;
    double s = bisect_increasing([&](double x) { return law.lhs(x); }, 0.0, hi, law.I, 1e-13);
    for (int it = 0; it < 8; ++it) {
        const double f = law.lhs(s) - law.I;
        const double df = pow_abs(s, law.p + 1.0) + law.kappa * pow_abs(s, law.q + 1.0);
        if (df <= 0.0) break;
        const double step = f / df;
        s -= step;
        if (std::fabs(step) <= 1e-16 * s) break;
    }
    return s;
}

struct ProfileResult {
    double slope_at_eps = 0.0;            // |u'| where u = eps
    std::vector<double> u_samples;        // heights
    std::vector<double> x_samples;        // positions, x = 0 at the start height
    std::vector<double> slope_samples;    // |u'|(u) along the profile
    double start_height = 0.0;            // where the x-integration begins
};

/// Slope as a function of the height u in [0, eps], from the exact first
/// integral of (|u'|^p + kappa |u'|^q) u'' = zeta_eps(u) with Q == 1, f == 0:
///   s(u)^(p+2)/(p+2) + kappa s(u)^(q+2)/(q+2) = Z(u/eps),
/// where Z is the antiderivative of the profile (the `mass` callback;
/// defaults to the smooth bump's).
inline double profile_slope(double p, double q, double kappa, double eps, double u,
                            const std::function<double(double)>& mass = {}) {
    const double z = mass ? mass(u / eps) : bump_antiderivative(u / eps);
    if (z <= 0.0) return 0.0;
    SlopeLaw law{p, q, kappa, z};
    return slope_from_law(law);
}

/// Integrates the spatial profile through the layer in the height variable:
/// dx = du / s(u) from the singular-start offset up to u = eps, by adaptive
/// quadrature. The nominal offset 1e-8 * eps guards profiles whose mass is
/// linear near zero; for the smooth bump, which vanishes to all orders, the
/// spatial tail is infinite and the slope underflows, so the start is lifted
/// to where the accumulated mass clears a fixed floor.
inline ProfileResult integrate_profile(double p, double q, double kappa, double eps,
                                       int n_samples = 33,
                                       const std::function<double(double)>& mass = {}) {
    require(eps > 0.0, "integrate_profile: eps must be positive");
    require(p > 0.0, "integrate_profile: p must be positive");
    ProfileResult res;

    auto layer_mass = [&](double u) {
        return mass ? mass(u / eps) : bump_antiderivative(u / eps);
    };
    auto slope = [&](double u) { return profile_slope(p, q, kappa, eps, u, mass); };
    res.slope_at_eps = slope(eps);

    constexpr double mass_floor = 1e-12;
    double u_start = 1e-8 * eps;
    if (layer_mass(u_start) < mass_floor) {
        double lo = u_start, hi = eps;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * eps; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (layer_mass(mid) >= mass_floor)
                hi = mid;
            else
                lo = mid;
        }
        u_start = hi;
    }
    res.start_height = u_start;

    // Integrate dx = du/s(u) under the geometric substitution
    // u = u_start * R^tau, R = eps/u_start: the transformed integrand
    // u ln(R) / s(u) stays bounded through the flat region near the start,
    // where 1/s alone spans many orders of magnitude.
    const double ratio = eps / u_start;
    const double log_ratio = std::log(ratio);
    auto tau_of = [&](double u) { return std::log(u / u_start) / log_ratio; };
    auto integrand = [&](double tau) {
        const double u = u_start * std::exp(tau * log_ratio);
        const double s = slope(u);
        if (s <= 0.0) throw numerical_error("integrate_profile: slope vanished mid-profile");
        return u * log_ratio / s;
    };

    double x = 0.0;
    double tau_prev = 0.0;
    res.u_samples.push_back(u_start);
    res.x_samples.push_back(0.0);
    res.slope_samples.push_back(slope(u_start));
    for (int k = 1; k < n_samples; ++k) {
        const double u_k = u_start + (eps - u_start) * static_cast<double>(k) / (n_samples - 1);
        const double tau_k = k == n_samples - 1 ? 1.0 : tau_of(u_k);
        x += integrate(integrand, tau_prev, tau_k, 1e-10);
        res.u_samples.push_back(u_k);
        res.x_samples.push_back(x);
        res.slope_samples.push_back(slope(u_k));
        tau_prev = tau_k;
    }
    return res;
}

struct CrossValidation {
    double law_slope = 0.0;
    double solver_slope = 0.0;
    double discrepancy = 0.0;  // relative
    SolveResult solve;
};

/// Solves the 1D two-point problem with the full solver (Q == 1, f == 0,
/// a == kappa, boundary u(0) = g0, u(length) = 0) and compares the measured
/// far-field slope with the law's root. The slope is fitted by least squares
/// over the linear band u in [2 eps, 5 eps] just outside the layer.
inline CrossValidation cross_validate(double p, double q, double kappa, double eps, double h,
                                      double g0, double length, const SolveConfig& cfg) {
    require(h > 0.0 && eps >= 4.0 * h * (1.0 - 1e-12),
            "cross_validate: eps < 4h, the layer is unresolvable");
    const int n = static_cast<int>(std::lround(length / h)) + 1;
    const Grid grid = Grid::make1d(0.0, length, n);

    ProblemSpec spec;
    spec.grid = grid;
    spec.deg.p = p;
    spec.deg.q = q > p ? q : p;
    spec.deg.a = ScalarField(grid, kappa);
    spec.op = OperatorKind::laplacian();
    spec.reaction.eps = eps;
    spec.reaction.Q = ScalarField(grid, 1.0);
    spec.reaction.f = ScalarField(grid, 0.0);
    spec.g = ScalarField(grid, 0.0);
    spec.g[0] = g0;

    CrossValidation cv;
    cv.solve = solve_peps(spec, cfg);
    cv.law_slope = slope_from_law(SlopeLaw{p, q, kappa, 1.0});

    // least-squares slope over the band
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int i = 0; i < n; ++i) {
        const double u = cv.solve.u[i];
        if (u < 2.0 * eps || u > 5.0 * eps) continue;
        const double x = grid.coord(0, i);
        sx += x;
        sy += u;
        sxx += x * x;
        sxy += x * u;
        ++cnt;
    }
    require(cnt >= 3, "cross_validate: linear band holds fewer than 3 nodes");
    const double slope = (static_cast<double>(cnt) * sxy - sx * sy) /
                         (static_cast<double>(cnt) * sxx - sx * sx);
    cv.solver_slope = std::fabs(slope);
    cv.discrepancy = std::fabs(cv.solver_slope - cv.law_slope) / cv.law_slope;
    return cv;
}

}  // namespace degenfb
