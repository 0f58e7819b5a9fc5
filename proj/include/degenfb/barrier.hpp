#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "degenfb/common.hpp"
#include "degenfb/quadrature.hpp"

namespace degenfb {

/// Radially symmetric C^{1,1} barrier profile
///
///   Theta_L(x) = t0                               for |x| <  L
///                A0 (|x| - L)^2 + t0              for L <= |x| < L + L0
///                psi(L) - phi(L) |x|^(-alpha)     for |x| >= L + L0
///
/// with L0 = sqrt((T0 - t0)/A0) and phi, psi chosen so value and first
/// derivative match at both interfaces. The profile is flat at height t0 in
/// the core, climbs to T0 across the annulus, and saturates below psi(L);
/// with the right A0 and alpha it is a pointwise supersolution of
/// H(x, grad w) * M+(D^2 w) = zeta(x, w) for every reaction bounded below by
/// Istar on [t0, T0].
struct BarrierParams {
    // levels and shape
    double t0 = 0.1;
    double T0 = 0.9;
    double A0 = 1.0;
    double alpha = 1.0;
    double L = 1.0;

    // problem data the construction was selected for
    int dim = 2;
    double lambda = 1.0;
    double Lambda = 1.0;
    double L1 = 1.0;
    double L2 = 1.0;
    double p = 1.0;
    double q = 1.0;
    double a_sup = 0.0;
    double Istar = 1.0;

    // derived, fixed at construction
    double L0 = 0.0;
    double phi = 0.0;
    double psi = 0.0;
    double kappa0 = 0.0;

    void finalize() {
        require(0.0 < t0 && t0 < T0 && T0 < 1.0, "barrier: need 0 < t0 < T0 < 1");
        require(A0 > 0.0, "barrier: A0 must be positive");
        require(lambda > 0.0 && lambda <= Lambda, "barrier: need 0 < lambda <= Lambda");
        const double alpha_min = (dim - 1) * Lambda / lambda - 1.0;
        require(alpha >= alpha_min - 1e-12, "barrier: alpha below the admissible range");
        L0 = std::sqrt((T0 - t0) / A0);
        require(L >= L0 * (1.0 - 1e-12), "barrier: need L >= L0");
        const double edge = L + L0;
        phi = (2.0 / alpha) * std::sqrt((T0 - t0) * A0) * std::pow(edge, 1.0 + alpha);
        psi = T0 + phi * std::pow(edge, -alpha);
        kappa0 = (1.0 / alpha) * std::pow(2.0, -(alpha + 1.0)) * std::sqrt(A0 * (T0 - t0));
    }

    double outer_edge() const { return L + L0; }
};

/// Left-hand side of the annulus supersolution budget as a function of A0:
///   4 A0 N Lambda L2 [ (2 sqrt(A0 dT))^p + a_sup (2 sqrt(A0 dT))^q ],
/// strictly increasing in A0 with limit 0 at 0+.
inline double barrier_budget(double A0, int dim, double Lambda, double L2, double p, double q,
                             double a_sup, double dT) {
    const double gq = 2.0 * std::sqrt(A0 * dT);  // gradient bound on the annulus
    return 4.0 * A0 * dim * Lambda * L2 * (pow_abs(gq, p) + a_sup * pow_abs(gq, q));
}

/// Selects alpha and the largest admissible curvature constant A0 for the
/// given data: alpha = max((N-1) Lambda/lambda - 1, 1), and A0 the root of
/// barrier_budget(A0) = Istar by bisection (the left side is strictly
/// increasing and vanishes at 0+, so the root exists and is unique). L, if
/// not positive, defaults to L0.
inline BarrierParams select_params(int dim, double lambda, double Lambda, double L1, double L2,
                                   double p, double q, double a_sup, double t0, double T0,
                                   double Istar, double L = -1.0) {
    require(Istar > 0.0, "select_params: Istar must be positive");
    require(0.0 < t0 && t0 < T0 && T0 < 1.0, "select_params: need 0 < t0 < T0 < 1");
    require(lambda > 0.0 && lambda <= Lambda, "select_params: need 0 < lambda <= Lambda");
    require(p > 0.0 && p <= q, "select_params: need 0 < p <= q");
    require(a_sup >= 0.0 && L2 >= L1 && L1 > 0.0, "select_params: bad comparability data");

    BarrierParams bp;
    bp.dim = dim;
    bp.lambda = lambda;
    bp.Lambda = Lambda;
    bp.L1 = L1;
    bp.L2 = L2;
    bp.p = p;
    bp.q = q;
    bp.a_sup = a_sup;
    bp.t0 = t0;
    bp.T0 = T0;
    bp.Istar = Istar;
    bp.alpha = std::max((dim - 1) * Lambda / lambda - 1.0, 1.0);

    const double dT = T0 - t0;
    auto budget = [&](double A0) { return barrier_budget(A0, dim, Lambda, L2, p, q, a_sup, dT); };
    double hi = 1.0;
    while (budget(hi) < Istar) hi *= 2.0;
    double lo = 0.0;
    // Keep the lower end: the returned A0 must satisfy budget(A0) <= Istar.
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (budget(mid) <= Istar)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-15 * hi && budget(lo) >= Istar * (1.0 - 1e-12)) break;
    }
    bp.A0 = lo;
    bp.L = L > 0.0 ? L : std::sqrt(dT / bp.A0);
    bp.finalize();
    return bp;
}

/// Barrier value at radius r >= 0.
inline double theta_radial(const BarrierParams& bp, double r) {
    if (r < bp.L) return bp.t0;
    if (r < bp.outer_edge()) {
        const double s = r - bp.L;
        return bp.A0 * s * s + bp.t0;
    }
    return bp.psi - bp.phi * std::pow(r, -bp.alpha);
}

inline double theta(const BarrierParams& bp, const std::array<double, 2>& x) {
    return theta_radial(bp, std::hypot(x[0], x[1]));
}

/// Radial first derivative theta'(r) (the gradient magnitude).
inline double theta_radial_deriv(const BarrierParams& bp, double r) {
    if (r < bp.L) return 0.0;
    if (r < bp.outer_edge()) return 2.0 * bp.A0 * (r - bp.L);
    return bp.alpha * bp.phi * std::pow(r, -(bp.alpha + 1.0));
}

/// Radial second derivative theta''(r); defined a.e. (jumps at interfaces).
inline double theta_radial_second(const BarrierParams& bp, double r) {
    if (r < bp.L) return 0.0;
    if (r < bp.outer_edge()) return 2.0 * bp.A0;
    return -bp.alpha * (bp.alpha + 1.0) * bp.phi * std::pow(r, -(bp.alpha + 2.0));
}

/// M+ of the radial Hessian: eigenvalues are theta'' (radial direction) and
/// theta'/r with multiplicity N-1 (tangential directions).
inline double theta_pucci_plus(const BarrierParams& bp, double r) {
    const double radial = theta_radial_second(bp, r);
    const double tangential = r > 0.0 ? theta_radial_deriv(bp, r) / r : 0.0;
    auto env = [&](double e) { return e > 0.0 ? bp.Lambda * e : bp.lambda * e; };
    return env(radial) + (bp.dim - 1) * env(tangential);
}

struct BarrierCheck {
    bool pass = true;
    double worst_margin = -std::numeric_limits<double>::infinity();
    double worst_radius = 0.0;
    int samples = 0;
};

/// Pointwise supersolution verification on sampled radii spanning all three
/// regions, using the analytic derivative formulas (never grid stencils):
///   annulus:  L2*K(theta') * M+(D^2 theta) <= Istar,
///   outside:  M+(D^2 theta) <= 0,
///   core:     flat, product vanishes.
/// Fails with the offending radius and margin on any violation beyond tol.
inline BarrierCheck verify_supersolution(const BarrierParams& bp, int samples = 1000,
                                         double tol = 1e-10) {
    BarrierCheck chk;
    chk.samples = samples;
    const double edge = bp.outer_edge();
    const double rmax = 20.0 * bp.L;
    for (int i = 0; i < samples; ++i) {
        const double frac = (static_cast<double>(i) + 0.5) / samples;
        double r, margin;
        if (i % 3 == 0) {
            r = frac * bp.L;  // core
            const double dv = theta_radial_deriv(bp, r);
            margin = dv * dv;  // identically zero by construction
        } else if (i % 3 == 1) {
            r = bp.L + frac * (edge - bp.L);  // annulus
            const double dv = theta_radial_deriv(bp, r);
            const double hup = bp.L2 * (pow_abs(dv, bp.p) + bp.a_sup * pow_abs(dv, bp.q));
            margin = hup * std::max(theta_pucci_plus(bp, r), 0.0) - bp.Istar;
        } else {
            r = edge + frac * (rmax - edge);  // outer tail
            margin = theta_pucci_plus(bp, r);
        }
        if (margin > chk.worst_margin) {
            chk.worst_margin = margin;
            chk.worst_radius = r;
        }
        if (margin > tol) chk.pass = false;
    }
    return chk;
}

/// Verifies the linear-growth floor Theta_L(x) >= kappa0 * 4L on the radii
/// {4L, 5L, 8L, 16L}; monotonicity of the profile extends it to all larger radii.
inline BarrierCheck growth_check(const BarrierParams& bp, double tol = 1e-12) {
    BarrierCheck chk;
    const double floor = bp.kappa0 * 4.0 * bp.L;
    for (double mult : {4.0, 5.0, 8.0, 16.0}) {
        const double r = mult * bp.L;
        const double margin = floor - theta_radial(bp, r);
        ++chk.samples;
        if (margin > chk.worst_margin) {
            chk.worst_margin = margin;
            chk.worst_radius = r;
        }
        if (margin > tol) chk.pass = false;
    }
    return chk;
}

/// eps-scaled barrier  Theta_eps(x) = eps * Theta_L(x / eps), the profile
/// used to peel solutions away from the eps-level layer: it starts at
/// t0 * eps at the origin and clears kappa0 * eta on |x| = eta = 4 L eps.
inline double scaled_barrier(const BarrierParams& bp, double eps,
                             const std::array<double, 2>& x) {
    require(eps > 0.0, "scaled_barrier: eps must be positive");
    return eps * theta_radial(bp, std::hypot(x[0], x[1]) / eps);
}

inline double scaled_barrier_eta(const BarrierParams& bp, double eps) { return 4.0 * bp.L * eps; }

}  // namespace degenfb
