#pragma once

#include <algorithm>
#include <cmath>

#include "degenfb/common.hpp"
#include "degenfb/grid.hpp"
#include "degenfb/quadrature.hpp"

namespace degenfb {

/// The fixed smooth profile of the singular reaction: a C^infinity bump
/// supported on [0, 1], normalized to unit mass so the one-dimensional slope
/// law is parameter-free.
namespace bump_profile {

inline double raw(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return std::exp(-1.0 / (t * (1.0 - t)));
}

/// Normalization constant c with integral_0^1 c * raw = 1, computed once by
/// adaptive quadrature to 1e-12.
inline double normalization() {
    static const double c = [] {
        const double mass = integrate([](double s) { return raw(s); }, 0.0, 1.0, 1e-14);
        return 1.0 / mass;
    }();
    return c;
}

}  // namespace bump_profile

/// zeta(t) = c * exp(-1/(t(1-t))) on (0,1), zero outside.
inline double bump(double t) { return bump_profile::normalization() * bump_profile::raw(t); }

inline double bump_sup() { return bump(0.5); }  // even profile, peak at the center

/// Lipschitz bound of the bump, used in the explicit-step reaction cap.
inline double bump_lipschitz() {
    static const double lip = [] {
        double m = 0.0;
        const int n = 20000;
        double prev = bump(0.0);
        for (int i = 1; i <= n; ++i) {
            const double t = static_cast<double>(i) / n;
            const double cur = bump(t);
            m = std::max(m, std::fabs(cur - prev) * n);
            prev = cur;
        }
        return m * 1.05;
    }();
    return lip;
}

/// Antiderivative of the bump on [0, s], s in [0, 1]; tends to 1 as s -> 1.
/// Backed by a dense cumulative trapezoid table: every derivative of the
/// profile vanishes at the support endpoints, so the composite trapezoid
/// rule converges superalgebraically and a fine table carries full double
/// accuracy; values between knots use a Catmull-Rom fit.
inline double bump_antiderivative(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    static const int n = 16384;
    static const std::vector<double> table = [] {
        std::vector<double> t(static_cast<std::size_t>(n) + 1, 0.0);
        double acc = 0.0;
        double prev = bump(0.0);
        for (int k = 1; k <= n; ++k) {
            const double cur = bump(static_cast<double>(k) / n);
            acc += 0.5 * (prev + cur) / n;
            t[static_cast<std::size_t>(k)] = acc;
            prev = cur;
        }
        const double norm = 1.0 / acc;  // pin the endpoint at exactly 1
        for (double& x : t) x *= norm;
        return t;
    }();
    const double pos = s * n;
    const int k = std::min(static_cast<int>(pos), n - 1);
    const double f = pos - k;
    const double y0 = k > 0 ? table[static_cast<std::size_t>(k) - 1]
                            : -table[1];  // odd reflection keeps the slope 0
    const double y1 = table[static_cast<std::size_t>(k)];
    const double y2 = table[static_cast<std::size_t>(k) + 1];
    const double y3 = k + 2 <= n ? table[static_cast<std::size_t>(k) + 2]
                                 : 2.0 * table[static_cast<std::size_t>(n)] -
                                       table[static_cast<std::size_t>(n) - 1];
    const double a = y1;
    const double b = 0.5 * (y2 - y0);
    const double c = y0 - 2.5 * y1 + 2.0 * y2 - 0.5 * y3;
    const double d = 0.5 * (y3 - y0) + 1.5 * (y1 - y2);
    const double val = a + f * (b + f * (c + f * d));
    // clamp to the cell bracket: the cumulative data is monotone and the
    // cubic must not undershoot it where the profile is nearly flat
    return std::min(std::max(val, y1), y2);
}

/// Singular reaction  zeta_eps(x, t) = Q(x) * (1/eps) * zeta(t/eps) + f(x),
/// of size O(1/eps) on the layer {0 < t < eps}. Q > 0, f >= 0 bounded.
/// For t < 0 the t = 0 value is returned (one-phase extension).
struct ReactionParams {
    double eps = 0.1;
    ScalarField Q;
    ScalarField f;

    void validate() const {
        require(eps > 0.0, "reaction: eps must be positive");
        require(Q.grid == f.grid, "reaction: Q and f must share a grid");
        for (double x : Q.v) require(x > 0.0, "reaction: Q must be positive");
        for (double x : f.v) require(x >= 0.0, "reaction: f must be nonnegative");
    }

    // Derived constants, recomputed from the fields (never cached).
    double bound_amplitude() const {  // ||Q|| * ||zeta||
        double qmax = 0.0;
        for (double x : Q.v) qmax = std::max(qmax, x);
        return qmax * bump_sup();
    }
    double bound_lower() const {  // inf f
        double m = std::numeric_limits<double>::infinity();
        for (double x : f.v) m = std::min(m, x);
        return m;
    }
    double bound_upper() const {  // sup f
        double m = 0.0;
        for (double x : f.v) m = std::max(m, x);
        return m;
    }
    double unit_mass() const { return 1.0; }  // integral of the normalized bump
};

inline double zeta_eps(const ReactionParams& r, int idx, double t) {
    const double s = t <= 0.0 ? 0.0 : t / r.eps;
    const double singular = s < 1.0 ? r.Q[idx] * bump(s) / r.eps : 0.0;
    return singular + r.f[idx];
}

/// Certified constants of the reaction family on a scale window [t0, T0]:
/// A, B0, B from the bounds  B0 <= zeta_eps <= (A/eps) chi_(0,eps) + B  and
/// the scale-invariant infimum J = inf over the grid and t in [t0, T0] of
/// eps * zeta_eps(x, eps t). Certification fails when J <= 0 (the reaction
/// lacks singular character on the window).
struct ReactionCertificate {
    double A = 0.0;
    double B0 = 0.0;
    double B = 0.0;
    double J = 0.0;
    double t0 = 0.0;
    double T0 = 0.0;
    bool pass = false;
};

inline ReactionCertificate certify(const ReactionParams& r, double t0, double T0,
                                   int samples_per_axis = 1000) {
    require(t0 >= 0.0 && t0 < T0, "certify: need 0 <= t0 < T0");
    ReactionCertificate c;
    c.t0 = t0;
    c.T0 = T0;
    c.A = r.bound_amplitude();
    c.B0 = r.bound_lower();
    c.B = r.bound_upper();

    // eps * zeta_eps(x, eps t) = Q(x) * zeta(t) + eps * f(x); the t-minimizer
    // is common to all x, so the joint infimum separates.
    double zmin = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= samples_per_axis; ++k) {
        const double t = t0 + (T0 - t0) * static_cast<double>(k) / samples_per_axis;
        zmin = std::min(zmin, bump(t));
    }
    double j = std::numeric_limits<double>::infinity();
    for (int idx = 0; idx < r.Q.grid.node_count(); ++idx)
        j = std::min(j, r.Q[idx] * zmin + r.eps * r.f[idx]);
    c.J = j;
    c.pass = c.J > 0.0;
    return c;
}

}  // namespace degenfb
