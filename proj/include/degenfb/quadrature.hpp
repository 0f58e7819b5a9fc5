#pragma once

#include <cmath>
#include <functional>

#include "degenfb/common.hpp"

namespace degenfb {

namespace detail {

template <class F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0) throw numerical_error("adaptive quadrature: recursion depth exhausted");
    if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
template <class F>
double integrate(const F& f, double a, double b, double tol = 1e-12, int max_depth = 60) {
    if (a == b) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fm))
        throw numerical_error("adaptive quadrature: non-finite integrand sample");
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Bisection for the unique root of a strictly increasing function g on
/// [lo, hi] with g(lo) <= target <= g(hi). Absolute tolerance on the root.
template <class G>
double bisect_increasing(const G& g, double lo, double hi, double target, double xtol,
                         int max_iter = 400) {
    double a = lo, b = hi;
    for (int i = 0; i < max_iter && (b - a) > xtol; ++i) {
        const double m = 0.5 * (a + b);
        if (g(m) < target)
            a = m;
        else
            b = m;
    }
    return 0.5 * (a + b);
}

}  // namespace degenfb
