#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "degenfb/common.hpp"

namespace degenfb {

/// Rectangular lattice on [lo, hi], 1D or 2D, with uniform spacing per axis.
/// Node coordinates reproduce lo and hi exactly at the extremes.
struct Grid {
    int dim = 2;
    std::array<double, 2> lo{0.0, 0.0};
    std::array<double, 2> hi{1.0, 1.0};
    std::array<int, 2> n{3, 3};
    std::array<double, 2> h{0.5, 0.5};

    static Grid make1d(double lo0, double hi0, int n0) {
        Grid g;
        g.dim = 1;
        g.lo = {lo0, 0.0};
        g.hi = {hi0, 0.0};
        g.n = {n0, 1};
        g.validate();
        return g;
    }

    static Grid make2d(double lx0, double ly0, double hx0, double hy0, int nx, int ny) {
        Grid g;
        g.dim = 2;
        g.lo = {lx0, ly0};
        g.hi = {hx0, hy0};
        g.n = {nx, ny};
        g.validate();
        return g;
    }

    void validate() {
        require(dim == 1 || dim == 2, "grid: dim must be 1 or 2");
        for (int k = 0; k < dim; ++k) {
            require(n[k] >= 3, "grid: need at least 3 nodes per axis");
            require(hi[k] > lo[k], "grid: hi must exceed lo");
            h[k] = (hi[k] - lo[k]) / static_cast<double>(n[k] - 1);
        }
        if (dim == 1) {
            n[1] = 1;
            h[1] = 0.0;
        }
    }

    int node_count() const { return n[0] * n[1]; }

    int index(int ix, int iy = 0) const { return ix + n[0] * iy; }

    std::array<int, 2> coords(int idx) const { return {idx % n[0], idx / n[0]}; }

    double coord(int axis, int i) const {
        if (i == n[axis] - 1) return hi[axis];  // exact at the far extreme
        return lo[axis] + static_cast<double>(i) * h[axis];
    }

    std::array<double, 2> point(int ix, int iy) const {
        return {coord(0, ix), dim == 2 ? coord(1, iy) : 0.0};
    }

    std::array<double, 2> point(int idx) const {
        const auto c = coords(idx);
        return point(c[0], c[1]);
    }

    /// True when the node is at least `offset` nodes away from every boundary.
    bool interior(int ix, int iy, int offset) const {
        if (ix < offset || ix >= n[0] - offset) return false;
        if (dim == 2 && (iy < offset || iy >= n[1] - offset)) return false;
        return true;
    }

    bool interior(int idx, int offset = 1) const {
        const auto c = coords(idx);
        return interior(c[0], c[1], offset);
    }

    bool boundary(int idx) const { return !interior(idx, 1); }

    bool operator==(const Grid& o) const {
        return dim == o.dim && lo == o.lo && hi == o.hi && n == o.n;
    }
};

/// One finite real value per grid node.
struct ScalarField {
    Grid grid;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0)
        : grid(g), v(static_cast<std::size_t>(g.node_count()), fill) {}

    double& operator[](int idx) { return v[static_cast<std::size_t>(idx)]; }
    double operator[](int idx) const { return v[static_cast<std::size_t>(idx)]; }

    void check_finite() const {
        for (std::size_t i = 0; i < v.size(); ++i)
            if (!std::isfinite(v[i]))
                throw precondition_error("field: non-finite value at node " + std::to_string(i));
    }
};

/// Symmetric N x N matrix, N = 1 or 2; upper triangle stored.
struct SymMatrix {
    int dim = 2;
    double a11 = 0.0;
    double a12 = 0.0;
    double a22 = 0.0;

    static SymMatrix scalar(double x) { return {1, x, 0.0, 0.0}; }
    static SymMatrix diag(double x, double y) { return {2, x, 0.0, y}; }

    double trace() const { return dim == 1 ? a11 : a11 + a22; }

    /// Eigenvalues by the closed-form half-trace +- half-discriminant-root
    /// formula; exact symmetry is guaranteed by storage.
    std::array<double, 2> eigenvalues() const {
        if (dim == 1) return {a11, 0.0};
        const double mean = 0.5 * (a11 + a22);
        const double d = std::hypot(0.5 * (a11 - a22), a12);
        return {mean - d, mean + d};
    }
};

inline SymMatrix operator+(const SymMatrix& x, const SymMatrix& y) {
    return {x.dim, x.a11 + y.a11, x.a12 + y.a12, x.a22 + y.a22};
}
inline SymMatrix operator-(const SymMatrix& x, const SymMatrix& y) {
    return {x.dim, x.a11 - y.a11, x.a12 - y.a12, x.a22 - y.a22};
}
inline SymMatrix operator*(double c, const SymMatrix& x) {
    return {x.dim, c * x.a11, c * x.a12, c * x.a22};
}
inline SymMatrix operator-(const SymMatrix& x) { return {x.dim, -x.a11, -x.a12, -x.a22}; }

/// Central-difference gradient at a strictly interior node.
inline std::array<double, 2> gradient_at(const ScalarField& f, int idx) {
    const Grid& g = f.grid;
    const auto c = g.coords(idx);
    require(g.interior(c[0], c[1], 1), "gradient_at: node must be interior");
    std::array<double, 2> grad{0.0, 0.0};
    grad[0] = (f[g.index(c[0] + 1, c[1])] - f[g.index(c[0] - 1, c[1])]) / (2.0 * g.h[0]);
    if (g.dim == 2)
        grad[1] = (f[g.index(c[0], c[1] + 1)] - f[g.index(c[0], c[1] - 1)]) / (2.0 * g.h[1]);
    return grad;
}

inline double gradient_norm_at(const ScalarField& f, int idx) {
    const auto gr = gradient_at(f, idx);
    return f.grid.dim == 2 ? std::hypot(gr[0], gr[1]) : std::fabs(gr[0]);
}

/// Second-order central Hessian; the cross term uses the 4-point diagonal
/// stencil. Exact on quadratics.
inline SymMatrix hessian_at(const ScalarField& f, int idx) {
    const Grid& g = f.grid;
    const auto c = g.coords(idx);
    require(g.interior(c[0], c[1], 1), "hessian_at: node must be >= 1 node from the boundary");
    SymMatrix m;
    m.dim = g.dim;
    const double hx2 = g.h[0] * g.h[0];
    m.a11 = (f[g.index(c[0] + 1, c[1])] - 2.0 * f[idx] + f[g.index(c[0] - 1, c[1])]) / hx2;
    if (g.dim == 2) {
        const double hy2 = g.h[1] * g.h[1];
        m.a22 = (f[g.index(c[0], c[1] + 1)] - 2.0 * f[idx] + f[g.index(c[0], c[1] - 1)]) / hy2;
        m.a12 = (f[g.index(c[0] + 1, c[1] + 1)] + f[g.index(c[0] - 1, c[1] - 1)] -
                 f[g.index(c[0] + 1, c[1] - 1)] - f[g.index(c[0] - 1, c[1] + 1)]) /
                (4.0 * g.h[0] * g.h[1]);
    }
    return m;
}

namespace detail {

/// 1D squared-distance transform along a sampled line (Felzenszwalb/Huttenlocher
/// lower envelope of parabolas). d[i] on input holds squared distances, on
/// output the envelope min over j of d[j] + (i-j)^2 * step^2.
inline void edt_pass(std::vector<double>& d, double step) {
    const int n = static_cast<int>(d.size());
    std::vector<int> v(static_cast<std::size_t>(n));
    std::vector<double> z(static_cast<std::size_t>(n) + 1);
    std::vector<double> out(static_cast<std::size_t>(n));
    const double s2 = step * step;
    int k = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    for (int q = 1; q < n; ++q) {
        double s;
        while (true) {
            const int p = v[static_cast<std::size_t>(k)];
            s = ((d[static_cast<std::size_t>(q)] + s2 * q * q) -
                 (d[static_cast<std::size_t>(p)] + s2 * p * p)) /
                (2.0 * s2 * (q - p));
            if (s <= z[static_cast<std::size_t>(k)])
                --k;
            else
                break;
        }
        ++k;
        v[static_cast<std::size_t>(k)] = q;
        z[static_cast<std::size_t>(k)] = s;
        z[static_cast<std::size_t>(k) + 1] = std::numeric_limits<double>::infinity();
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[static_cast<std::size_t>(k) + 1] < q) ++k;
        const int p = v[static_cast<std::size_t>(k)];
        out[static_cast<std::size_t>(q)] = s2 * (q - p) * (q - p) + d[static_cast<std::size_t>(p)];
    }
    d.swap(out);
}

}  // namespace detail

/// Exact Euclidean distance from every node to the nearest mask node.
/// Brute force for grids up to 256 nodes per axis, separable exact transform
/// above; both are exact, never chamfer approximations.
inline ScalarField dist_to_set(const Grid& g, const std::vector<char>& mask) {
    require(static_cast<int>(mask.size()) == g.node_count(), "dist_to_set: mask size mismatch");
    bool any = false;
    for (char m : mask)
        if (m) {
            any = true;
            break;
        }
    require(any, "dist_to_set: mask must be non-empty");

    ScalarField out(g);
    const int nx = g.n[0], ny = g.n[1];
    if (std::max(nx, ny) <= 256) {
        std::vector<int> mx, my;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                if (mask[static_cast<std::size_t>(g.index(i, j))]) {
                    mx.push_back(i);
                    my.push_back(j);
                }
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t k = 0; k < mx.size(); ++k) {
                    const double dx = (i - mx[k]) * g.h[0];
                    const double dy = g.dim == 2 ? (j - my[k]) * g.h[1] : 0.0;
                    const double d2 = dx * dx + dy * dy;
                    if (d2 < best) best = d2;
                }
                out[g.index(i, j)] = std::sqrt(best);
            }
        }
        return out;
    }

    // Two-pass exact transform on squared distances.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> d2(static_cast<std::size_t>(g.node_count()));
    for (int idx = 0; idx < g.node_count(); ++idx)
        d2[static_cast<std::size_t>(idx)] = mask[static_cast<std::size_t>(idx)] ? 0.0 : inf;
    // Columns first (y), then rows (x). Guard all-infinite lines: the parabola
    // envelope needs at least one finite sample.
    if (g.dim == 2) {
        std::vector<double> line(static_cast<std::size_t>(ny));
        for (int i = 0; i < nx; ++i) {
            bool finite = false;
            for (int j = 0; j < ny; ++j) {
                line[static_cast<std::size_t>(j)] = d2[static_cast<std::size_t>(g.index(i, j))];
                finite = finite || line[static_cast<std::size_t>(j)] == 0.0;
            }
            if (finite) {
                // Replace inf by a large finite sentinel so the envelope is defined.
                const double big = (g.hi[0] - g.lo[0]) * (g.hi[0] - g.lo[0]) +
                                   (g.hi[1] - g.lo[1]) * (g.hi[1] - g.lo[1]) + 1.0;
                for (double& x : line)
                    if (!std::isfinite(x)) x = big;
                detail::edt_pass(line, g.h[1]);
            }
            for (int j = 0; j < ny; ++j)
                d2[static_cast<std::size_t>(g.index(i, j))] = line[static_cast<std::size_t>(j)];
        }
    }
    {
        const double big = (g.hi[0] - g.lo[0]) * (g.hi[0] - g.lo[0]) +
                           (g.dim == 2 ? (g.hi[1] - g.lo[1]) * (g.hi[1] - g.lo[1]) : 0.0) + 1.0;
        std::vector<double> line(static_cast<std::size_t>(nx));
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                double x = d2[static_cast<std::size_t>(g.index(i, j))];
                line[static_cast<std::size_t>(i)] = std::isfinite(x) ? x : big;
            }
            detail::edt_pass(line, g.h[0]);
            for (int i = 0; i < nx; ++i)
                d2[static_cast<std::size_t>(g.index(i, j))] = line[static_cast<std::size_t>(i)];
        }
    }
    for (int idx = 0; idx < g.node_count(); ++idx)
        out[idx] = std::sqrt(d2[static_cast<std::size_t>(idx)]);
    return out;
}

/// Max of f over the nodes selected by pred. Errors on an empty region.
template <class Pred>
double sup_norm(const ScalarField& f, const Pred& pred) {
    bool any = false;
    double best = -std::numeric_limits<double>::infinity();
    for (int idx = 0; idx < f.grid.node_count(); ++idx)
        if (pred(idx)) {
            any = true;
            best = std::max(best, f[idx]);
        }
    require(any, "sup_norm: region contains no nodes");
    return best;
}

template <class Pred>
double inf_norm(const ScalarField& f, const Pred& pred) {
    bool any = false;
    double best = std::numeric_limits<double>::infinity();
    for (int idx = 0; idx < f.grid.node_count(); ++idx)
        if (pred(idx)) {
            any = true;
            best = std::min(best, f[idx]);
        }
    require(any, "inf_norm: region contains no nodes");
    return best;
}

inline double dist2(const Grid& g, int idx, const std::array<double, 2>& x0) {
    const auto p = g.point(idx);
    const double dx = p[0] - x0[0];
    const double dy = g.dim == 2 ? p[1] - x0[1] : 0.0;
    return dx * dx + dy * dy;
}

/// Sup of f over the discrete ball { nodes within rho of x0 }.
inline double ball_sup(const ScalarField& f, const std::array<double, 2>& x0, double rho) {
    const double r2 = rho * rho;
    return sup_norm(f, [&](int idx) { return dist2(f.grid, idx, x0) <= r2; });
}

inline double ball_inf(const ScalarField& f, const std::array<double, 2>& x0, double rho) {
    const double r2 = rho * rho;
    return inf_norm(f, [&](int idx) { return dist2(f.grid, idx, x0) <= r2; });
}

}  // namespace degenfb
