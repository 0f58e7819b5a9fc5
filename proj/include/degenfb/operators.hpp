#pragma once

#include <array>
#include <cmath>
#include <string>

#include "degenfb/common.hpp"
#include "degenfb/grid.hpp"

namespace degenfb {

/// Gradient degeneracy law  H(x, xi) = |xi|^p + a(x) |xi|^q  with exponents
/// 0 < p <= q and a nonnegative modulating field a. The comparability
/// constants L1 <= L2 are carried so property tests can exercise the general
/// sandwich L1*K <= H <= L2*K; the implemented H is exactly K (L1 = L2 = 1).
struct DegeneracyParams {
    double p = 1.0;
    double q = 1.0;
    ScalarField a;  // modulating function, >= 0 everywhere
    double L1 = 1.0;
    double L2 = 1.0;

    void validate() const {
        require(p > 0.0 && p <= q, "degeneracy: need 0 < p <= q");
        require(L1 > 0.0 && L1 <= L2, "degeneracy: need 0 < L1 <= L2");
        for (double x : a.v) require(x >= 0.0, "degeneracy: modulating function must be >= 0");
    }

    double a_sup() const {
        double m = 0.0;
        for (double x : a.v) m = std::max(m, x);
        return m;
    }
};

/// H evaluated from the gradient magnitude at node idx.
inline double degeneracy_mag(const DegeneracyParams& d, int idx, double grad_norm) {
    const double av = d.a.v.empty() ? 0.0 : d.a[idx];
    return pow_abs(grad_norm, d.p) + av * pow_abs(grad_norm, d.q);
}

inline double degeneracy(const DegeneracyParams& d, int idx, const std::array<double, 2>& xi) {
    return degeneracy_mag(d, idx, std::hypot(xi[0], xi[1]));
}

/// Second-order operator kinds. All implemented kinds are x-independent in
/// the matrix argument; ellipticity constants lambda <= Lambda are carried
/// for the Pucci envelope (the Laplacian has lambda = Lambda = 1).
struct OperatorKind {
    enum class Kind { PucciPlus, PucciMinus, Laplacian, HessianFm };

    Kind kind = Kind::Laplacian;
    double lambda = 1.0;
    double Lambda = 1.0;
    int m = 3;  // HessianFm only; odd

    static OperatorKind laplacian() { return {Kind::Laplacian, 1.0, 1.0, 3}; }
    static OperatorKind pucci_plus(double l, double L) { return {Kind::PucciPlus, l, L, 3}; }
    static OperatorKind pucci_minus(double l, double L) { return {Kind::PucciMinus, l, L, 3}; }
    static OperatorKind hessian_fm(int m, double l = 1.0, double L = 1.0) {
        return {Kind::HessianFm, l, L, m};
    }

    void validate() const {
        require(lambda > 0.0 && lambda <= Lambda, "operator: need 0 < lambda <= Lambda");
        if (kind == Kind::HessianFm) require(m >= 1 && m % 2 == 1, "operator: m must be odd >= 1");
    }

    std::string name() const {
        switch (kind) {
            case Kind::PucciPlus: return "pucci_plus";
            case Kind::PucciMinus: return "pucci_minus";
            case Kind::Laplacian: return "laplacian";
            case Kind::HessianFm: return "hessian_fm";
        }
        return "?";
    }
};

/// Pucci extremal operators on the closed-form eigenvalues:
///   M-(X) = lambda * sum_{e>0} e + Lambda * sum_{e<0} e,
///   M+(X) = Lambda * sum_{e>0} e + lambda * sum_{e<0} e.
inline double pucci_minus(double lambda, double Lambda, const SymMatrix& x) {
    const auto e = x.eigenvalues();
    double s = 0.0;
    for (int k = 0; k < x.dim; ++k) s += e[static_cast<std::size_t>(k)] > 0.0
                                             ? lambda * e[static_cast<std::size_t>(k)]
                                             : Lambda * e[static_cast<std::size_t>(k)];
    return s;
}

inline double pucci_plus(double lambda, double Lambda, const SymMatrix& x) {
    const auto e = x.eigenvalues();
    double s = 0.0;
    for (int k = 0; k < x.dim; ++k) s += e[static_cast<std::size_t>(k)] > 0.0
                                             ? Lambda * e[static_cast<std::size_t>(k)]
                                             : lambda * e[static_cast<std::size_t>(k)];
    return s;
}

/// Hessian-type family F_m(X) = sum_j (1 + e_j^m)^(1/m) - N, m odd.
/// Normalized so F_m(0) = 0; recession is the Laplacian.
inline double hessian_fm(int m, const SymMatrix& x) {
    require(m >= 1 && m % 2 == 1, "hessian_fm: m must be odd >= 1");
    const auto e = x.eigenvalues();
    double s = 0.0;
    for (int k = 0; k < x.dim; ++k)
        s += odd_root(1.0 + odd_pow(e[static_cast<std::size_t>(k)], m), m);
    return s - static_cast<double>(x.dim);
}

inline double evaluate(const OperatorKind& op, const SymMatrix& x) {
    switch (op.kind) {
        case OperatorKind::Kind::PucciPlus: return pucci_plus(op.lambda, op.Lambda, x);
        case OperatorKind::Kind::PucciMinus: return pucci_minus(op.lambda, op.Lambda, x);
        case OperatorKind::Kind::Laplacian: return x.trace();
        case OperatorKind::Kind::HessianFm: return hessian_fm(op.m, x);
    }
    return 0.0;
}

/// One step of the recession rescaling tau * F(X / tau); driving tau -> 0
/// estimates the limiting operator F*. Exact for 1-homogeneous kinds.
inline double recession(const OperatorKind& op, const SymMatrix& x, double tau) {
    require(tau > 0.0, "recession: tau must be positive");
    return tau * evaluate(op, (1.0 / tau) * x);
}

/// Sharp asymptotic-concavity constant for F_m with A = Id:
///   sup_X [F_m(X) - tr X] = N * (2^(1 - 1/m) - 1),
/// attained at X = -2^(-1/m) * Id (per-eigenvalue maximum of
/// (1+e^m)^(1/m) - 1 - e over the real line).
inline double acp_constant(int m, int dim) {
    return static_cast<double>(dim) *
           (std::pow(2.0, 1.0 - 1.0 / static_cast<double>(m)) - 1.0);
}

struct AcpReport {
    bool pass = false;
    double worst_margin = 0.0;  // max of F_m(X) - tr(X) over samples
    double bound = 0.0;         // certified sup of the margin
    double worst_excess = 0.0;  // max of margin - bound (must stay <= tol)
    int samples = 0;
};

/// Samples random symmetric matrices with entries in [-100, 100] and checks
/// the asymptotic concavity inequality F_m(X) <= tr(X) + C* with A = Id and
/// the sharp constant C* from acp_constant. Fails on any excess beyond 1e-12.
inline AcpReport acp_check(const OperatorKind& op, int samples, int dim = 2,
                           std::uint64_t seed = 2024) {
    require(op.kind == OperatorKind::Kind::HessianFm, "acp_check: requires a hessian_fm kind");
    AcpReport rep;
    rep.bound = acp_constant(op.m, dim);
    rep.samples = samples;
    rep.worst_margin = -std::numeric_limits<double>::infinity();
    Rng rng(seed);
    for (int i = 0; i < samples; ++i) {
        SymMatrix x;
        x.dim = dim;
        x.a11 = rng.uniform(-100.0, 100.0);
        x.a22 = dim == 2 ? rng.uniform(-100.0, 100.0) : 0.0;
        x.a12 = dim == 2 ? rng.uniform(-100.0, 100.0) : 0.0;
        const double margin = hessian_fm(op.m, x) - x.trace();
        rep.worst_margin = std::max(rep.worst_margin, margin);
    }
    rep.worst_excess = rep.worst_margin - rep.bound;
    rep.pass = rep.worst_excess <= 1e-12;
    return rep;
}

/// The full quasilinear product G(x, grad u, D^2 u) = H(x, grad u) * F(D^2 u)
/// assembled from the grid-module stencils at an interior node.
inline double full_operator(const DegeneracyParams& deg, const OperatorKind& op,
                            const ScalarField& u, int idx) {
    const double h = degeneracy_mag(deg, idx, gradient_norm_at(u, idx));
    return h * evaluate(op, hessian_at(u, idx));
}

}  // namespace degenfb
