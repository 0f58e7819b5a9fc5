#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "degenfb/operators.hpp"

using namespace degenfb;

namespace {

SymMatrix random_sym(Rng& rng, double scale) {
    SymMatrix x;
    x.dim = 2;
    x.a11 = rng.uniform(-scale, scale);
    x.a22 = rng.uniform(-scale, scale);
    x.a12 = rng.uniform(-scale, scale);
    return x;
}

double scaled_tol(const SymMatrix& x, double base) {
    const double s = std::max({1.0, std::fabs(x.a11), std::fabs(x.a22), std::fabs(x.a12)});
    return base * s;
}

DegeneracyParams make_deg(const Grid& g, double p, double q, double aval) {
    DegeneracyParams d;
    d.p = p;
    d.q = q;
    d.a = ScalarField(g, aval);
    return d;
}

}  // namespace

TEST_CASE("degeneracy law: direct formula and collapse at critical points") {
    const Grid g = Grid::make2d(0, 0, 1, 1, 3, 3);
    const DegeneracyParams d = make_deg(g, 1.0, 2.0, 0.5);
    CHECK(degeneracy(d, 0, {3.0, 4.0}) == Catch::Approx(17.5).margin(1e-14));
    CHECK(degeneracy(d, 0, {0.0, 0.0}) == 0.0);

    const DegeneracyParams dz = make_deg(g, 1.5, 1.5, 0.0);
    CHECK(degeneracy(dz, 0, {2.0, 0.0}) == Catch::Approx(std::pow(2.0, 1.5)).margin(1e-14));

    DegeneracyParams bad = make_deg(g, 2.0, 1.0, 0.0);
    CHECK_THROWS_AS(bad.validate(), precondition_error);
}

TEST_CASE("pucci operators on explicit matrices") {
    const SymMatrix x = SymMatrix::diag(1.0, -1.0);
    CHECK(pucci_minus(1.0, 2.0, x) == -1.0);
    CHECK(pucci_plus(1.0, 2.0, x) == 1.0);
    const SymMatrix id = SymMatrix::diag(1.0, 1.0);
    CHECK(pucci_minus(1.0, 2.0, id) == 2.0);
}

TEST_CASE("pucci identities: duality, homogeneity, ordering") {
    Rng rng(31);
    const double lam = 1.0, Lam = 2.5;
    for (int k = 0; k < 2000; ++k) {
        const SymMatrix x = random_sym(rng, 10.0);
        const double mp = pucci_plus(lam, Lam, x);
        const double mm = pucci_minus(lam, Lam, x);
        CHECK(mm <= mp + 1e-14);
        CHECK(std::fabs(pucci_plus(lam, Lam, -x) + mm) <= scaled_tol(x, 1e-13));
        const double c = rng.uniform(0.0, 4.0);
        CHECK(std::fabs(pucci_plus(lam, Lam, c * x) - c * mp) <= scaled_tol(x, 1e-12));
        CHECK(std::fabs(pucci_minus(lam, Lam, c * x) - c * mm) <= scaled_tol(x, 1e-12));
    }
}

TEST_CASE("pucci-plus equals the supremum over the ellipticity box") {
    // M+(X) = sup tr(A X) over A in [lam I, Lam I] diagonal in X's eigenbasis.
    // The functional is linear in the diagonal of A, so the supremum sits at a
    // vertex of the box; the sample set includes the four vertices, which makes
    // the sampled maximum exact.
    Rng rng(47);
    const double lam = 0.7, Lam = 3.0;
    for (int k = 0; k < 100; ++k) {
        const SymMatrix x = random_sym(rng, 8.0);
        const auto e = x.eigenvalues();
        double best = -1e300;
        const double corners[4][2] = {{lam, lam}, {lam, Lam}, {Lam, lam}, {Lam, Lam}};
        for (const auto& c : corners) best = std::max(best, c[0] * e[0] + c[1] * e[1]);
        for (int s = 0; s < 10000 - 4; ++s) {
            const double m1 = rng.uniform(lam, Lam);
            const double m2 = rng.uniform(lam, Lam);
            best = std::max(best, m1 * e[0] + m2 * e[1]);
        }
        CHECK(std::fabs(pucci_plus(lam, Lam, x) - best) <= scaled_tol(x, 1e-12));
    }
}

TEST_CASE("ellipticity sandwich for the pucci and laplacian kinds") {
    // M-(X - Y) <= F(X) - F(Y) <= M+(X - Y) holds exactly for the trace and
    // for the extremal operators themselves (sub/superadditivity).
    Rng rng(53);
    const double lam = 1.0, Lam = 2.0;
    const OperatorKind kinds[3] = {OperatorKind::laplacian(), OperatorKind::pucci_plus(lam, Lam),
                                   OperatorKind::pucci_minus(lam, Lam)};
    for (int k = 0; k < 2000; ++k) {
        const SymMatrix x = random_sym(rng, 10.0);
        const SymMatrix y = random_sym(rng, 10.0);
        const double lo = pucci_minus(lam, Lam, x - y);
        const double hi = pucci_plus(lam, Lam, x - y);
        for (const auto& op : kinds) {
            const double diff = evaluate(op, x) - evaluate(op, y);
            CHECK(diff >= lo - 1e-10);
            CHECK(diff <= hi + 1e-10);
        }
    }
}

TEST_CASE("hessian-type family: normalization and closed form") {
    CHECK(hessian_fm(3, SymMatrix::diag(0.0, 0.0)) == 0.0);
    CHECK(hessian_fm(3, SymMatrix::diag(1.0, 0.0)) ==
          Catch::Approx(std::cbrt(2.0) - 1.0).margin(1e-15));
    // large negative diagonal stays below the trace
    CHECK(hessian_fm(3, SymMatrix::diag(-50.0, -50.0)) - (-100.0) < 0.0);
}

TEST_CASE("hessian-type family is monotone (degenerate elliptic)") {
    // adding a positive semidefinite perturbation never decreases F_m
    Rng rng(61);
    for (int k = 0; k < 2000; ++k) {
        const SymMatrix x = random_sym(rng, 5.0);
        const double t = rng.uniform(0.0, 3.0);
        const SymMatrix bump = SymMatrix::diag(t, rng.uniform(0.0, 3.0));
        for (int m : {1, 3, 5})
            CHECK(hessian_fm(m, x + bump) >= hessian_fm(m, x) - 1e-11);
    }
}

TEST_CASE("asymptotic concavity of F_m against the sharp constant") {
    // Per eigenvalue the margin (1+e^m)^(1/m) - 1 - e peaks at e = -2^(-1/m)
    // with value 2^(1-1/m) - 1; the matrix bound is N times that.
    for (int m : {3, 5}) {
        const double estar = -std::pow(2.0, -1.0 / m);
        const SymMatrix xstar = SymMatrix::diag(estar, estar);
        const double margin = hessian_fm(m, xstar) - xstar.trace();
        CHECK(margin == Catch::Approx(acp_constant(m, 2)).margin(1e-12));
    }
    // eigenvalues in (-1, 0) genuinely exceed the trace, so the zero constant
    // would be wrong:
    const SymMatrix inside = SymMatrix::diag(-0.5, 0.0);
    CHECK(hessian_fm(3, inside) - inside.trace() > 0.4);

    const AcpReport rep = acp_check(OperatorKind::hessian_fm(3), 20000);
    CHECK(rep.pass);
    CHECK(rep.worst_excess <= 1e-12);
    const AcpReport rep5 = acp_check(OperatorKind::hessian_fm(5), 20000);
    CHECK(rep5.pass);
}

TEST_CASE("recession: exact for 1-homogeneous kinds, trace limit for F_m") {
    Rng rng(71);
    const SymMatrix x = random_sym(rng, 4.0);
    CHECK(recession(OperatorKind::laplacian(), x, 0.37) == Catch::Approx(x.trace()).margin(1e-12));
    CHECK(recession(OperatorKind::pucci_minus(1.0, 2.0), x, 0.018) ==
          Catch::Approx(pucci_minus(1.0, 2.0, x)).margin(1e-10));

    const SymMatrix d12 = SymMatrix::diag(1.0, 2.0);
    const double r2 = recession(OperatorKind::hessian_fm(3), d12, 1e-2);
    const double r3 = recession(OperatorKind::hessian_fm(3), d12, 1e-3);
    const double r4 = recession(OperatorKind::hessian_fm(3), d12, 1e-4);
    CHECK(std::fabs(r4 - 3.0) <= 1e-3);
    CHECK(std::fabs(r3 - 3.0) <= std::fabs(r2 - 3.0));
    CHECK(std::fabs(r4 - 3.0) <= std::fabs(r3 - 3.0));
    CHECK_THROWS_AS(recession(OperatorKind::laplacian(), x, 0.0), precondition_error);
}

TEST_CASE("full operator on sampled fields") {
    const Grid g = Grid::make2d(0, 0, 1, 1, 21, 21);
    const DegeneracyParams d = make_deg(g, 1.0, 2.0, 1.0);

    ScalarField lin(g);
    for (int idx = 0; idx < g.node_count(); ++idx) {
        const auto p = g.point(idx);
        lin[idx] = 2.0 * p[0] + p[1];
    }
    for (const auto& op : {OperatorKind::laplacian(), OperatorKind::pucci_plus(1.0, 2.0),
                           OperatorKind::hessian_fm(3)})
        CHECK(std::fabs(full_operator(d, op, lin, g.index(10, 10))) <= 1e-10);

    ScalarField parab(g);
    for (int idx = 0; idx < g.node_count(); ++idx) {
        const auto p = g.point(idx);
        parab[idx] = 0.5 * (p[0] * p[0] + p[1] * p[1]);
    }
    const int idx = g.index(10, 14);  // gradient (0.5, 0.7), |grad| = r
    const double r = std::hypot(0.5, 0.7);
    const double expected = (r + r * r) * 2.0;
    CHECK(full_operator(d, OperatorKind::laplacian(), parab, idx) ==
          Catch::Approx(expected).margin(1e-9));

    // gradient collapse: an index-symmetric peak has bitwise-zero gradient at
    // the center, so the product vanishes no matter the Hessian
    ScalarField peak(g);
    for (int j = 0; j < g.n[1]; ++j)
        for (int i = 0; i < g.n[0]; ++i)
            peak[g.index(i, j)] = -static_cast<double>((i - 10) * (i - 10) + (j - 10) * (j - 10));
    CHECK(full_operator(d, OperatorKind::laplacian(), peak, g.index(10, 10)) == 0.0);
}

TEST_CASE("degenerate ellipticity of the product operator") {
    // H >= 0, so a positive semidefinite Hessian perturbation never
    // decreases H * F for any kind.
    Rng rng(83);
    const Grid g = Grid::make2d(0, 0, 1, 1, 3, 3);
    const DegeneracyParams d = make_deg(g, 0.5, 2.0, 1.0);
    for (int k = 0; k < 500; ++k) {
        const SymMatrix x = random_sym(rng, 5.0);
        const SymMatrix bump = SymMatrix::diag(rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0));
        const double h = degeneracy(d, 0, {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)});
        for (const auto& op : {OperatorKind::laplacian(), OperatorKind::pucci_minus(1.0, 3.0),
                               OperatorKind::hessian_fm(3)})
            CHECK(h * evaluate(op, x + bump) >= h * evaluate(op, x) - 1e-10);
    }
}
