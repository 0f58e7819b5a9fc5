// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "degenfb/barrier.hpp"
#include "degenfb/cli.hpp"
#include "degenfb/oned.hpp"
#include "degenfb/operators.hpp"
#include "degenfb/sweep.hpp"

using namespace degenfb;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int num, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", num, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double entry_scale(const SymMatrix& x) {
    return std::max({1.0, std::fabs(x.a11), std::fabs(x.a22), std::fabs(x.a12)});
}

SymMatrix random_sym(Rng& rng, double scale) {
    SymMatrix x;
    x.dim = 2;
    x.a11 = rng.uniform(-scale, scale);
    x.a22 = rng.uniform(-scale, scale);
    x.a12 = rng.uniform(-scale, scale);
    return x;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------- criterion 1

void criterion1_barrier() {
    Rng rng(20240601);
    const double lambdas_over[] = {1.0, 2.0, 4.0};
    const double pq_pairs[][2] = {{0.5, 0.5}, {0.5, 1.0}, {0.5, 2.0},
                                  {1.0, 1.0}, {1.0, 2.0}, {2.0, 2.0}};
    const double asups[] = {0.0, 1.0};
    const double istars[] = {0.1, 1.0, 10.0};
    bool pass = true;
    double worst_super = -1e300, worst_growth = -1e300;
    for (int k = 0; k < 20; ++k) {
        const double Lam = lambdas_over[k % 3];
        const auto& pq = pq_pairs[k % 6];
        const double a_sup = asups[k % 2];
        const double istar = istars[k % 3];
        const double t0 = rng.uniform(0.05, 0.45);
        const double T0 = rng.uniform(t0 + 0.1, 0.95);
        BarrierParams bp =
            select_params(2, 1.0, Lam, 1.0, 1.0, pq[0], pq[1], a_sup, t0, T0, istar);
        bp = select_params(2, 1.0, Lam, 1.0, 1.0, pq[0], pq[1], a_sup, t0, T0, istar,
                           bp.L0 * rng.uniform(1.0, 3.0));
        const BarrierCheck sup = verify_supersolution(bp, 1000, 1e-10);
        const BarrierCheck gro = growth_check(bp, 1e-10);
        worst_super = std::max(worst_super, sup.worst_margin);
        worst_growth = std::max(worst_growth, gro.worst_margin);
        pass = pass && sup.pass && gro.pass;
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "20 tuples, 1000 radii each; worst margins: supersolution %.3e, growth %.3e",
                  worst_super, worst_growth);
    report(1, "barrier construction and verification", pass, buf);
}

// ---------------------------------------------------------------- criterion 2

void criterion2_operators() {
    Rng rng(777);
    const double lam = 1.0, Lam = 2.0;
    bool pass = true;
    double worst_identity = 0.0;
    for (int k = 0; k < 100000; ++k) {
        const SymMatrix x = random_sym(rng, 10.0);
        const SymMatrix y = random_sym(rng, 10.0);
        const double tol = 1e-12 * std::max(entry_scale(x), entry_scale(y));
        const double mp = pucci_plus(lam, Lam, x);
        const double mm = pucci_minus(lam, Lam, x);
        // duality and ordering
        worst_identity = std::max(worst_identity, std::fabs(pucci_plus(lam, Lam, -x) + mm));
        if (std::fabs(pucci_plus(lam, Lam, -x) + mm) > tol) pass = false;
        if (mm > mp + tol) pass = false;
        // positive homogeneity
        const double c = rng.uniform(0.0, 4.0);
        if (std::fabs(pucci_plus(lam, Lam, c * x) - c * mp) > 4.0 * tol) pass = false;
        if (std::fabs(pucci_minus(lam, Lam, c * x) - c * mm) > 4.0 * tol) pass = false;
        // ellipticity sandwich for the pucci and laplacian kinds
        const double dlo = pucci_minus(lam, Lam, x - y);
        const double dhi = pucci_plus(lam, Lam, x - y);
        const double dtr = x.trace() - y.trace();
        if (dtr < dlo - tol || dtr > dhi + tol) pass = false;
        const double dp = pucci_plus(lam, Lam, x) - pucci_plus(lam, Lam, y);
        const double dm = pucci_minus(lam, Lam, x) - pucci_minus(lam, Lam, y);
        if (dp < dlo - tol || dp > dhi + tol) pass = false;
        if (dm < dlo - tol || dm > dhi + tol) pass = false;
    }

    // sampled sup-representation oracle: 10^4 A-samples including the box
    // vertices, where the linear functional attains its supremum
    double worst_repr = 0.0;
    for (int k = 0; k < 200; ++k) {
        const SymMatrix x = random_sym(rng, 10.0);
        const auto e = x.eigenvalues();
        double best = -1e300;
        const double corners[4][2] = {{lam, lam}, {lam, Lam}, {Lam, lam}, {Lam, Lam}};
        for (const auto& cc : corners) best = std::max(best, cc[0] * e[0] + cc[1] * e[1]);
        for (int s = 0; s < 9996; ++s)
            best = std::max(best,
                            rng.uniform(lam, Lam) * e[0] + rng.uniform(lam, Lam) * e[1]);
        const double err = std::fabs(pucci_plus(lam, Lam, x) - best);
        worst_repr = std::max(worst_repr, err);
        if (err > 1e-10 * entry_scale(x)) pass = false;
    }

    // asymptotic concavity of the Hessian-type family, sharp constant
    double worst_excess = -1e300;
    for (int m : {3, 5}) {
        const AcpReport rep = acp_check(OperatorKind::hessian_fm(m), 100000, 2, 99 + m);
        worst_excess = std::max(worst_excess, rep.worst_excess);
        if (!rep.pass) pass = false;
    }

    // recession of F_3 approaches the trace
    const double rec = recession(OperatorKind::hessian_fm(3), SymMatrix::diag(1.0, 2.0), 1e-4);
    if (std::fabs(rec - 3.0) > 1e-3) pass = false;

    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "1e5 matrices; worst duality %.2e, sup-repr %.2e, ACP excess %.2e, "
                  "recession gap %.2e",
                  worst_identity, worst_repr, worst_excess, std::fabs(rec - 3.0));
    report(2, "operator algebra", pass, buf);
}

// ---------------------------------------------------------------- criterion 3

void criterion3_slope_law() {
    bool pass = true;
    const double s_classic = slope_from_law({0.0, 0.0, 0.0, 1.0});
    const double s_cubic = slope_from_law({1.0, 1.0, 0.0, 1.0});
    if (std::fabs(s_classic - std::sqrt(2.0)) > 1e-12) pass = false;
    if (std::fabs(s_cubic - std::cbrt(3.0)) > 1e-12) pass = false;

    // first-integral identity along the integrated profile
    const double p = 1.0, q = 2.0, kap = 0.7, eps = 0.02;
    const ProfileResult prof = integrate_profile(p, q, kap, eps, 65);
    double worst_fi = 0.0;
    for (std::size_t k = 0; k < prof.u_samples.size(); ++k) {
        const double s = prof.slope_samples[k];
        const double z = bump_antiderivative(prof.u_samples[k] / eps);
        worst_fi = std::max(worst_fi, std::fabs(pow_abs(s, p + 2.0) / (p + 2.0) +
                                                kap * pow_abs(s, q + 2.0) / (q + 2.0) - z));
    }
    if (worst_fi > 1e-10) pass = false;
    if (std::fabs(prof.slope_at_eps - slope_from_law({p, q, kap, 1.0})) > 1e-10) pass = false;

    // solver cross-validation at eps = 1e-2, h = eps/8, and under refinement
    SolveConfig cfg;
    cfg.tol = 1e-6;
    cfg.max_iter = 40000000;
    const CrossValidation cv1 = cross_validate(1.0, 2.0, 0.0, 1e-2, 1.25e-3, 0.25, 0.3, cfg);
    const CrossValidation cv2 = cross_validate(1.0, 2.0, 0.0, 1e-2, 6.25e-4, 0.25, 0.3, cfg);
    if (cv1.discrepancy > 0.05) pass = false;
    if (!(cv2.discrepancy < cv1.discrepancy)) pass = false;

    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "roots %.12f/%.12f; first-integral %.2e; discrepancy %.4f%% -> %.4f%% "
                  "under h/2",
                  s_classic, s_cubic, worst_fi, 100.0 * cv1.discrepancy,
                  100.0 * cv2.discrepancy);
    report(3, "one-dimensional slope law", pass, buf);
}

// ---------------------------------------------------------------- criterion 4

void criterion4_cutting_comparison() {
    bool pass = true;
    double worst_cut = 0.0;
    SolveConfig cfg;
    cfg.tol = 1e-8;
    cfg.max_iter = 10000000;

    const Grid g = Grid::make2d(0, 0, 1, 1, 65, 65);
    auto make = [&](OperatorKind op) {
        ProblemSpec spec;
        spec.grid = g;
        spec.deg.p = 1.0;
        spec.deg.q = 2.0;
        spec.deg.a = ScalarField(g, 1.0);
        spec.op = op;
        spec.rhs_mode = ProblemSpec::RhsMode::Constant;
        spec.rhs_value = 0.0;
        spec.reaction.Q = ScalarField(g, 0.0);
        spec.reaction.f = ScalarField(g, 0.0);
        spec.g = ScalarField(g, 0.0);
        return spec;
    };
    auto set_g = [&](ProblemSpec& spec, bool smooth) {
        for (int idx = 0; idx < g.node_count(); ++idx) {
            const auto pt = g.point(idx);
            spec.g[idx] =
                pt[0] + (smooth ? 0.2 * std::sin(3.14159265358979323846 * pt[1]) : 0.0);
        }
    };
    auto sup_interior = [&](const ScalarField& u) {
        double s = -1e300;
        for (int idx = 0; idx < g.node_count(); ++idx)
            if (!g.boundary(idx)) s = std::max(s, u[idx]);
        return s;
    };

    long total_violations = 0;
    for (const auto op : {OperatorKind::laplacian(), OperatorKind::pucci_minus(1.0, 2.0)}) {
        for (bool smooth : {false, true}) {
            ProblemSpec spec = make(op);
            set_g(spec, smooth);
            double supg = 0.0;
            for (int idx = 0; idx < g.node_count(); ++idx)
                if (g.boundary(idx)) supg = std::max(supg, spec.g[idx]);
            const CuttingResult c = cutting_check(spec, cfg);
            worst_cut = std::max(worst_cut, c.sup_difference);
            if (!c.pass) pass = false;
            // discrete maximum principle on both routes
            if (sup_interior(c.degenerate.u) > supg + cfg.tol) pass = false;
            if (sup_interior(c.pure.u) > supg + cfg.tol) pass = false;
            total_violations += c.degenerate.monotone_violations + c.pure.monotone_violations;
        }
    }

    // comparison principle: ordered constant right-hand sides
    ProblemSpec lo = make(OperatorKind::laplacian());
    set_g(lo, false);
    for (double& x : lo.g.v) x = 0.5;
    ProblemSpec hi = lo;
    hi.rhs_value = 0.3;
    const SolveResult ulo = solve_peps(lo, cfg);
    const SolveResult uhi = solve_peps(hi, cfg);
    if (!comparison_check(uhi.u, ulo.u, 2.0 * cfg.tol).pass) pass = false;

    ProblemSpec shifted = hi;
    for (double& x : shifted.g.v) x = 0.6;
    const SolveResult ush = solve_peps(shifted, cfg);
    ScalarField translate = uhi.u;
    for (double& x : translate.v) x += 0.1;
    if (!comparison_check(ush.u, translate, 1e-6).pass) pass = false;

    if (sup_interior(ulo.u) > 0.5 + cfg.tol) pass = false;
    if (sup_interior(uhi.u) > 0.5 + cfg.tol) pass = false;
    if (sup_interior(ush.u) > 0.6 + cfg.tol) pass = false;
    total_violations += ulo.monotone_violations + uhi.monotone_violations +
                        ush.monotone_violations;
    if (total_violations != 0) pass = false;

    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "worst cutting gap %.2e (budget %.0e); ordering, translation, max "
                  "principle hold; %ld monotone violations",
                  worst_cut, 10.0 * cfg.tol, total_violations);
    report(4, "cutting and comparison", pass, buf);
}

// ------------------------------------------------------- criteria 5 and 6

json model_config() {
    json j;
    j["subcommand"] = "sweep";
    j["grid"] = {{"dim", 2}, {"lo", {0.0, 0.0}}, {"hi", {0.8, 0.8}}, {"n", {129, 129}}};
    j["degeneracy"] = {{"p", 1.0}, {"q", 2.0}, {"a", {{"preset", "constant"}, {"value", 1.0}}}};
    j["operator"] = {{"kind", "laplacian"}};
    j["reaction"] = {{"eps", 0.1},
                     {"Q", {{"preset", "constant"}, {"value", 1.0}}},
                     {"f", {{"preset", "constant"}, {"value", 0.0}}}};
    j["boundary"] = {{"preset", "strip"}, {"value", 0.7}};
    j["solve"] = {{"tol", 1e-6}, {"max_iter", 30000000}};
    j["sweep"] = {{"eps_list", {0.1, 0.05, 0.025}}, {"c1", 1.5}};
    j["geometry"] = {{"margin", 0.1},
                     {"growth_threshold", 3.0},
                     {"nondeg_radii", {0.05, 0.1}},
                     {"density_rho", 0.05},
                     {"content_rho", {0.1, 0.2}},
                     {"content_delta", {0.025, 0.05}},
                     {"porosity_radii", {0.05, 0.1}},
                     {"samples", 200}};
    j["seed"] = 12345;
    return j;
}

void criteria56_eps_uniformity() {
    std::vector<std::string> perrs;
    RunConfig cfg = parse_config(model_config(), perrs);
    if (!perrs.empty()) {
        report(5, "eps-uniform geometry", false, "config parse failed");
        report(6, "limit behavior", false, "config parse failed");
        return;
    }
    ProblemSpec spec = build_problem(cfg, cfg.eps_list.front());
    auto cache = std::make_shared<std::map<double, ScalarField>>();
    auto profile = [&cfg, cache](double e) -> const ScalarField& {
        auto it = cache->find(e);
        if (it == cache->end()) it = cache->emplace(e, make_strip_boundary(cfg, e)).first;
        return it->second;
    };
    const SweepResult s = eps_sweep(
        spec, cfg.solve, cfg.eps_list, cfg.geometry, [&](double e) { return profile(e); },
        [&](double e) { return profile(e); });

    bool pass5 = true;
    std::string why5;
    auto stable = [&](const char* name, double a, double b) {
        const double ratio = std::max(a, b) / std::max(1e-300, std::min(a, b));
        if (!(ratio <= 2.0)) {
            pass5 = false;
            why5 += std::string(" ") + name + " unstable";
        }
        return ratio;
    };
    double worst_ratio = 1.0;
    for (std::size_t k = 0; k + 1 < s.entries.size(); ++k) {
        const GeometryReport& a = s.entries[k].geometry;
        const GeometryReport& b = s.entries[k + 1].geometry;
        worst_ratio = std::max(worst_ratio, stable("lipschitz", a.lipschitz, b.lipschitz));
        worst_ratio = std::max(worst_ratio, stable("growth", a.growth_min, b.growth_min));
        worst_ratio = std::max(worst_ratio, stable("nondeg", a.nondeg_min, b.nondeg_min));
        worst_ratio = std::max(worst_ratio, stable("density", a.density_min, b.density_min));
        worst_ratio = std::max(worst_ratio, stable("harnack", a.harnack_max, b.harnack_max));
        for (std::size_t e = 0; e < a.hausdorff.size(); ++e)
            worst_ratio = std::max(worst_ratio, stable("content", a.hausdorff[e].normalized,
                                                       b.hausdorff[e].normalized));
    }
    for (const auto& entry : s.entries) {
        if (!(entry.geometry.growth_min > 0.0)) pass5 = false;
        if (!(entry.geometry.density_min > 0.02)) pass5 = false;
        if (!(entry.geometry.harnack_max < 100.0)) pass5 = false;
        if (entry.result.monotone_violations != 0) pass5 = false;
    }
    char buf5[200];
    std::snprintf(buf5, sizeof(buf5),
                  "eps {0.1,0.05,0.025} on 129^2: worst halving ratio %.3f <= 2;%s "
                  "growth>0, density>0.02, harnack<100",
                  worst_ratio, why5.empty() ? "" : why5.c_str());
    report(5, "eps-uniform geometry", pass5, buf5);

    bool pass6 = true;
    for (std::size_t k = 0; k + 1 < s.sup_differences.size(); ++k)
        if (!(s.sup_differences[k + 1] <= s.sup_differences[k])) pass6 = false;
    for (std::size_t k = 0; k + 1 < s.hausdorff_between.size(); ++k) {
        if (!s.hausdorff_between[k] || !s.hausdorff_between[k + 1]) {
            pass6 = false;
            continue;
        }
        if (!(*s.hausdorff_between[k + 1] <= *s.hausdorff_between[k])) pass6 = false;
    }
    double min_por = 1.0;
    for (const auto& entry : s.entries) min_por = std::min(min_por, entry.geometry.porosity);
    if (!(min_por >= 0.05)) pass6 = false;
    std::ostringstream det6;
    det6 << "sup diffs";
    for (double d : s.sup_differences) det6 << " " << d;
    det6 << "; hausdorff";
    for (const auto& d : s.hausdorff_between) det6 << " " << (d ? *d : -1.0);
    det6 << "; min porosity " << min_por;
    report(6, "limit behavior", pass6, det6.str());
}

// ---------------------------------------------------------------- criterion 7

void criterion7_reproducibility() {
    bool pass = true;
    std::string why;
    const fs::path base = fs::temp_directory_path() / "degenfb_acceptance";
    fs::remove_all(base);

    // a compact instance of the model sweep (65^2 keeps the parallel sweep
    // path engaged) plus barrier and oned reports
    json j = model_config();
    j["grid"]["n"] = {65, 65};
    j["sweep"]["eps_list"] = {0.1, 0.05};
    j["solve"] = {{"tol", 1e-6}, {"max_iter", 30000000}};

    auto run_into = [&](const json& cj, const std::string& name, int threads) {
        std::vector<std::string> errs;
        RunConfig cfg = parse_config(cj, errs);
        cfg.out_dir = (base / name).string();
        cfg.threads = threads;
        cfg.solve.threads = threads;
        if (!errs.empty() || run_config(cfg) != 0) {
            pass = false;
            why += " run(" + name + ") failed;";
        }
        return cfg.out_dir;
    };

    const std::string d1 = run_into(j, "sweep_t1_a", 1);
    const std::string d2 = run_into(j, "sweep_t1_b", 1);
    const std::string d3 = run_into(j, "sweep_t2", 2);

    const char* files[] = {"u_0.csv",         "u_1.csv",          "result_0.json",
                           "result_1.json",   "geometry_0.json",  "geometry_1.json",
                           "sweep.json"};
    for (const char* f : files) {
        const std::string a = slurp(fs::path(d1) / f);
        if (a.empty()) {
            pass = false;
            why += std::string(" missing ") + f + ";";
            continue;
        }
        if (a != slurp(fs::path(d2) / f)) {
            pass = false;
            why += std::string(" rerun differs on ") + f + ";";
        }
        if (a != slurp(fs::path(d3) / f)) {
            pass = false;
            why += std::string(" thread count changed ") + f + ";";
        }
    }

    json bj;
    bj["subcommand"] = "barrier";
    bj["barrier"] = {{"dim", 2},   {"lambda", 1.0}, {"Lambda", 2.0}, {"p", 1.0}, {"q", 2.0},
                     {"a_sup", 1.0}, {"t0", 0.25},  {"T0", 0.75},    {"Istar", 1.0}};
    const std::string b1 = run_into(bj, "barrier_a", 1);
    const std::string b2 = run_into(bj, "barrier_b", 2);
    if (slurp(fs::path(b1) / "barrier.json") != slurp(fs::path(b2) / "barrier.json")) {
        pass = false;
        why += " barrier report differs;";
    }

    json oj;
    oj["subcommand"] = "oned";
    oj["oned"] = {{"p", 1.0},   {"q", 2.0},   {"kappa", 0.0}, {"eps", 0.02},
                  {"h", 0.005}, {"g0", 0.12}, {"length", 0.15}};
    oj["solve"] = {{"tol", 1e-5}, {"max_iter", 5000000}};
    const std::string o1 = run_into(oj, "oned_a", 1);
    const std::string o2 = run_into(oj, "oned_b", 2);
    if (slurp(fs::path(o1) / "oned.json") != slurp(fs::path(o2) / "oned.json")) {
        pass = false;
        why += " oned report differs;";
    }

    report(7, "reproducibility", pass,
           why.empty() ? "reruns and thread counts byte-identical across all reports" : why);
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    criterion1_barrier();
    criterion2_operators();
    criterion3_slope_law();
    criterion4_cutting_comparison();
    criteria56_eps_uniformity();
    criterion7_reproducibility();
    const auto t1 = std::chrono::steady_clock::now();
    std::printf("%d of 7 criteria passed in %.1f s\n", 7 - g_failures,
                std::chrono::duration<double>(t1 - t0).count());
    return g_failures == 0 ? 0 : 1;
}
