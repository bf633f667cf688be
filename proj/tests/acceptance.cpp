// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include "support.hpp"

#include "magsi/cgo.hpp"
#include "magsi/forward.hpp"
#include "magsi/linearize.hpp"
#include "magsi/reconstruct.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

using namespace magsi;
using namespace magsi::test;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double time_limit;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

ScalarField poly(const Grid& g, double (*fn)(double, double)) {
    return ScalarField::sample(g, [fn](double x, double y) { return complex(fn(x, y)); });
}
ScalarField xfield(const Grid& g) { return poly(g, [](double x, double) { return x; }); }
ScalarField yfield(const Grid& g) { return poly(g, [](double, double y) { return y; }); }
ScalarField onexy(const Grid& g) { return poly(g, [](double x, double y) { return 1.0 + x * y; }); }

EpsFamily family(const std::vector<ScalarField>& v, double eps) {
    EpsFamily f;
    for (const auto& s : v) {
        f.traces.push_back(trace(s));
        f.eps.push_back(eps);
    }
    return f;
}

Outcome forward_exactness() {
    const Grid g = unit_grid(65);
    const ForwardSolver s(g);
    const ScalarField exact = poly(g, [](double x, double y) { return x * x - y * y; });
    const NonlinearSolution sol = s.solve(trace(exact), TaylorPotential(g, 2));
    const double err = (sol.u - exact).max_abs();
    return {err <= 1e-10, fmt("sup error %.2e (<= 1e-10)", err)};
}

Outcome wellposedness_scaling() {
    const Grid g = unit_grid(65);
    const ForwardSolver s(g);
    const TaylorPotential p = bump_potential(g, {{"A1x", 1.0}, {"q2", 5.0}});
    const BoundaryData f = trace(poly(g, [](double x, double y) { return 1.0 + x * y; }));
    double lo = 1e300, hi = 0.0, prev_rho = 1.0, newton_gap = 0.0;
    bool rho_ok = true;
    for (double scale : {1.0, 0.5, 0.25, 0.125}) {
        const BoundaryData fs = f * complex(scale);
        const NonlinearSolution sol = s.solve(fs, p);
        const double ratio = sol.u.max_abs() / fs.max_abs();
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        const double rho = sol.report.contraction_ratio;
        rho_ok = rho_ok && rho < 1.0 && rho < prev_rho;
        prev_rho = rho;
        newton_gap = std::max(newton_gap, (sol.u - NewtonOracle(p).solve(fs).u).max_abs());
    }
    const bool pass = hi / lo < 2.0 && rho_ok && newton_gap <= 1e-10;
    return {pass, fmt("ratio band %.3f (< 2), rho decreasing %s, Newton gap %.2e (<= 1e-10)", hi / lo,
                      rho_ok ? "yes" : "no", newton_gap)};
}

Outcome first_linearization_slope() {
    const Grid g = unit_grid(65);
    const ForwardSolver s(g);
    const TaylorPotential p = bump_potential(g, {{"A1x", 1.0}, {"q2", 2.0}});
    const BoundaryData f = trace(onexy(g));
    const ScalarField v = first_linearization(s, f);
    std::vector<double> eps{4e-2, 2e-2, 1e-2, 5e-3}, err;
    for (double e : eps) err.push_back((s.solve(f * complex(e), p).u * complex(1.0 / e) - v).max_abs());
    const double slope = log_slope(eps, err);
    return {std::abs(slope - 1.0) <= 0.2, fmt("slope %.3f (1 +- 0.2)", slope)};
}

Outcome second_linearization() {
    const Grid g = unit_grid(129);
    const ForwardSolver s(g);
    const TaylorPotential p = bump_potential(g, {{"q2", 1.0}});
    const BoundaryData pred = solve_second_linearization(s, onexy(g), xfield(g), p).predicted;
    std::vector<double> eps{4e-2, 2e-2, 1e-2, 5e-3}, err;
    double rel = 0.0;
    for (double e : eps) {
        const LinearizedDatum d = mixed_dtn_derivative(s, family({onexy(g), xfield(g)}, e), p, StencilOptions{false, {}});
        err.push_back((d.value - pred).max_abs());
        if (e == 1e-2) rel = err.back() / pred.max_abs();
    }
    const double slope = log_slope(eps, err);
    return {rel <= 0.05 && std::abs(slope - 2.0) <= 0.3,
            fmt("relative gap at eps 1e-2 %.2e (<= 0.05), slope %.3f (2 +- 0.3)", rel, slope)};
}

Outcome integral_identity() {
    const Grid g = unit_grid(129);
    const ForwardSolver s(g);
    const TaylorPotential zero(g, 3);
    const TaylorPotential q2 = bump_potential(g, {{"A1x", 0.5}, {"q2", 1.0}});
    const IdentityResult r2 = check_integral_identity(s, zero, q2, {onexy(g), xfield(g)}, yfield(g));
    const TaylorPotential p1 = bump_potential(g, {{"q2", 1.0}, {"A2x", 1.0}, {"q3", 1.0}});
    const TaylorPotential p2 = bump_potential(g, {{"q2", 1.0}, {"q3", 2.0}});
    const IdentityResult r3 = check_integral_identity(s, p1, p2, {onexy(g), xfield(g), yfield(g)}, onexy(g));
    const IdentityResult same = check_integral_identity(s, q2, q2, {onexy(g), xfield(g)}, yfield(g));
    const double scale = std::max(1.0, std::abs(integrate_interior(build_Q2(onexy(g), xfield(g), q2) * yfield(g))));
    const double same_gap = same.gap / scale;
    const bool pass = r2.relative_gap <= 0.02 && r3.relative_gap <= 0.02 && same_gap <= 1e-8;
    return {pass, fmt("m=2 gap %.2e, m=3 gap %.2e (<= 0.02), identical %.2e (<= 1e-8)", r2.relative_gap,
                      r3.relative_gap, same_gap)};
}

Outcome moment_round_trip() {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    double round_trip = 0.0;
    for (int m : {2, 3, 4})
        for (int j = -3; j <= 3; ++j)
            for (int k = -3; k <= 3; ++k) {
                if (j == 0 && k == 0) continue;
                const auto plans = plan_frequencies({2 * kPi * j, 2 * kPi * k}, m);
                const std::array<complex, 2> ma{complex(d(rng), d(rng)), complex(d(rng), d(rng))};
                const complex sv(d(rng), d(rng));
                std::vector<MomentSample> samples;
                for (const auto& p : plans) {
                    const auto sp = p.partial_sum();
                    samples.push_back({p, complex(m + 1) * -I * (sp[0] * ma[0] + sp[1] * ma[1]) + sv});
                }
                const MomentSolution r = solve_moment_system(samples, m);
                round_trip = std::max(round_trip, std::abs(r.M_A[0] - ma[0]) + std::abs(r.M_A[1] - ma[1]) +
                                                      std::abs(r.s - sv));
            }

    const Grid g = unit_grid(129);
    const ForwardSolver s(g);
    const TaylorPotential p = bump_potential(g, {{"A1x", 1.0}, {"A1y", -0.5}});
    RecoveryOptions opt;
    const DtnOracle oracle = make_dtn_oracle(s, p, opt.stencil.solve);
    double worst = 0.0;
    for (int j = -2; j <= 2; ++j)
        for (int k = -2; k <= 2; ++k) {
            if (j * j + k * k > 4) continue;
            const Frequency xi{2 * kPi * j, 2 * kPi * k};
            const auto plans = (j == 0 && k == 0) ? plan_zero_frequency(2, kPi / 2) : plan_frequencies(xi, 2);
            const MomentSolution r = solve_moment_system(measure_moments(s, oracle, plans, opt), 2);
            const complex ax = direct_fourier(p.A(1).x, xi[0], xi[1]), ay = direct_fourier(p.A(1).y, xi[0], xi[1]);
            worst = std::max(worst, std::hypot(std::abs(r.M_A[0] - ax), std::abs(r.M_A[1] - ay)) /
                                        std::hypot(std::abs(ax), std::abs(ay)));
        }
    return {round_trip <= 1e-12 && worst <= 0.05,
            fmt("round trip %.2e (<= 1e-12), worst A1 moment error %.2e for |xi| <= 4 pi (<= 0.05)", round_trip, worst)};
}

Outcome reconstruction() {
    const Grid g = unit_grid(129);
    const ForwardSolver s(g);
    RecoveryOptions opt;
    opt.K = 8;

    const TaylorPotential pq = bump_potential(g, {{"q2", 1.0}});
    const RecoveryResult rq = recover_order_m(s, make_dtn_oracle(s, pq, opt.stencil.solve), opt, &pq);
    const double spurious = rq.errors.a_sup / rq.errors.q_true_sup;

    const TaylorPotential pa = bump_potential(g, {{"A1x", 1.0}, {"A1y", 0.5}});
    const RecoveryResult ra = recover_order_m(s, make_dtn_oracle(s, pa, opt.stencil.solve), opt, &pa);

    const TaylorPotential p3 = bump_potential(g, {{"q2", 1.0}, {"A2x", 0.5}, {"q3", 1.0}});
    RecoveryOptions o3 = opt;
    o3.m = 3;
    o3.lower_orders = lower_orders(p3, 3);
    const RecoveryResult r3 = recover_order_m(s, make_dtn_oracle(s, p3, o3.stencil.solve), o3, &p3);

    const bool pass = rq.errors.q_rel_l2 <= 0.10 && spurious <= 0.05 && ra.errors.a_rel_l2 <= 0.10 &&
                      r3.errors.q_rel_l2 <= 0.10 && r3.errors.a_rel_l2 <= 0.10;
    return {pass, fmt("q2: q %.2e, spurious A %.2e; A1: A %.2e; m=3: A %.2e, q %.2e (each <= 0.10, spurious <= 0.05)",
                      rq.errors.q_rel_l2, spurious, ra.errors.a_rel_l2, r3.errors.a_rel_l2, r3.errors.q_rel_l2)};
}

Outcome cgo_decay() {
    const Grid g = build_grid(129, 129, Rect{-1.0, 0.0, -0.5, 0.5});
    const PoissonSolver ps(g);
    const double c = 0.2;
    const IsotropicDirection zeta = make_isotropic(IsotropicKind::imaginary_first);
    const DecayReport r = decay_probe(ps, zeta, {0.4, 0.3, 0.2, 0.15, 0.1}, c, far_segment(g, c));
    const double bar = 0.7 * c * zeta[0].imag();
    return {r.slope < 0.0 && -r.slope >= bar, fmt("slope %.3f (<= -%.3f)", r.slope, bar)};
}

Outcome uniqueness() {
    const double eps = 1e-2;
    const SolveOptions so{};
    Outcome out;

    const Grid g = unit_grid(65);
    const ForwardSolver s(g);
    const TaylorPotential p1 = bump_potential(g, {{"A1x", 1.0}, {"q2", 1.0}});
    const TaylorPotential p2 = bump_potential(g, {{"A1x", 1.0}, {"q2", 1.0}, {"A2y", 1.0}, {"q3", 2.0}});
    const EpsFamily fam = family({onexy(g), xfield(g)}, eps);
    const BoundaryData d1 = mixed_dtn_derivative(s, fam, p1, StencilOptions{true, so}).value;
    const BoundaryData d2 = mixed_dtn_derivative(s, fam, p2, StencilOptions{true, so}).value;
    // solver tolerance amplified by the stencil's division by eps^m
    const double noise = so.tol * std::max(1.0, d1.max_abs()) / (eps * eps);
    const double equal_gap = (d1 - d2).max_abs();

    const Grid G = unit_grid(129);
    const ForwardSolver S(G);
    const TaylorPotential a = bump_potential(G, {{"A1x", 1.0}, {"q2", 1.0}});
    const TaylorPotential b = bump_potential(G, {{"A1y", 0.5}, {"q2", -0.5}});
    const MomentPlan plan = realize_on_grid(plan_frequencies({2 * kPi, 2 * kPi}, 2)[1], G);
    std::vector<ScalarField> v;
    for (const auto& e : plan.grid_exponents)
        v.push_back(ScalarField::sample(G, [&](double x, double y) { return std::exp(e[0] * x + e[1] * y); }));
    const ScalarField v_last = v.back();
    v.pop_back();
    const IdentityResult r = check_integral_identity(S, a, b, v, v_last);

    out.pass = equal_gap <= 10.0 * noise && r.relative_gap <= 0.02;
    out.detail = fmt("equal-through-order gap %.2e (<= 10 x noise %.2e), moment gap vs interior %.2e (<= 0.02)",
                     equal_gap, noise, r.relative_gap);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "forward exactness", 1.0, forward_exactness},
        {2, "well-posedness scaling", 30.0, wellposedness_scaling},
        {3, "first linearization", 30.0, first_linearization_slope},
        {4, "second linearization", 120.0, second_linearization},
        {5, "integral identity", 180.0, integral_identity},
        {6, "moment round trip", 60.0, moment_round_trip},
        {7, "end-to-end reconstruction", 600.0, reconstruction},
        {8, "cgo decay", 120.0, cgo_decay},
        {9, "uniqueness", 300.0, uniqueness},
    };
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));

    int failed = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool pass = o.pass && secs < c.time_limit;
        failed += pass ? 0 : 1;
        std::printf("%s %d %s: %s; %.1f s (< %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    o.detail.c_str(), secs, c.time_limit);
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
