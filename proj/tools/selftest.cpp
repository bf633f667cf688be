#include "commands.hpp"

#include "magsi/cgo.hpp"
#include "magsi/forward.hpp"
#include "magsi/linearize.hpp"
#include "magsi/reconstruct.hpp"

#include <functional>
#include <numbers>
#include <iostream>
#include <sstream>

namespace magsi::cli {

namespace {

struct Check {
    std::string name;
    std::function<double()> measure;
    double tol;
};

TaylorPotential q2_bump(const Grid& g) {
    PotentialSpec s;
    s.scales = {{"q2", 1.0}};
    return synth_potential(g, s);
}

}  // namespace

int run_selftest() {
    const Grid grid = build_grid(33, 33, Rect{});
    const ForwardSolver solver(grid);
    const TaylorPotential zero(grid, 3);
    const auto tr = [&](const std::string& name) { return trace(harmonic_by_name(grid, name)); };

    std::vector<Check> checks{
        {"u0 of x^2 - y^2 is exact",
         [&] { return (solver.solve_u0(tr("x2-y2")) - harmonic_by_name(grid, "x2-y2")).max_abs(); }, 1e-12},
        {"u0 of 1 is 1", [&] { return (solver.solve_u0(tr("1")) - harmonic_by_name(grid, "1")).max_abs(); }, 1e-12},
        {"zero potential gives F = 0",
         [&] {
             const ScalarField w = harmonic_by_name(grid, "xy");
             return nonlinear_rhs(w, w, zero).max_abs();
         },
         0.0},
        {"zero potential solves in one iteration",
         [&] {
             const auto s = solver.solve(complex(0.1) * tr("x"), zero);
             return std::abs(s.report.iterations - 1.0) + (s.u - solver.solve_u0(complex(0.1) * tr("x"))).max_abs();
         },
         1e-12},
        {"zero data gives zero solution",
         [&] { return solver.solve(BoundaryData(grid), q2_bump(grid)).u.max_abs(); }, 0.0},
        {"Lambda(1) = 0 without potential", [&] { return dtn_map(solver, tr("1"), zero).lambda_f.max_abs(); }, 1e-10},
        {"Lambda(x) = nu_1 without potential",
         [&] {
             const BoundaryData l = dtn_map(solver, tr("x"), zero).lambda_f;
             double err = 0.0;
             for (std::size_t b = 0; b < grid.boundary_count(); ++b)
                 err = std::max(err, std::abs(l[b] - grid.boundary_node(b).nx));
             return err;
         },
         1e-10},
        {"q2 only, constant w: F = -(q2/2) c^2",
         [&] {
             const TaylorPotential p = q2_bump(grid);
             const complex c = 0.3;
             const ScalarField f = nonlinear_rhs(ScalarField(grid), ScalarField::constant(grid, c), p);
             return (f + complex(0.5) * c * c * p.q(2)).max_abs();
         },
         1e-15},
        {"isotropic kinds satisfy zeta . zeta = 0",
         [&] {
             double worst = 0.0;
             for (auto k : {IsotropicKind::plus, IsotropicKind::minus, IsotropicKind::imaginary_first,
                            IsotropicKind::imaginary_first_mirror, IsotropicKind::scaled_plus,
                            IsotropicKind::scaled_minus}) {
                 const IsotropicDirection z = make_isotropic(k, complex(0.7, 0.2));
                 worst = std::max(worst, std::abs(z.self_dot()) / std::norm(z.norm()));
             }
             return worst;
         },
         1e-14},
        {"frequency plans meet the sum constraint",
         [&] {
             double worst = 0.0;
             for (const auto& p : plan_frequencies({2 * std::numbers::pi, 0.0}, 2)) worst = std::max(worst, p.sum_defect());
             for (const auto& p : plan_frequencies({2 * std::numbers::pi, -4 * std::numbers::pi}, 3)) worst = std::max(worst, p.sum_defect());
             return worst;
         },
         1e-12},
        {"moment system round trip",
         [&] {
             const auto plans = plan_frequencies({2 * std::numbers::pi, 2 * std::numbers::pi}, 2);
             const std::array<complex, 2> ma{complex(0.3, -0.1), complex(-0.2, 0.4)};
             const complex s{0.05, 0.07};
             std::vector<MomentSample> samples;
             for (const auto& p : plans) {
                 const auto sp = p.partial_sum();
                 samples.push_back({p, 3.0 * -I * (sp[0] * ma[0] + sp[1] * ma[1]) + s});
             }
             const MomentSolution r = solve_moment_system(samples, 2);
             return std::abs(r.M_A[0] - ma[0]) + std::abs(r.M_A[1] - ma[1]) + std::abs(r.s - s);
         },
         1e-12},
        {"K = 0 synthesis is the mean",
         [&] {
             const FourierLattice lat{0, 1.0, 1.0};
             const ScalarField f = synthesize(grid, lat, {complex(0.25, 0.5)});
             return (f - ScalarField::constant(grid, complex(0.25, 0.5))).max_abs();
         },
         1e-14},
        {"zero transport pair has zero residual",
         [&] {
             TransportPair tp;
             tp.F = VectorField(grid);
             tp.g = ScalarField(grid);
             tp.m = 2;
             return transport_residual(tp, harmonic_by_name(grid, "x2-y2")).max_abs();
         },
         0.0},
    };

    int failed = 0;
    for (const auto& c : checks) {
        double value = 0.0;
        bool ok = false;
        std::string detail;
        try {
            value = c.measure();
            ok = value <= c.tol;
            std::ostringstream os;
            os << value << " (tol " << c.tol << ")";
            detail = os.str();
        } catch (const std::exception& e) {
            detail = std::string("threw: ") + e.what();
        }
        std::cout << (ok ? "PASS " : "FAIL ") << c.name << ": " << detail << "\n";
        if (!ok) ++failed;
    }
    std::cout << checks.size() - static_cast<std::size_t>(failed) << "/" << checks.size() << " self-checks passed\n";
    return failed == 0 ? kOk : kThresholdViolation;
}

}  // namespace magsi::cli
