#include "magsi/forward.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace magsi {

ForwardSolver::ForwardSolver(Grid grid) : poisson_(std::move(grid)) {}

ScalarField ForwardSolver::solve_u0(const BoundaryData& f) const { return poisson_.harmonic_extension(f); }

ScalarField solve_u0(const ForwardSolver& solver, const BoundaryData& f) { return solver.solve_u0(f); }

namespace {

// Orders whose coefficient fields are not identically zero.
struct ActiveOrders {
    std::vector<int> a;
    std::vector<int> q;
};

ActiveOrders active_orders(const TaylorPotential& p) {
    ActiveOrders act;
    for (int k = 1; k <= p.order(); ++k)
        if (p.A(k).max_abs() > 0.0) act.a.push_back(k);
    for (int k = 2; k <= p.order(); ++k)
        if (p.q(k).max_abs() > 0.0) act.q.push_back(k);
    return act;
}

double inverse_factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return 1.0 / f;
}

}  // namespace

ScalarField nonlinear_rhs(const ScalarField& v, const ScalarField& u0, const TaylorPotential& p) {
    require_same_grid(v.grid(), u0.grid(), "nonlinear_rhs");
    require_same_grid(v.grid(), p.grid(), "nonlinear_rhs");
    const Grid& g = v.grid();
    const ActiveOrders act = active_orders(p);
    if (act.a.empty() && act.q.empty()) return ScalarField(g);

    // Per node: A_r, q_r, then X = A_r w^2, Y = A_r w and the algebraic terms.
    const Eigen::Index n = static_cast<Eigen::Index>(g.node_count());
    const CVector w = u0.values() + v.values();
    CVector xx(n), xy(n), yx(n), yy(n), alg(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const complex wi = w[i];
        complex arx = 0.0, ary = 0.0, qr = 0.0;
        for (int k : act.a) {
            const complex c = std::pow(wi, k - 1) * inverse_factorial(k);
            arx += p.A(k).x.values()[i] * c;
            ary += p.A(k).y.values()[i] * c;
        }
        for (int k : act.q) qr += p.q(k).values()[i] * std::pow(wi, k - 2) * inverse_factorial(k);
        const complex w2 = wi * wi;
        xx[i] = arx * w2;
        xy[i] = ary * w2;
        yx[i] = arx * wi;
        yy[i] = ary * wi;
        alg[i] = (arx * arx + ary * ary) * w2 * wi + qr * w2;
    }

    // D = -i grad, so -D.X = i div X and -Y . Dw = i Y . grad w.
    const ScalarField wf(g, w);
    const ScalarField div = divergence(VectorField(ScalarField(g, std::move(xx)), ScalarField(g, std::move(xy))));
    const VectorField gw = gradient(wf);
    CVector out(n);
    for (Eigen::Index i = 0; i < n; ++i)
        out[i] = I * (div.values()[i] + yx[i] * gw.x.values()[i] + yy[i] * gw.y.values()[i]) - alg[i];
    return ScalarField(g, std::move(out));
}

NonlinearSolution ForwardSolver::solve(const BoundaryData& f, const TaylorPotential& p, const SolveOptions& opt) const {
    require_same_grid(grid(), f.grid, "solve_nonlinear");
    require_same_grid(grid(), p.grid(), "solve_nonlinear");
    if (!(opt.tol > 0.0) || opt.max_iter < 1) throw std::invalid_argument("solve_nonlinear: need tol > 0 and max_iter >= 1");

    NonlinearSolution sol;
    SolveReport& rep = sol.report;
    rep.f_norm = f.max_abs();
    sol.u0 = poisson_.harmonic_extension(f);
    sol.v = ScalarField(grid());

    const double blowup = 1e6 * (sol.u0.max_abs() + 1.0);
    for (int k = 1; k <= opt.max_iter; ++k) {
        ScalarField next = poisson_.solve(nonlinear_rhs(sol.v, sol.u0, p));
        const double update = (next.values() - sol.v.values()).cwiseAbs().maxCoeff();
        const double size = next.max_abs();
        sol.v = std::move(next);
        rep.iterations = k;
        rep.update_norms.push_back(update);
        rep.final_update_norm = size > 0.0 ? update / size : update;

        if (!std::isfinite(update) || size > blowup) break;
        if (update == 0.0 || update <= opt.tol * size) {
            rep.converged = true;
            break;
        }
    }

    const auto& un = rep.update_norms;
    const double floor = 1e2 * opt.tol * sol.v.max_abs();
    for (std::size_t k = 1; k < un.size(); ++k)
        if (un[k - 1] > 0.0 && un[k] > floor) rep.contraction_ratio = std::max(rep.contraction_ratio, un[k] / un[k - 1]);

    sol.u = sol.u0 + sol.v;
    if (!rep.converged)
        rep.residual_norm = std::numeric_limits<double>::infinity();
    else if (opt.compute_residual)
        rep.residual_norm = pde_residual(sol.u, p);
    if (!rep.converged) {
        std::ostringstream os;
        os << "nonlinear iteration did not converge after " << rep.iterations << " iterations (relative update "
           << rep.final_update_norm << ", |f| = " << rep.f_norm << ")";
        throw NonConvergenceError(os.str(), rep);
    }
    return sol;
}

NonlinearSolution solve_nonlinear(const ForwardSolver& solver, const BoundaryData& f, const TaylorPotential& p,
                                  const SolveOptions& opt) {
    return solver.solve(f, p, opt);
}

ScalarField pde_operator(const ScalarField& u, const TaylorPotential& p) {
    require_same_grid(u.grid(), p.grid(), "pde_residual");
    const VectorField a = eval_A(p, u);
    const ScalarField q = eval_q(p, u);
    ScalarField r = complex(-1.0) * laplacian(u);
    r -= I * divergence(a * u);
    r -= I * dot(a, gradient(u));
    r += dot(a, a) * u;
    r += q;
    const Grid& g = u.grid();
    for (const auto& n : g.boundary_nodes()) r(n.ix, n.iy) = 0.0;
    return r;
}

double pde_residual(const ScalarField& u, const TaylorPotential& p) { return pde_operator(u, p).max_abs_interior(); }

BoundaryData conormal_flux(const ScalarField& u, const TaylorPotential& p) {
    BoundaryData flux = normal_derivative(u);
    if (!p.is_zero()) flux += I * normal_component(eval_A(p, u)) * trace(u);
    return flux;
}

DtNSample dtn_map(const ForwardSolver& solver, const BoundaryData& f, const TaylorPotential& p, const SolveOptions& opt) {
    NonlinearSolution sol = solver.solve(f, p, opt);
    DtNSample s;
    s.f = f;
    s.lambda_nonlinear = normal_derivative(sol.v);
    if (!p.is_zero()) s.lambda_nonlinear += I * normal_component(eval_A(p, sol.u)) * trace(sol.u);
    s.lambda_f = normal_derivative(sol.u0) + s.lambda_nonlinear;
    s.report = std::move(sol.report);
    return s;
}

BoundaryData partial_dtn(const ForwardSolver& solver, const BoundaryData& f, const BoundarySegment& gamma1,
                         const BoundarySegment& gamma2, const TaylorPotential& p, const SolveOptions& opt) {
    if (gamma1.empty() || gamma2.empty()) throw std::invalid_argument("partial_dtn: empty boundary segment");
    if (!f.supported_in(gamma1)) throw std::invalid_argument("partial_dtn: Dirichlet data not supported in Gamma1");
    return dtn_map(solver, f, p, opt).lambda_f.restricted(gamma2);
}

DtnOracle make_dtn_oracle(const ForwardSolver& solver, TaylorPotential p, SolveOptions opt) {
    return [&solver, p = std::move(p), opt](const BoundaryData& f) { return dtn_map(solver, f, p, opt); };
}

BoundaryData linear_dtn(const ForwardSolver& solver, const BoundaryData& f) {
    return normal_derivative(solver.solve_u0(f));
}

}  // namespace magsi
