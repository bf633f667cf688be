#pragma once

/// Forward problem (D + A(x,u))^2 u + q(x,u) = 0, u = f on the boundary, with
/// D = -i grad, solved by the fixed point v <- (-Lap)^{-1} F(v), u = u0 + v.

#include "magsi/mesh.hpp"
#include "magsi/potentials.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace magsi {

struct SolveOptions {
    /// Stop once ||v_k - v_{k-1}|| <= tol * ||v_k|| (sup norms).
    double tol = 1e-12;
    int max_iter = 100;
    /// Evaluate the PDE residual of the converged solution for the report.
    bool compute_residual = true;
};

struct SolveReport {
    int iterations = 0;
    /// Last relative update norm ||v_k - v_{k-1}|| / ||v_k||.
    double final_update_norm = 0.0;
    /// Sup of the expanded PDE operator over interior nodes.
    double residual_norm = 0.0;
    bool converged = false;
    /// Sup norm of the Dirichlet data.
    double f_norm = 0.0;
    /// Absolute update norms, one per iteration.
    std::vector<double> update_norms;
    /// Largest ratio of consecutive update norms (0 when fewer than two updates are nonzero).
    double contraction_ratio = 0.0;
};

class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& what, SolveReport report)
        : std::runtime_error(what), report_(std::move(report)) {}
    const SolveReport& report() const { return report_; }

private:
    SolveReport report_;
};

struct NonlinearSolution {
    ScalarField u;
    /// Harmonic extension of f.
    ScalarField u0;
    /// u - u0, computed directly by the iteration (no cancellation).
    ScalarField v;
    SolveReport report;
};

struct DtNSample {
    BoundaryData f;
    /// nu . (grad u + i A(x,u) u) on every boundary node.
    BoundaryData lambda_f;
    /// Part of lambda_f that is nonlinear in f: nu . grad v + i (nu . A(x,u)) u.
    BoundaryData lambda_nonlinear;
    SolveReport report;
};

/// Holds the factorized Dirichlet Laplacian of one grid. Const methods are thread-safe.
class ForwardSolver {
public:
    explicit ForwardSolver(Grid grid);

    const Grid& grid() const { return poisson_.grid(); }
    const PoissonSolver& poisson() const { return poisson_; }

    ScalarField solve_u0(const BoundaryData& f) const;
    /// Throws NonConvergenceError when the iteration fails to contract.
    NonlinearSolution solve(const BoundaryData& f, const TaylorPotential& p, const SolveOptions& opt = {}) const;

private:
    PoissonSolver poisson_;
};

ScalarField solve_u0(const ForwardSolver& solver, const BoundaryData& f);

/// F(v) = -D.[A_r(w) w^2] - A_r(w) w . Dw - (A_r . A_r)(w) w^3 - q_r(w) w^2, w = u0 + v.
ScalarField nonlinear_rhs(const ScalarField& v, const ScalarField& u0, const TaylorPotential& p);

NonlinearSolution solve_nonlinear(const ForwardSolver& solver, const BoundaryData& f, const TaylorPotential& p,
                                  const SolveOptions& opt = {});

/// Interior field of -Lap u + D.(A(u) u) + A(u) . Du + (A . A)(u) u + q(u).
ScalarField pde_operator(const ScalarField& u, const TaylorPotential& p);
/// Sup of pde_operator over interior nodes.
double pde_residual(const ScalarField& u, const TaylorPotential& p);

/// nu . (grad u + i A(x,u) u).
BoundaryData conormal_flux(const ScalarField& u, const TaylorPotential& p);

DtNSample dtn_map(const ForwardSolver& solver, const BoundaryData& f, const TaylorPotential& p,
                  const SolveOptions& opt = {});

/// Lambda(f) restricted to gamma2; f must vanish outside gamma1.
BoundaryData partial_dtn(const ForwardSolver& solver, const BoundaryData& f, const BoundarySegment& gamma1,
                         const BoundarySegment& gamma2, const TaylorPotential& p, const SolveOptions& opt = {});

/// Black-box boundary measurement f -> DtNSample for a fixed hidden potential.
using DtnOracle = std::function<DtNSample(const BoundaryData&)>;

/// Oracle backed by `p`; the solver must outlive the oracle.
DtnOracle make_dtn_oracle(const ForwardSolver& solver, TaylorPotential p, SolveOptions opt = {});

/// DtN map of the Laplacian (zero potential), no iteration.
BoundaryData linear_dtn(const ForwardSolver& solver, const BoundaryData& f);

}  // namespace magsi
