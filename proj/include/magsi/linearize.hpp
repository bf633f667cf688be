#pragma once

/// Higher-order linearization of the DtN map: mixed central difference
/// stencils in the amplitudes eps_k, the source terms Q^(m) and the
/// integral identity linking them to boundary data.

#include "magsi/forward.hpp"

#include <string>
#include <vector>

namespace magsi {

inline constexpr int kMaxLinearizationOrder = 4;

/// Boundary data f = eps_1 f_1 + ... + eps_m f_m.
struct EpsFamily {
    std::vector<BoundaryData> traces;
    std::vector<double> eps;

    int order() const { return static_cast<int>(traces.size()); }
    /// Throws std::invalid_argument unless 1 <= m <= 4, sizes match and every eps > 0.
    void validate() const;
    /// Same traces with every eps scaled by `factor`.
    EpsFamily scaled(double factor) const;
};

struct StencilOptions {
    /// One level of Richardson extrapolation: (4 D(eps/2) - D(eps)) / 3.
    bool richardson = true;
    SolveOptions solve;
};

struct LinearizedDatum {
    int order = 0;
    /// Approximation of d_eps1 ... d_epsm Lambda at eps = 0, on every boundary node.
    BoundaryData value;
    std::vector<double> eps;
    std::string stencil;
    int richardson_level = 0;
    /// Unextrapolated stencil at the base eps.
    BoundaryData coarse;
    /// Sup of D(eps/2) - D(eps); a stencil error estimate.
    double richardson_delta = 0.0;
    int solves = 0;
};

/// Harmonic extension of f; the same operator as ForwardSolver::solve_u0.
ScalarField first_linearization(const ForwardSolver& solver, const BoundaryData& f);

/// 3 dA . (v1 Dv2 + v2 Dv1) + 2 (D . dA) v1 v2 + d^2q v1 v2, dA = d_z A(x, 0).
ScalarField build_Q2(const ScalarField& v1, const ScalarField& v2, const TaylorPotential& p);

/// (m+1) d^{m-1}A . D(v1...vm) + m (D . d^{m-1}A) v1...vm + d^m q v1...vm, 2 <= m <= 4.
ScalarField build_Qm(const std::vector<ScalarField>& v, const TaylorPotential& p);

struct LinearizationSolution {
    /// Solution of -Lap w + Q^(m) = 0, w = 0 on the boundary.
    ScalarField w;
    /// dnu w + i m (nu . d^{m-1}A) f_1 ... f_m on every boundary node.
    BoundaryData predicted;
};

/// Throws std::invalid_argument when an input is not discretely harmonic
/// (relative defect above `harmonic_tol`).
LinearizationSolution solve_second_linearization(const ForwardSolver& solver, const ScalarField& v1,
                                                 const ScalarField& v2, const TaylorPotential& p,
                                                 double harmonic_tol = 1e-8);
LinearizationSolution solve_linearization(const ForwardSolver& solver, const std::vector<ScalarField>& v,
                                          const TaylorPotential& p, double harmonic_tol = 1e-8);

/// Central 2^m stencil of eps -> Lambda(sum eps_k f_k). The part of Lambda that
/// is linear in f is added analytically, so only the nonlinear part is differenced.
/// Throws NonConvergenceError naming the failing corner's sign pattern.
LinearizedDatum mixed_dtn_derivative(const ForwardSolver& solver, const EpsFamily& fam, const TaylorPotential& p,
                                     const StencilOptions& opt = {});

/// Stencil over an arbitrary oracle; uses its `lambda_nonlinear` output.
LinearizedDatum mixed_dtn_derivative(const ForwardSolver& solver, const EpsFamily& fam, const DtnOracle& oracle,
                                     const StencilOptions& opt = {});

/// The same stencil applied to the solution field u(sum eps_k f_k).
ScalarField mixed_solution_derivative(const ForwardSolver& solver, const EpsFamily& fam, const TaylorPotential& p,
                                      const StencilOptions& opt = {});

struct IdentityOptions {
    double eps = 1e-2;
    StencilOptions stencil;
    /// Traces of the first m fields must lie in gamma1, the last one in gamma2.
    BoundarySegment gamma1;
    BoundarySegment gamma2;
    double harmonic_tol = 1e-8;
};

struct IdentityResult {
    int order = 0;
    /// Interior integral of (Q1 - Q2) v_last.
    complex lhs;
    /// Boundary integral of (datum1 - datum2) v_last.
    complex rhs;
    double gap = 0.0;
    double relative_gap = 0.0;
};

/// Throws std::invalid_argument when P1 and P2 differ below order m, a potential
/// is not compactly supported, an input is not harmonic or a trace leaves its segment.
IdentityResult check_integral_identity(const ForwardSolver& solver, const TaylorPotential& p1,
                                       const TaylorPotential& p2, const std::vector<ScalarField>& v,
                                       const ScalarField& v_last, const IdentityOptions& opt = {});

}  // namespace magsi
