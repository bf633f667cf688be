#pragma once

/// Recovery of the order-m coefficients d^{m-1}A(x,0) and d^m q(x,0) from
/// mixed DtN data: exponential moments, a 3x3 solve per frequency and Fourier
/// synthesis; plus the transport identity used for local extraction.

#include "magsi/cgo.hpp"
#include "magsi/linearize.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace magsi {

using Frequency = std::array<double, 2>;

using Exponent = std::array<complex, 2>;

/// One choice of zeta_1 ... zeta_{m+1} with sum zeta_k = -i xi.
struct MomentPlan {
    Frequency xi{};
    std::vector<IsotropicDirection> zetas;
    /// Grid realization: e^{a x + b y} for (a, b) = grid_exponents[k] is exactly
    /// harmonic for the 5-point Laplacian, and the exponents still sum to -i xi.
    /// Empty for a continuum plan.
    std::vector<Exponent> grid_exponents;
    Grid grid;

    int order() const { return static_cast<int>(zetas.size()) - 1; }
    /// S = zeta_1 + ... + zeta_m.
    std::array<complex, 2> partial_sum() const;
    /// |sum zeta_k + i xi|
    double sum_defect() const;
    /// Exponent k: the grid realization when present, else zeta_k.
    Exponent exponent(int k) const;
};

struct MomentSample {
    MomentPlan plan;
    /// int Q^(m)(v_1, ..., v_m) v_{m+1} dx, recovered from boundary data.
    complex value;
};

/// Rows [(m+1)(-i) S_x, (m+1)(-i) S_y, 1] of the moment system in the unknowns (M_A, s).
Eigen::Matrix3cd moment_matrix(const std::vector<MomentPlan>& plans);
/// 2-norm condition number of moment_matrix after scaling every column to unit sup norm.
double moment_condition(const std::vector<MomentPlan>& plans);

/// Row r with sample = r . M_A + q_hat. Continuum plans give r = (m+1)(-i) S + m xi.
/// Grid plans replace each zeta by its central-difference symbol sigma:
/// r = -i sum_{k<=m} sigma_k + i m sigma_{m+1}.
std::array<complex, 2> moment_row(const MomentPlan& plan);

/// (sinh(a hx) / hx, sinh(b hy) / hy): grad_h e^{a x + b y} = sigma e^{a x + b y}.
Exponent difference_symbol(const Exponent& e, const Grid& grid);

/// (cosh(a hx) - 1) / hx^2 + (cosh(b hy) - 1) / hy^2; zero iff e^{a x + b y} is grid harmonic.
complex grid_dispersion(const Exponent& e, const Grid& grid);

/// Moves every exponent of `plan` onto the grid dispersion relation while keeping
/// the sum -i xi. Throws std::runtime_error when the projection fails to converge.
MomentPlan realize_on_grid(const MomentPlan& plan, const Grid& grid);

/// Three plans at xi != 0. The last exponent is 0, kappa mu (1, i) or kappa nu (1, -i)
/// where -i xi = mu (1, i) + nu (1, -i); kappa starts at 1/2 and is re-planned until
/// the condition number is at most `max_condition`.
/// Throws std::invalid_argument for xi = 0 or when no plan meets the threshold.
std::vector<MomentPlan> plan_frequencies(const Frequency& xi, int m, double max_condition = 100.0);

/// Three plans at xi = 0: all constants, and +-lambda pairs of either chirality.
std::vector<MomentPlan> plan_zero_frequency(int m, double lambda);

/// Boundary-flux term i m (nu . d^{m-1}A) f_1 ... f_m of a known potential.
struct FluxCorrection {
    const TaylorPotential* potential = nullptr;
    std::vector<BoundaryData> traces;
};

/// Boundary integral of (datum - correction) v_last.
/// Throws std::invalid_argument when v_last is not discretely harmonic.
complex moment_from_boundary(const LinearizedDatum& datum, const ScalarField& v_last,
                             const FluxCorrection& correction = {}, double harmonic_tol = 1e-8);

struct MomentSolution {
    std::array<complex, 2> M_A{};
    /// q_hat + m xi . M_A
    complex s;
    complex q_hat;
    /// Column-equilibrated condition number of the system actually solved.
    double condition = 0.0;
};

/// Solves sample = moment_row . M_A + q_hat for three samples at one frequency;
/// for continuum plans this is sample = (m+1)(-i) S . M_A + s.
/// Throws std::runtime_error when the condition number exceeds `max_condition`.
MomentSolution solve_moment_system(const std::vector<MomentSample>& samples, int m, double max_condition = 1e3);

/// Lattice xi = 2 pi (j / Lx, k / Ly), |j|, |k| <= K.
struct FourierLattice {
    int K = 0;
    double Lx = 1.0;
    double Ly = 1.0;

    std::size_t size() const { return static_cast<std::size_t>(2 * K + 1) * (2 * K + 1); }
    std::size_t index(int j, int k) const { return static_cast<std::size_t>(k + K) * (2 * K + 1) + (j + K); }
    Frequency xi(int j, int k) const;
};

/// Fourier transforms int f e^{-i xi . x} dx on a lattice.
struct FourierCoefficients {
    FourierLattice lattice;
    std::vector<complex> a_x;
    std::vector<complex> a_y;
    std::vector<complex> q;

    explicit FourierCoefficients(FourierLattice l = {})
        : lattice(l), a_x(l.size()), a_y(l.size()), q(l.size()) {}
};

/// Direct trapezoid quadrature of int f e^{-i xi . x} dx.
complex fourier_moment(const ScalarField& f, const Frequency& xi);

/// Truncated synthesis f(x) = (Lx Ly)^{-1} sum f^(xi) e^{i xi . x}.
ScalarField synthesize(const Grid& grid, const FourierLattice& lattice, const std::vector<complex>& coeffs);
std::pair<VectorField, ScalarField> invert_fourier(const Grid& grid, const FourierCoefficients& c);

struct RecoveryOptions {
    int m = 2;
    int K = 8;
    /// Amplitude of every exponential trace at the domain center.
    double eps = 1e-4;
    StencilOptions stencil{false, {1e-14, 100, false}};
    double max_plan_condition = 100.0;
    /// Known coefficients of orders below m; their data is subtracted.
    std::optional<TaylorPotential> lower_orders;
    /// Zero the recovered fields within this many cells of the boundary.
    int support_margin = 2;
};

struct FrequencyReport {
    Frequency xi{};
    double condition = 0.0;
    std::array<complex, 2> M_A{};
    complex q_hat;
    /// Largest log sup of a boundary trace among the three samples.
    double log_trace_max = 0.0;
};

struct RecoveryErrors {
    bool has_truth = false;
    double a_rel_l2 = 0.0;
    double q_rel_l2 = 0.0;
    double a_sup = 0.0;
    double q_sup = 0.0;
    double a_true_sup = 0.0;
    double q_true_sup = 0.0;
};

struct RecoveryResult {
    int m = 0;
    VectorField A_rec;
    ScalarField q_rec;
    FourierCoefficients coefficients;
    std::vector<FrequencyReport> frequencies;
    RecoveryErrors errors;
    int solves = 0;
};

/// Measures the three samples at one frequency through the oracle. Continuum
/// plans are realized on the solver grid first.
std::vector<MomentSample> measure_moments(const ForwardSolver& solver, const DtnOracle& oracle,
                                          const std::vector<MomentPlan>& plans, const RecoveryOptions& opt,
                                          const DtnOracle* reference = nullptr, int* solves = nullptr,
                                          double* log_trace_max = nullptr);

/// Full-data recovery of d^{m-1}A(x,0) and d^m q(x,0) from a black-box oracle.
/// `truth`, when given, is used only for the error report.
RecoveryResult recover_order_m(const ForwardSolver& solver, const DtnOracle& oracle, const RecoveryOptions& opt,
                               const TaylorPotential* truth = nullptr);

/// Relative L2 distance |a - b| / |b| (trapezoid), or |a| when b = 0.
double relative_l2(const ScalarField& a, const ScalarField& b);
double relative_l2(const VectorField& a, const VectorField& b);

// ---------------------------------------------------------------------------
// Transport identity

/// F = -(m+1) A~, g = -(D . A~) + q~ for the coefficient differences
/// A~ = d^{m-1}(A1 - A2)(x,0), q~ = d^m(q1 - q2)(x,0).
struct TransportPair {
    VectorField F;
    ScalarField g;
    int m = 0;

    static TransportPair from_potentials(const TaylorPotential& p1, const TaylorPotential& p2, int m);
};

/// F . Dv + g v with D = -i grad. Throws std::invalid_argument for non-harmonic v.
ScalarField transport_residual(const TransportPair& tp, const ScalarField& v, double harmonic_tol = 1e-6);

struct LocalRow {
    double h = 0.0;
    /// sup over {x1 > -c} of |R(h)| = |h F . Dw~ e^{i x.zeta/h} + h g + h g w~ e^{i x.zeta/h}|
    double sup_remainder = 0.0;
    /// sup over {x1 > -c} of |h (F . Dv + g v) e^{i x.zeta/h}|; zero when the pair satisfies the identity.
    double sup_residual = 0.0;
};

struct LocalKindReport {
    IsotropicKind kind{};
    std::vector<LocalRow> rows;
};

struct LocalExtractionReport {
    std::vector<LocalKindReport> kinds;
    /// sup near x0 of |F_1|, |F_2| read off F . zeta = R(h) at the smallest h,
    /// which presumes F . Dv + g v = 0.
    double f1_estimate = 0.0;
    double f2_estimate = 0.0;
    /// sup near x0 of the true |F_1|, |F_2|.
    double f1_true = 0.0;
    double f2_true = 0.0;
    /// sup of the scaled transport residual over every kind and h.
    double max_residual = 0.0;
    /// sup_remainder decreases as h decreases, for every kind.
    bool monotone = false;
};

/// With corrected exponentials v for zeta = (i, 1) and (i, -1), the transport
/// identity gives F . zeta = R(h) on {x1 > -c}. F_1 and F_2 follow from the two
/// chiralities; they are reported near x0 = (0, 0) (nodes within distance c).
/// The grid must lie in {x1 <= 0}.
LocalExtractionReport local_extraction(const PoissonSolver& solver, const TransportPair& tp,
                                       const std::vector<double>& h_list, double c);

}  // namespace magsi
