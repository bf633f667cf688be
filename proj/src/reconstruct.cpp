#include "magsi/reconstruct.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace magsi {

std::array<complex, 2> MomentPlan::partial_sum() const {
    std::array<complex, 2> s{};
    for (int k = 0; k < order(); ++k) {
        s[0] += zetas[static_cast<std::size_t>(k)][0];
        s[1] += zetas[static_cast<std::size_t>(k)][1];
    }
    return s;
}

double MomentPlan::sum_defect() const {
    complex sx = I * xi[0], sy = I * xi[1];
    for (const auto& z : zetas) {
        sx += z[0];
        sy += z[1];
    }
    return std::hypot(std::abs(sx), std::abs(sy));
}

Exponent MomentPlan::exponent(int k) const {
    const auto i = static_cast<std::size_t>(k);
    if (!grid_exponents.empty()) return grid_exponents[i];
    return {zetas[i][0], zetas[i][1]};
}

Exponent difference_symbol(const Exponent& e, const Grid& grid) {
    const double hx = grid.hx(), hy = grid.hy();
    return {std::sinh(e[0] * hx) / hx, std::sinh(e[1] * hy) / hy};
}

complex grid_dispersion(const Exponent& e, const Grid& grid) {
    const double hx = grid.hx(), hy = grid.hy();
    // cosh z - 1 = 2 sinh^2(z/2), without cancellation
    const complex sx = std::sinh(0.5 * e[0] * hx), sy = std::sinh(0.5 * e[1] * hy);
    return 2.0 * sx * sx / (hx * hx) + 2.0 * sy * sy / (hy * hy);
}

namespace {

constexpr int kNewtonSteps = 50;

double dispersion_tol(const Exponent& e) { return 1e-13 * (1.0 + std::norm(e[0]) + std::norm(e[1])); }

// Keeps a fixed, moves b onto the dispersion relation.
Exponent realize_single(Exponent e, const Grid& g) {
    if (e[0] == 0.0 && e[1] == 0.0) return e;
    const double hy = g.hy();
    for (int it = 0; it < kNewtonSteps; ++it) {
        const complex phi = grid_dispersion(e, g);
        if (std::abs(phi) <= dispersion_tol(e)) return e;
        e[1] -= phi / (std::sinh(e[1] * hy) / hy);
    }
    throw std::runtime_error("realize_on_grid: single exponent projection did not converge");
}

// Finds d with t/2 + d and t/2 - d both on the dispersion relation, starting from d.
std::pair<Exponent, Exponent> realize_pair(const Exponent& t, Exponent d, const Grid& g) {
    const double hx = g.hx(), hy = g.hy();
    for (int it = 0; it < kNewtonSteps; ++it) {
        const Exponent p{0.5 * t[0] + d[0], 0.5 * t[1] + d[1]};
        const Exponent q{0.5 * t[0] - d[0], 0.5 * t[1] - d[1]};
        const complex f1 = grid_dispersion(p, g), f2 = grid_dispersion(q, g);
        if (std::abs(f1) <= dispersion_tol(p) && std::abs(f2) <= dispersion_tol(q)) return {p, q};
        const complex j11 = std::sinh(p[0] * hx) / hx, j12 = std::sinh(p[1] * hy) / hy;
        const complex j21 = -std::sinh(q[0] * hx) / hx, j22 = -std::sinh(q[1] * hy) / hy;
        const complex det = j11 * j22 - j12 * j21;
        if (std::abs(det) == 0.0) break;
        d[0] -= (j22 * f1 - j12 * f2) / det;
        d[1] -= (-j21 * f1 + j11 * f2) / det;
    }
    throw std::runtime_error("realize_on_grid: exponent pair projection did not converge");
}

}  // namespace

MomentPlan realize_on_grid(const MomentPlan& plan, const Grid& grid) {
    const int n = static_cast<int>(plan.zetas.size());
    if (n < 3) throw std::invalid_argument("realize_on_grid: plan needs at least three exponents");
    MomentPlan out = plan;
    out.grid = grid;
    out.grid_exponents.assign(static_cast<std::size_t>(n), Exponent{});
    // zetas[0] and zetas[1] carry the sum constraint; the rest are projected alone.
    Exponent t{-I * plan.xi[0], -I * plan.xi[1]};
    for (int k = 2; k < n; ++k) {
        const auto& z = plan.zetas[static_cast<std::size_t>(k)];
        const Exponent e = realize_single({z[0], z[1]}, grid);
        out.grid_exponents[static_cast<std::size_t>(k)] = e;
        t[0] -= e[0];
        t[1] -= e[1];
    }
    const auto& z0 = plan.zetas[0];
    const auto& z1 = plan.zetas[1];
    if (z1.is_zero() || z0.is_zero()) {
        // the other carrier is -(sum of the rest), already on the relation by symmetry
        out.grid_exponents[z1.is_zero() ? 0 : 1] = t;
        if (std::abs(grid_dispersion(t, grid)) > 1e-10 * (1.0 + std::norm(t[0]) + std::norm(t[1])))
            throw std::runtime_error("realize_on_grid: a single carrier cannot absorb the sum constraint");
    } else {
        const auto [p, q] = realize_pair(t, {0.5 * (z0[0] - z1[0]), 0.5 * (z0[1] - z1[1])}, grid);
        out.grid_exponents[0] = p;
        out.grid_exponents[1] = q;
    }
    return out;
}

std::array<complex, 2> moment_row(const MomentPlan& plan) {
    const int m = plan.order();
    if (plan.grid_exponents.empty()) {
        const auto s = plan.partial_sum();
        const double dm = m;
        return {(dm + 1.0) * -I * s[0] + dm * plan.xi[0], (dm + 1.0) * -I * s[1] + dm * plan.xi[1]};
    }
    std::array<complex, 2> r{};
    for (int k = 0; k <= m; ++k) {
        const Exponent sg = difference_symbol(plan.exponent(k), plan.grid);
        const complex c = k < m ? -I : I * static_cast<double>(m);
        r[0] += c * sg[0];
        r[1] += c * sg[1];
    }
    return r;
}

Eigen::Matrix3cd moment_matrix(const std::vector<MomentPlan>& plans) {
    if (plans.size() != 3) throw std::invalid_argument("moment system needs exactly three plans");
    Eigen::Matrix3cd a;
    for (int r = 0; r < 3; ++r) {
        const MomentPlan& p = plans[static_cast<std::size_t>(r)];
        const auto s = p.partial_sum();
        const complex f = (p.order() + 1.0) * -I;
        a(r, 0) = f * s[0];
        a(r, 1) = f * s[1];
        a(r, 2) = 1.0;
    }
    return a;
}

namespace {

double scaled_condition(Eigen::Matrix3cd a) {
    for (int c = 0; c < 3; ++c) {
        const double m = a.col(c).cwiseAbs().maxCoeff();
        if (m > 0.0) a.col(c) /= m;
    }
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(Eigen::MatrixXcd(a)).singularValues();
    return sv(2) > 0.0 ? sv(0) / sv(2) : std::numeric_limits<double>::infinity();
}

// -i xi = mu (1, i) + nu (1, -i)
std::pair<complex, complex> chirality_split(const Frequency& xi) {
    return {0.5 * (-I * xi[0] - xi[1]), 0.5 * (-I * xi[0] + xi[1])};
}

MomentPlan make_plan(const Frequency& xi, int m, complex mu, complex nu, const IsotropicDirection& last) {
    MomentPlan p;
    p.xi = xi;
    p.zetas.push_back(IsotropicDirection::plus(mu));
    p.zetas.push_back(IsotropicDirection::minus(nu));
    for (int k = 2; k < m; ++k) p.zetas.emplace_back();
    p.zetas.push_back(last);
    return p;
}

}  // namespace

double moment_condition(const std::vector<MomentPlan>& plans) { return scaled_condition(moment_matrix(plans)); }

std::vector<MomentPlan> plan_frequencies(const Frequency& xi, int m, double max_condition) {
    if (m < 2 || m > kMaxLinearizationOrder) throw std::invalid_argument("plan_frequencies: order out of range");
    if (xi[0] == 0.0 && xi[1] == 0.0)
        throw std::invalid_argument("plan_frequencies: xi = 0 needs the zero-frequency plan");
    const auto [mu, nu] = chirality_split(xi);
    double best = std::numeric_limits<double>::infinity();
    for (double kappa : {0.5, 1.0, 0.75, 0.25}) {
        std::vector<MomentPlan> plans{
            make_plan(xi, m, mu, nu, IsotropicDirection()),
            make_plan(xi, m, (1.0 - kappa) * mu, nu, IsotropicDirection::plus(kappa * mu)),
            make_plan(xi, m, mu, (1.0 - kappa) * nu, IsotropicDirection::minus(kappa * nu)),
        };
        const double cond = moment_condition(plans);
        best = std::min(best, cond);
        if (cond <= max_condition) return plans;
    }
    std::ostringstream os;
    os << "plan_frequencies: no plan with condition <= " << max_condition << " (best " << best << ")";
    throw std::invalid_argument(os.str());
}

std::vector<MomentPlan> plan_zero_frequency(int m, double lambda) {
    if (m < 2 || m > kMaxLinearizationOrder) throw std::invalid_argument("plan_zero_frequency: order out of range");
    if (!(lambda > 0.0)) throw std::invalid_argument("plan_zero_frequency: lambda must be positive");
    const Frequency zero{0.0, 0.0};
    return {
        make_plan(zero, m, 0.0, 0.0, IsotropicDirection()),
        make_plan(zero, m, -lambda, 0.0, IsotropicDirection::plus(lambda)),
        make_plan(zero, m, 0.0, -lambda, IsotropicDirection::minus(lambda)),
    };
}

complex moment_from_boundary(const LinearizedDatum& datum, const ScalarField& v_last, const FluxCorrection& correction,
                             double harmonic_tol) {
    require_same_grid(datum.value.grid, v_last.grid(), "moment_from_boundary");
    const double defect = harmonic_defect(v_last);
    if (!(defect <= harmonic_tol)) {
        std::ostringstream os;
        os << "moment_from_boundary: v_last is not discretely harmonic (relative defect " << defect << ")";
        throw std::invalid_argument(os.str());
    }
    BoundaryData flux = datum.value;
    if (correction.potential != nullptr) {
        const int m = datum.order;
        const VectorField& a = correction.potential->A(m - 1);
        if (a.max_abs() > 0.0) {
            BoundaryData prod = BoundaryData::sample(v_last.grid(), [](double, double) { return complex(1.0); });
            for (const auto& f : correction.traces) prod = prod * f;
            flux -= complex(0.0, m) * normal_component(a) * prod;
        }
    }
    return integrate_boundary(flux * trace(v_last));
}

MomentSolution solve_moment_system(const std::vector<MomentSample>& samples, int m, double max_condition) {
    if (samples.size() != 3) throw std::invalid_argument("solve_moment_system: need three samples");
    Eigen::Matrix3cd a;
    Eigen::Vector3cd b;
    for (int r = 0; r < 3; ++r) {
        const MomentPlan& p = samples[static_cast<std::size_t>(r)].plan;
        if (p.order() != m) throw std::invalid_argument("solve_moment_system: sample order mismatch");
        const auto row = moment_row(p);
        a(r, 0) = row[0];
        a(r, 1) = row[1];
        a(r, 2) = 1.0;
        b(r) = samples[static_cast<std::size_t>(r)].value;
    }
    MomentSolution s;
    s.condition = scaled_condition(a);
    if (!(s.condition <= max_condition)) {
        std::ostringstream os;
        os << "solve_moment_system: ill-conditioned system (condition " << s.condition << ")";
        throw std::runtime_error(os.str());
    }
    const Eigen::Vector3cd x = a.fullPivLu().solve(b);
    s.M_A = {x(0), x(1)};
    s.q_hat = x(2);
    const Frequency& xi = samples.front().plan.xi;
    s.s = s.q_hat + static_cast<double>(m) * (xi[0] * s.M_A[0] + xi[1] * s.M_A[1]);
    return s;
}

Frequency FourierLattice::xi(int j, int k) const {
    return {2.0 * std::numbers::pi * j / Lx, 2.0 * std::numbers::pi * k / Ly};
}

complex fourier_moment(const ScalarField& f, const Frequency& xi) {
    const Grid& g = f.grid();
    ScalarField e(g);
    for (int iy = 0; iy < g.ny(); ++iy)
        for (int ix = 0; ix < g.nx(); ++ix) e(ix, iy) = f(ix, iy) * std::exp(-I * (xi[0] * g.x(ix) + xi[1] * g.y(iy)));
    return integrate_interior(e);
}

ScalarField synthesize(const Grid& grid, const FourierLattice& lattice, const std::vector<complex>& coeffs) {
    if (coeffs.size() != lattice.size()) throw std::invalid_argument("synthesize: coefficient count mismatch");
    const int K = lattice.K;
    const double inv_area = 1.0 / (lattice.Lx * lattice.Ly);
    // separable: e^{i xi.x} = e^{i xi_1 x} e^{i xi_2 y}
    std::vector<CVector> ex(static_cast<std::size_t>(2 * K + 1)), ey(static_cast<std::size_t>(2 * K + 1));
    for (int j = -K; j <= K; ++j) {
        const Frequency xi = lattice.xi(j, j);
        CVector cx(grid.nx()), cy(grid.ny());
        for (int ix = 0; ix < grid.nx(); ++ix) cx[ix] = std::exp(I * (xi[0] * grid.x(ix)));
        for (int iy = 0; iy < grid.ny(); ++iy) cy[iy] = std::exp(I * (xi[1] * grid.y(iy)));
        ex[static_cast<std::size_t>(j + K)] = std::move(cx);
        ey[static_cast<std::size_t>(j + K)] = std::move(cy);
    }
    ScalarField f(grid);
    for (int iy = 0; iy < grid.ny(); ++iy)
        for (int k = -K; k <= K; ++k) {
            // row sum over j for fixed k
            const complex yk = ey[static_cast<std::size_t>(k + K)][iy] * inv_area;
            for (int j = -K; j <= K; ++j) {
                const complex c = coeffs[lattice.index(j, k)] * yk;
                if (c == 0.0) continue;
                const CVector& xj = ex[static_cast<std::size_t>(j + K)];
                for (int ix = 0; ix < grid.nx(); ++ix) f(ix, iy) += c * xj[ix];
            }
        }
    return f;
}

std::pair<VectorField, ScalarField> invert_fourier(const Grid& grid, const FourierCoefficients& c) {
    return {VectorField(synthesize(grid, c.lattice, c.a_x), synthesize(grid, c.lattice, c.a_y)),
            synthesize(grid, c.lattice, c.q)};
}

namespace {

struct ExpTrace {
    BoundaryData trace;
    double shift = 0.0;
};

// e^{e . (x - x_c)} on the boundary, x_c the domain center; shift = Re e . x_c.
ExpTrace exponential_trace(const Grid& g, const Exponent& e) {
    const Rect& r = g.rect();
    ExpTrace t;
    t.shift = (e[0] * (0.5 * (r.x_min + r.x_max)) + e[1] * (0.5 * (r.y_min + r.y_max))).real();
    t.trace = BoundaryData::sample(g, [&](double x, double y) { return std::exp(e[0] * x + e[1] * y - t.shift); });
    return t;
}

double l2_norm_sq(const ScalarField& f) {
    ScalarField a(f.grid());
    a.values() = f.values().cwiseAbs2().cast<complex>();
    return integrate_interior(a).real();
}

}  // namespace

std::vector<MomentSample> measure_moments(const ForwardSolver& solver, const DtnOracle& oracle,
                                          const std::vector<MomentPlan>& plans, const RecoveryOptions& opt,
                                          const DtnOracle* reference, int* solves, double* log_trace_max) {
    const Grid& g = solver.grid();
    std::vector<MomentSample> out;
    for (const MomentPlan& given : plans) {
        const MomentPlan plan = given.grid_exponents.empty() ? realize_on_grid(given, g) : given;
        const int m = plan.order();
        EpsFamily fam;
        double shift = 0.0;
        double log_max = 0.0;
        for (int k = 0; k < m; ++k) {
            ExpTrace t = exponential_trace(g, plan.exponent(k));
            shift += t.shift;
            log_max = std::max(log_max, std::log(t.trace.max_abs()));
            fam.traces.push_back(std::move(t.trace));
            fam.eps.push_back(opt.eps);
        }
        const ExpTrace last = exponential_trace(g, plan.exponent(m));
        shift += last.shift;
        log_max = std::max(log_max, std::log(last.trace.max_abs()));

        LinearizedDatum datum = mixed_dtn_derivative(solver, fam, oracle, opt.stencil);
        if (solves) *solves += datum.solves;
        if (reference != nullptr) {
            const LinearizedDatum ref = mixed_dtn_derivative(solver, fam, *reference, opt.stencil);
            datum.value -= ref.value;
            if (solves) *solves += ref.solves;
        }
        const ScalarField v_last = solver.solve_u0(last.trace);
        out.push_back({plan, moment_from_boundary(datum, v_last) * std::exp(shift)});
        if (log_trace_max) *log_trace_max = std::max(*log_trace_max, log_max);
    }
    return out;
}

double relative_l2(const ScalarField& a, const ScalarField& b) {
    const double nb = l2_norm_sq(b);
    const double nd = l2_norm_sq(a - b);
    return nb > 0.0 ? std::sqrt(nd / nb) : std::sqrt(nd);
}

double relative_l2(const VectorField& a, const VectorField& b) {
    const double nb = l2_norm_sq(b.x) + l2_norm_sq(b.y);
    const double nd = l2_norm_sq(a.x - b.x) + l2_norm_sq(a.y - b.y);
    return nb > 0.0 ? std::sqrt(nd / nb) : std::sqrt(nd);
}

RecoveryResult recover_order_m(const ForwardSolver& solver, const DtnOracle& oracle, const RecoveryOptions& opt,
                               const TaylorPotential* truth) {
    const Grid& g = solver.grid();
    if (opt.m < 2 || opt.m > kMaxLinearizationOrder) throw std::invalid_argument("recover_order_m: order out of range");
    if (opt.K < 0) throw std::invalid_argument("recover_order_m: K must be non-negative");

    std::optional<DtnOracle> reference;
    if (opt.lower_orders) reference = make_dtn_oracle(solver, *opt.lower_orders, opt.stencil.solve);

    RecoveryResult res;
    res.m = opt.m;
    const FourierLattice lattice{opt.K, g.rect().width(), g.rect().height()};
    res.coefficients = FourierCoefficients(lattice);
    const double lambda0 = std::numbers::pi / (2.0 * std::max(lattice.Lx, lattice.Ly));

    for (int k = -opt.K; k <= opt.K; ++k)
        for (int j = -opt.K; j <= opt.K; ++j) {
            const Frequency xi = lattice.xi(j, k);
            const std::vector<MomentPlan> plans = (j == 0 && k == 0) ? plan_zero_frequency(opt.m, lambda0)
                                                                     : plan_frequencies(xi, opt.m, opt.max_plan_condition);
            FrequencyReport fr;
            fr.xi = xi;
            const auto samples = measure_moments(solver, oracle, plans, opt, reference ? &*reference : nullptr,
                                                 &res.solves, &fr.log_trace_max);
            const MomentSolution ms = solve_moment_system(samples, opt.m);
            fr.condition = ms.condition;
            fr.M_A = ms.M_A;
            fr.q_hat = ms.q_hat;
            const std::size_t idx = lattice.index(j, k);
            res.coefficients.a_x[idx] = ms.M_A[0];
            res.coefficients.a_y[idx] = ms.M_A[1];
            res.coefficients.q[idx] = ms.q_hat;
            res.frequencies.push_back(fr);
        }

    auto [a, q] = invert_fourier(g, res.coefficients);
    for (int iy = 0; iy < g.ny(); ++iy)
        for (int ix = 0; ix < g.nx(); ++ix)
            if (g.cells_from_boundary(ix, iy) <= opt.support_margin) {
                a.x(ix, iy) = 0.0;
                a.y(ix, iy) = 0.0;
                q(ix, iy) = 0.0;
            }
    res.A_rec = std::move(a);
    res.q_rec = std::move(q);

    if (truth != nullptr) {
        RecoveryErrors& e = res.errors;
        e.has_truth = true;
        const VectorField& at = truth->A(opt.m - 1);
        const ScalarField& qt = truth->q(opt.m);
        e.a_rel_l2 = relative_l2(res.A_rec, at);
        e.q_rel_l2 = relative_l2(res.q_rec, qt);
        e.a_sup = (res.A_rec + at * complex(-1.0)).max_abs();
        e.q_sup = (res.q_rec - qt).max_abs();
        e.a_true_sup = at.max_abs();
        e.q_true_sup = qt.max_abs();
    }
    return res;
}

// ---------------------------------------------------------------------------
// Transport identity

TransportPair TransportPair::from_potentials(const TaylorPotential& p1, const TaylorPotential& p2, int m) {
    require_same_grid(p1.grid(), p2.grid(), "TransportPair");
    if (m < 2) throw std::invalid_argument("TransportPair: order must be >= 2");
    const VectorField a = p1.A(m - 1) + p2.A(m - 1) * complex(-1.0);
    TransportPair tp;
    tp.m = m;
    tp.F = a * complex(-(m + 1.0));
    // -D . a = i div a
    tp.g = I * divergence(a) + (p1.q(m) - p2.q(m));
    return tp;
}

ScalarField transport_residual(const TransportPair& tp, const ScalarField& v, double harmonic_tol) {
    require_same_grid(tp.g.grid(), v.grid(), "transport_residual");
    const double defect = harmonic_defect(v);
    if (!(defect <= harmonic_tol)) {
        std::ostringstream os;
        os << "transport_residual: v is not discretely harmonic (relative defect " << defect << ")";
        throw std::invalid_argument(os.str());
    }
    const VectorField dv = gradient(v) * complex(-I);
    return dot(tp.F, dv) + tp.g * v;
}

LocalExtractionReport local_extraction(const PoissonSolver& solver, const TransportPair& tp,
                                       const std::vector<double>& h_list, double c) {
    const Grid& g = solver.grid();
    require_same_grid(g, tp.g.grid(), "local_extraction");
    if (g.rect().x_max > 0.0) throw std::invalid_argument("local_extraction: the grid must lie in {x1 <= 0}");
    if (h_list.empty()) throw std::invalid_argument("local_extraction: empty h list");

    const BoundarySegment far = far_segment(g, c);
    LocalExtractionReport rep;
    rep.monotone = true;
    std::vector<ScalarField> limit;  // R(h) at the smallest h, one per kind
    for (IsotropicKind kind : {IsotropicKind::imaginary_first, IsotropicKind::imaginary_first_mirror}) {
        const IsotropicDirection zeta = make_isotropic(kind);
        LocalKindReport kr;
        kr.kind = kind;
        ScalarField last_r(g);
        for (double h : h_list) {
            const CgoSolution s = corrected_exponential(solver, zeta, h, c, far);
            const VectorField dw = gradient(s.w_tilde) * complex(-I);
            const ScalarField residual = transport_residual(tp, s.v, 1e-4);
            ScalarField r(g);
            LocalRow row;
            row.h = h;
            for (int iy = 0; iy < g.ny(); ++iy)
                for (int ix = 0; ix < g.nx(); ++ix) {
                    const complex undo = 1.0 / s.phase(ix, iy);
                    const complex fdw = tp.F.x(ix, iy) * dw.x(ix, iy) + tp.F.y(ix, iy) * dw.y(ix, iy);
                    const complex gi = tp.g(ix, iy);
                    r(ix, iy) = h * (fdw * undo + gi + gi * s.w_tilde(ix, iy) * undo);
                    if (!(g.x(ix) > -c)) continue;
                    row.sup_remainder = std::max(row.sup_remainder, std::abs(r(ix, iy)));
                    row.sup_residual = std::max(row.sup_residual, std::abs(h * residual(ix, iy) * undo));
                }
            if (!kr.rows.empty() && !(row.sup_remainder < kr.rows.back().sup_remainder || row.sup_remainder == 0.0))
                rep.monotone = false;
            rep.max_residual = std::max(rep.max_residual, row.sup_residual);
            kr.rows.push_back(row);
            last_r = std::move(r);
        }
        limit.push_back(std::move(last_r));
        rep.kinds.push_back(std::move(kr));
    }

    // a = F . (i, 1) = i F1 + F2, b = F . (i, -1) = i F1 - F2
    for (int iy = 0; iy < g.ny(); ++iy)
        for (int ix = 0; ix < g.nx(); ++ix) {
            if (std::hypot(g.x(ix), g.y(iy)) > c) continue;
            const complex a = limit[0](ix, iy), b = limit[1](ix, iy);
            rep.f1_estimate = std::max(rep.f1_estimate, std::abs((a + b) / (2.0 * I)));
            rep.f2_estimate = std::max(rep.f2_estimate, std::abs((a - b) / 2.0));
            rep.f1_true = std::max(rep.f1_true, std::abs(tp.F.x(ix, iy)));
            rep.f2_true = std::max(rep.f2_true, std::abs(tp.F.y(ix, iy)));
        }
    return rep;
}

}  // namespace magsi
