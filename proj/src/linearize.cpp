#include "magsi/linearize.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace magsi {

void EpsFamily::validate() const {
    const int m = order();
    if (m < 1 || m > kMaxLinearizationOrder)
        throw std::invalid_argument("EpsFamily: order must lie in [1, " + std::to_string(kMaxLinearizationOrder) + "]");
    if (eps.size() != traces.size()) throw std::invalid_argument("EpsFamily: one eps per trace required");
    for (double e : eps)
        if (!(e > 0.0) || !std::isfinite(e)) throw std::invalid_argument("EpsFamily: eps must be positive");
    for (const auto& t : traces) require_same_grid(traces.front().grid, t.grid, "EpsFamily");
}

EpsFamily EpsFamily::scaled(double factor) const {
    EpsFamily out = *this;
    for (double& e : out.eps) e *= factor;
    return out;
}

ScalarField first_linearization(const ForwardSolver& solver, const BoundaryData& f) { return solver.solve_u0(f); }

ScalarField build_Q2(const ScalarField& v1, const ScalarField& v2, const TaylorPotential& p) {
    require_same_grid(v1.grid(), p.grid(), "build_Q2");
    require_same_grid(v2.grid(), p.grid(), "build_Q2");
    const VectorField& a = p.A(1);
    const VectorField dv1 = gradient(v1) * complex(-I);
    const VectorField dv2 = gradient(v2) * complex(-I);
    const ScalarField prod = v1 * v2;
    ScalarField q = complex(3.0) * dot(a, dv2 * v1 + dv1 * v2);
    q += complex(2.0) * (complex(-I) * divergence(a)) * prod;
    q += p.q(2) * prod;
    return q;
}

ScalarField build_Qm(const std::vector<ScalarField>& v, const TaylorPotential& p) {
    const int m = static_cast<int>(v.size());
    if (m < 2 || m > kMaxLinearizationOrder)
        throw std::invalid_argument("build_Qm: order must lie in [2, " + std::to_string(kMaxLinearizationOrder) + "]");
    for (const auto& f : v) require_same_grid(f.grid(), p.grid(), "build_Qm");

    const Grid& g = p.grid();
    ScalarField prod = ScalarField::constant(g, 1.0);
    for (const auto& f : v) prod = prod * f;

    // D(v1...vm) by the product rule
    VectorField dprod(g);
    for (int k = 0; k < m; ++k) {
        ScalarField others = ScalarField::constant(g, 1.0);
        for (int j = 0; j < m; ++j)
            if (j != k) others = others * v[static_cast<std::size_t>(j)];
        dprod += gradient(v[static_cast<std::size_t>(k)]) * others;
    }
    dprod *= -I;

    const VectorField& a = p.A(m - 1);
    ScalarField q = complex(m + 1.0) * dot(a, dprod);
    q += complex(m) * (complex(-I) * divergence(a)) * prod;
    q += p.q(m) * prod;
    return q;
}

namespace {

void require_harmonic(const ScalarField& v, double tol, const char* where) {
    const double d = harmonic_defect(v);
    if (!(d <= tol)) {
        std::ostringstream os;
        os << where << ": input field is not discretely harmonic (relative defect " << d << ")";
        throw std::invalid_argument(os.str());
    }
}

}  // namespace

LinearizationSolution solve_linearization(const ForwardSolver& solver, const std::vector<ScalarField>& v,
                                          const TaylorPotential& p, double harmonic_tol) {
    for (const auto& f : v) require_harmonic(f, harmonic_tol, "solve_linearization");
    const int m = static_cast<int>(v.size());
    const ScalarField q = build_Qm(v, p);

    LinearizationSolution s;
    s.w = solver.poisson().solve(complex(-1.0) * q);
    s.predicted = normal_derivative(s.w);
    const VectorField& a = p.A(m - 1);
    if (a.max_abs() > 0.0) {
        BoundaryData prod = BoundaryData::sample(p.grid(), [](double, double) { return complex(1.0); });
        for (const auto& f : v) prod = prod * trace(f);
        s.predicted += complex(0.0, m) * normal_component(a) * prod;
    }
    return s;
}

LinearizationSolution solve_second_linearization(const ForwardSolver& solver, const ScalarField& v1,
                                                 const ScalarField& v2, const TaylorPotential& p,
                                                 double harmonic_tol) {
    return solve_linearization(solver, {v1, v2}, p, harmonic_tol);
}

namespace {

std::string sign_pattern(unsigned mask, int m) {
    std::string s;
    for (int k = 0; k < m; ++k) s += (mask >> k & 1u) ? '-' : '+';
    return s;
}

using CornerFn = std::function<CVector(const BoundaryData&)>;

// 2^m corner evaluations combined with the product of the eps signs.
CVector raw_stencil(const Grid& g, const EpsFamily& fam, const CornerFn& corner, int& solves) {
    const int m = fam.order();
    CVector acc;
    double denom = std::pow(2.0, m);
    for (double e : fam.eps) denom *= e;

    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        BoundaryData f(g);
        int sign = 1;
        for (int k = 0; k < m; ++k) {
            const double s = (mask >> k & 1u) ? -1.0 : 1.0;
            if (s < 0) sign = -sign;
            f += complex(s * fam.eps[static_cast<std::size_t>(k)]) * fam.traces[static_cast<std::size_t>(k)];
        }
        CVector value;
        try {
            value = corner(f);
        } catch (const NonConvergenceError& e) {
            throw NonConvergenceError("stencil corner " + sign_pattern(mask, m) + ": " + e.what(), e.report());
        }
        if (acc.size() == 0) acc = CVector::Zero(value.size());
        acc += static_cast<double>(sign) * value;
        ++solves;
    }
    return acc / denom;
}

}  // namespace

LinearizedDatum mixed_dtn_derivative(const ForwardSolver& solver, const EpsFamily& fam, const DtnOracle& oracle,
                                     const StencilOptions& opt) {
    fam.validate();
    const Grid& g = solver.grid();
    require_same_grid(g, fam.traces.front().grid, "mixed_dtn_derivative");
    LinearizedDatum d;
    d.order = fam.order();
    d.eps = fam.eps;
    d.stencil = "central-" + std::to_string(1 << fam.order());

    // The linear part of Lambda is differenced analytically: it only survives at m = 1.
    const CVector lin = fam.order() == 1 ? linear_dtn(solver, fam.traces.front()).values
                                         : CVector::Zero(static_cast<Eigen::Index>(g.boundary_count()));
    const CornerFn corner = [&oracle](const BoundaryData& f) { return oracle(f).lambda_nonlinear.values; };
    const CVector coarse = raw_stencil(g, fam, corner, d.solves);
    d.coarse = BoundaryData(g, coarse + lin);
    if (opt.richardson) {
        const CVector fine = raw_stencil(g, fam.scaled(0.5), corner, d.solves);
        d.value = BoundaryData(g, (4.0 * fine - coarse) / 3.0 + lin);
        d.richardson_level = 1;
        d.richardson_delta = (fine - coarse).cwiseAbs().maxCoeff();
    } else {
        d.value = d.coarse;
    }
    return d;
}

LinearizedDatum mixed_dtn_derivative(const ForwardSolver& solver, const EpsFamily& fam, const TaylorPotential& p,
                                     const StencilOptions& opt) {
    return mixed_dtn_derivative(solver, fam, make_dtn_oracle(solver, p, opt.solve), opt);
}

ScalarField mixed_solution_derivative(const ForwardSolver& solver, const EpsFamily& fam, const TaylorPotential& p,
                                      const StencilOptions& opt) {
    fam.validate();
    const Grid& g = solver.grid();
    int solves = 0;
    const CVector lin = fam.order() == 1 ? solver.solve_u0(fam.traces.front()).values()
                                         : CVector::Zero(static_cast<Eigen::Index>(g.node_count()));
    const CornerFn corner = [&](const BoundaryData& f) { return solver.solve(f, p, opt.solve).v.values(); };
    const CVector coarse = raw_stencil(g, fam, corner, solves);
    if (!opt.richardson) return ScalarField(g, coarse + lin);
    const CVector fine = raw_stencil(g, fam.scaled(0.5), corner, solves);
    return ScalarField(g, (4.0 * fine - coarse) / 3.0 + lin);
}

IdentityResult check_integral_identity(const ForwardSolver& solver, const TaylorPotential& p1,
                                       const TaylorPotential& p2, const std::vector<ScalarField>& v,
                                       const ScalarField& v_last, const IdentityOptions& opt) {
    const int m = static_cast<int>(v.size());
    if (m < 2 || m > kMaxLinearizationOrder)
        throw std::invalid_argument("check_integral_identity: order must lie in [2, " +
                                    std::to_string(kMaxLinearizationOrder) + "]");
    if (!p1.agrees_with(p2, m - 2, m - 1))
        throw std::invalid_argument("check_integral_identity: potentials differ below order " + std::to_string(m));
    if (!p1.compact_support() || !p2.compact_support() || !p1.vanishes_near_boundary() || !p2.vanishes_near_boundary())
        throw std::invalid_argument("check_integral_identity: potentials must be compactly supported");
    for (const auto& f : v) require_harmonic(f, opt.harmonic_tol, "check_integral_identity");
    require_harmonic(v_last, opt.harmonic_tol, "check_integral_identity");

    const Grid& g = solver.grid();
    const BoundarySegment gamma1 = opt.gamma1.grid.valid() ? opt.gamma1 : BoundarySegment::full(g);
    const BoundarySegment gamma2 = opt.gamma2.grid.valid() ? opt.gamma2 : BoundarySegment::full(g);

    EpsFamily fam;
    for (const auto& f : v) {
        BoundaryData t = trace(f);
        if (!t.supported_in(gamma1)) throw std::invalid_argument("check_integral_identity: trace leaves Gamma1");
        fam.traces.push_back(std::move(t));
        fam.eps.push_back(opt.eps);
    }
    const BoundaryData last = trace(v_last);
    if (!last.supported_in(gamma2)) throw std::invalid_argument("check_integral_identity: last trace leaves Gamma2");

    IdentityResult r;
    r.order = m;
    r.lhs = integrate_interior((build_Qm(v, p1) - build_Qm(v, p2)) * v_last);
    const BoundaryData d1 = mixed_dtn_derivative(solver, fam, p1, opt.stencil).value;
    const BoundaryData d2 = mixed_dtn_derivative(solver, fam, p2, opt.stencil).value;
    r.rhs = integrate_boundary((d1 - d2).restricted(gamma2) * last);
    r.gap = std::abs(r.lhs - r.rhs);
    const double scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
    r.relative_gap = scale > 0.0 ? r.gap / scale : 0.0;
    return r;
}

}  // namespace magsi
