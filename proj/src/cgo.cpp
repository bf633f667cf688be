#include "magsi/cgo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace magsi {

IsotropicDirection::IsotropicDirection(complex z1, complex z2) : z_{z1, z2} {
    const double n2 = std::norm(z1) + std::norm(z2);
    if (!(std::abs(self_dot()) <= 1e-14 * n2)) throw std::invalid_argument("zeta is not isotropic");
}

double IsotropicDirection::norm() const { return std::sqrt(std::norm(z_[0]) + std::norm(z_[1])); }

IsotropicKind parse_isotropic_kind(const std::string& name) {
    if (name == "plus") return IsotropicKind::plus;
    if (name == "minus") return IsotropicKind::minus;
    if (name == "paper_step1") return IsotropicKind::imaginary_first;
    if (name == "paper_step1_mirror") return IsotropicKind::imaginary_first_mirror;
    if (name == "appendixB" || name == "appendix_b") return IsotropicKind::scaled_plus;
    if (name == "appendixB_conj" || name == "appendix_b_conj") return IsotropicKind::scaled_minus;
    throw std::invalid_argument("unknown zeta kind '" + name + "'");
}

const char* isotropic_kind_name(IsotropicKind kind) {
    switch (kind) {
        case IsotropicKind::plus: return "plus";
        case IsotropicKind::minus: return "minus";
        case IsotropicKind::imaginary_first: return "paper_step1";
        case IsotropicKind::imaginary_first_mirror: return "paper_step1_mirror";
        case IsotropicKind::scaled_plus: return "appendixB";
        case IsotropicKind::scaled_minus: return "appendixB_conj";
    }
    return "?";
}

IsotropicDirection make_isotropic(IsotropicKind kind, complex param) {
    if (param == 0.0) throw std::invalid_argument("zero scale");
    switch (kind) {
        case IsotropicKind::plus: return IsotropicDirection::plus(param);
        case IsotropicKind::minus: return IsotropicDirection::minus(param);
        case IsotropicKind::imaginary_first: return IsotropicDirection(I, 1.0);
        case IsotropicKind::imaginary_first_mirror: return IsotropicDirection(I, -1.0);
        case IsotropicKind::scaled_plus: return IsotropicDirection::plus(param);
        case IsotropicKind::scaled_minus: return IsotropicDirection::minus(param);
    }
    throw std::invalid_argument("unknown zeta kind");
}

namespace {

complex exponent(const IsotropicDirection& z, ExpMode mode, double h, double x, double y) {
    const complex e = z[0] * x + z[1] * y;
    return mode == ExpMode::growing ? e : -I * e / h;
}

}  // namespace

ScalarField harmonic_exponential(const Grid& grid, const IsotropicDirection& zeta, ExpMode mode, double h,
                                 double log_shift) {
    if (mode == ExpMode::phase && !(h > 0.0)) throw std::invalid_argument("harmonic_exponential: h must be positive");
    ScalarField f(grid);
    double worst = -std::numeric_limits<double>::infinity();
    for (int iy = 0; iy < grid.ny(); ++iy)
        for (int ix = 0; ix < grid.nx(); ++ix) {
            const complex e = exponent(zeta, mode, h, grid.x(ix), grid.y(iy)) - log_shift;
            worst = std::max(worst, e.real());
            f(ix, iy) = std::exp(e);
        }
    if (worst > kMaxExponent) {
        std::ostringstream os;
        os << "harmonic_exponential: exponent " << worst << " exceeds " << kMaxExponent;
        throw std::overflow_error(os.str());
    }
    return f;
}

double max_real_exponent(const Grid& grid, const IsotropicDirection& zeta) {
    double best = -std::numeric_limits<double>::infinity();
    const Rect& r = grid.rect();
    for (double x : {r.x_min, r.x_max})
        for (double y : {r.y_min, r.y_max}) best = std::max(best, (zeta[0] * x + zeta[1] * y).real());
    return best;
}

double smoothstep5(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

BoundarySegment far_segment(const Grid& grid, double c) {
    return BoundarySegment::where(grid, [c](double x, double) { return x <= -2.0 * c; }, SegmentLabel::custom);
}

BoundaryData build_cutoff(const Grid& grid, double c, const BoundarySegment& gamma2_tilde) {
    if (!(c > 0.0)) throw std::invalid_argument("build_cutoff: c must be positive");
    require_same_grid(grid, gamma2_tilde.grid, "build_cutoff");
    BoundaryData chi(grid);
    for (std::size_t b = 0; b < grid.boundary_count(); ++b) {
        const auto& n = grid.boundary_node(b);
        const double x1 = grid.x(n.ix);
        if (gamma2_tilde.contains(b) && x1 > -2.0 * c + 1e-12 * c)
            throw std::invalid_argument("build_cutoff: gamma2_tilde reaches beyond x1 = -2c");
        chi[b] = smoothstep5((-c - x1) / c);
    }
    return chi;
}

double min_resolved_h(const Grid& grid, const IsotropicDirection& zeta) {
    return 4.0 * std::max(grid.hx(), grid.hy()) * zeta.norm();
}

CgoSolution corrected_exponential(const PoissonSolver& solver, const IsotropicDirection& zeta, double h, double c,
                                  const BoundarySegment& gamma2_tilde) {
    const Grid& g = solver.grid();
    if (zeta[0].imag() < 0.0) throw std::invalid_argument("corrected_exponential: need Im zeta_1 >= 0");
    if (!(h >= min_resolved_h(g, zeta))) {
        std::ostringstream os;
        os << "corrected_exponential: h = " << h << " under-resolved on this grid (need h >= " << min_resolved_h(g, zeta)
           << ")";
        throw std::invalid_argument(os.str());
    }

    CgoSolution s;
    s.zeta = zeta;
    s.h = h;
    s.c = c;
    s.gamma2_tilde = gamma2_tilde;
    s.chi = build_cutoff(g, c, gamma2_tilde);
    s.phase = harmonic_exponential(g, zeta, ExpMode::phase, h);
    s.w_tilde = solver.harmonic_extension(complex(-1.0) * (trace(s.phase) * s.chi));
    s.v = s.phase + s.w_tilde;
    // exact cancellation where chi = 1
    for (std::size_t b = 0; b < g.boundary_count(); ++b)
        if (s.chi[b] == 1.0) {
            const auto& n = g.boundary_node(b);
            s.v(n.ix, n.iy) = 0.0;
        }
    return s;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_slope: need two or more points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_slope: degenerate abscissae");
    return sxy / sxx;
}

DecayReport decay_probe(const PoissonSolver& solver, const IsotropicDirection& zeta, const std::vector<double>& h_list,
                        double c, const BoundarySegment& gamma2_tilde) {
    if (h_list.size() < 4) throw std::invalid_argument("decay_probe: need at least four h values");
    for (std::size_t i = 1; i < h_list.size(); ++i)
        if (!(h_list[i] < h_list[i - 1])) throw std::invalid_argument("decay_probe: h values must decrease");

    const Grid& g = solver.grid();
    DecayReport rep;
    rep.predicted_slope = -c * zeta[0].imag();
    std::vector<double> inv_h, log_w, log_dw;
    for (double h : h_list) {
        const CgoSolution s = corrected_exponential(solver, zeta, h, c, gamma2_tilde);
        const VectorField grad = gradient(s.w_tilde);
        DecayRow row;
        row.h = h;
        row.predicted_envelope = std::exp(rep.predicted_slope / h);
        for (int iy = 0; iy < g.ny(); ++iy)
            for (int ix = 0; ix < g.nx(); ++ix) {
                if (!(g.x(ix) > -c)) continue;
                const complex undo = 1.0 / s.phase(ix, iy);
                row.sup_w = std::max(row.sup_w, std::abs(s.w_tilde(ix, iy) * undo));
                const double dw = std::hypot(std::abs(grad.x(ix, iy)), std::abs(grad.y(ix, iy)));
                row.sup_dw = std::max(row.sup_dw, dw * std::abs(undo));
            }
        rep.rows.push_back(row);
        inv_h.push_back(1.0 / h);
        log_w.push_back(std::log(std::max(row.sup_w, 1e-300)));
        log_dw.push_back(std::log(std::max(row.sup_dw, 1e-300)));
    }
    rep.slope = fit_slope(inv_h, log_w);
    rep.slope_dw = fit_slope(inv_h, log_dw);
    rep.within_tolerance = rep.predicted_slope < 0.0 ? rep.slope <= 0.7 * rep.predicted_slope : rep.slope <= 0.0;
    return rep;
}

}  // namespace magsi
