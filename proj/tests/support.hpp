#pragma once

// Shared fixtures and independent oracles for the test suites.

#include "magsi/mesh.hpp"
#include "magsi/potentials.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace magsi::test {

inline constexpr double kPi = std::numbers::pi;

// u(1/2, 1/2) for -Lap u = 2 on the unit square with u = 0 on the boundary,
// from the odd-mode series x(1-x) - sum 8 sin(k pi x) cosh(k pi (y-1/2)) / (k^3 pi^3 cosh(k pi/2)),
// summed in 30-digit arithmetic.
inline constexpr double kTorsionCenter = 0.14734270656302763;

inline Grid unit_grid(int n) { return build_grid(n, n, Rect{}); }

inline TaylorPotential bump_potential(const Grid& g, std::map<std::string, double> scales, double amplitude = 1.0,
                                      int order = 3) {
    PotentialSpec s;
    s.amplitude = amplitude;
    s.order = order;
    s.scales = std::move(scales);
    return synth_potential(g, s);
}

inline double gaussian(double x, double y, double cx = 0.5, double cy = 0.5, double sigma = 0.1) {
    const double dx = x - cx, dy = y - cy;
    return std::exp(-(dx * dx + dy * dy) / (sigma * sigma));
}

inline double sup_diff(const BoundaryData& a, const BoundaryData& b) { return (a - b).max_abs(); }

inline double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Trapezoid weight of node (ix, iy).
inline double trapezoid_weight(const Grid& g, int ix, int iy) {
    const double wx = (ix == 0 || ix == g.nx() - 1) ? 0.5 : 1.0;
    const double wy = (iy == 0 || iy == g.ny() - 1) ? 0.5 : 1.0;
    return wx * wy * g.hx() * g.hy();
}

// int f e^{-i xi.x} dx by a plain double loop.
inline complex direct_fourier(const ScalarField& f, double xi1, double xi2) {
    const Grid& g = f.grid();
    complex s = 0.0;
    for (int iy = 0; iy < g.ny(); ++iy)
        for (int ix = 0; ix < g.nx(); ++ix)
            s += trapezoid_weight(g, ix, iy) * f(ix, iy) * std::exp(complex(0.0, -(xi1 * g.x(ix) + xi2 * g.y(iy))));
    return s;
}

inline complex direct_integral(const ScalarField& f) { return direct_fourier(f, 0.0, 0.0); }

struct NewtonResult {
    ScalarField u;
    int iterations = 0;
    double residual = 0.0;
};

// Damped Newton on the discrete equation
//   -Lap_h u - i div_h(A(u) u) - i A(u) . grad_h u + (A . A)(u) u + q(u) = 0
// at interior nodes, u = f on the boundary, with centered differences and a
// sparse LU of the analytic (holomorphic) Jacobian. Written independently of
// the library's operators.
class NewtonOracle {
public:
    NewtonOracle(const TaylorPotential& p) : p_(p), g_(p.grid()) {}

    NewtonResult solve(const BoundaryData& f, double tol = 1e-15, int max_iter = 50) const {
        const int n = static_cast<int>(g_.node_count());
        CVector u = CVector::Zero(n);
        for (std::size_t b = 0; b < g_.boundary_count(); ++b) {
            const auto& nd = g_.boundary_node(b);
            u[static_cast<Eigen::Index>(g_.index(nd.ix, nd.iy))] = f[b];
        }
        NewtonResult out;
        CVector r = residual(u);
        double rn = r.cwiseAbs().maxCoeff();
        const double scale = std::max(1.0, f.max_abs());
        while (out.iterations < max_iter && rn > tol * scale) {
            Eigen::SparseMatrix<complex> J = jacobian(u);
            Eigen::SparseLU<Eigen::SparseMatrix<complex>> lu;
            lu.compute(J);
            const CVector step = lu.solve(r);
            double alpha = 1.0;
            CVector trial = u - step;
            CVector rt = residual(trial);
            while (rt.cwiseAbs().maxCoeff() >= rn && alpha > 1e-4) {
                alpha *= 0.5;
                trial = u - alpha * step;
                rt = residual(trial);
            }
            ++out.iterations;
            const double rtn = rt.cwiseAbs().maxCoeff();
            if (rtn >= rn) break;
            u = trial;
            r = rt;
            rn = rtn;
        }
        out.u = ScalarField(g_, u);
        out.residual = rn;
        return out;
    }

private:
    struct Local {
        complex ax, ay, dax, day, q, dq;
    };

    Local coeffs(Eigen::Index i, complex w) const {
        Local c{0, 0, 0, 0, 0, 0};
        double fact = 1.0;
        for (int k = 1; k <= p_.order(); ++k) {
            fact *= k;
            const complex wk = std::pow(w, k) / fact;
            const complex dwk = std::pow(w, k - 1) / (fact / k);
            c.ax += p_.A(k).x.values()[i] * wk;
            c.ay += p_.A(k).y.values()[i] * wk;
            c.dax += p_.A(k).x.values()[i] * dwk;
            c.day += p_.A(k).y.values()[i] * dwk;
            if (k >= 2) {
                c.q += p_.q(k).values()[i] * wk;
                c.dq += p_.q(k).values()[i] * dwk;
            }
        }
        return c;
    }

    Eigen::Index id(int ix, int iy) const { return static_cast<Eigen::Index>(g_.index(ix, iy)); }

    CVector residual(const CVector& u) const {
        const double hx = g_.hx(), hy = g_.hy();
        CVector r = CVector::Zero(u.size());
        for (int iy = 1; iy < g_.ny() - 1; ++iy)
            for (int ix = 1; ix < g_.nx() - 1; ++ix) {
                const Eigen::Index c = id(ix, iy), e = id(ix + 1, iy), w = id(ix - 1, iy), nn = id(ix, iy + 1),
                                   s = id(ix, iy - 1);
                const complex lap = (u[e] - 2.0 * u[c] + u[w]) / (hx * hx) + (u[nn] - 2.0 * u[c] + u[s]) / (hy * hy);
                const Local lc = coeffs(c, u[c]), le = coeffs(e, u[e]), lw = coeffs(w, u[w]), ln = coeffs(nn, u[nn]),
                            ls = coeffs(s, u[s]);
                const complex div = (le.ax * u[e] - lw.ax * u[w]) / (2 * hx) + (ln.ay * u[nn] - ls.ay * u[s]) / (2 * hy);
                const complex gx = (u[e] - u[w]) / (2 * hx), gy = (u[nn] - u[s]) / (2 * hy);
                r[c] = -lap - I * div - I * (lc.ax * gx + lc.ay * gy) + (lc.ax * lc.ax + lc.ay * lc.ay) * u[c] + lc.q;
            }
        return r;
    }

    Eigen::SparseMatrix<complex> jacobian(const CVector& u) const {
        const double hx = g_.hx(), hy = g_.hy();
        std::vector<Eigen::Triplet<complex>> t;
        for (int iy = 0; iy < g_.ny(); ++iy)
            for (int ix = 0; ix < g_.nx(); ++ix) {
                const Eigen::Index c = id(ix, iy);
                if (g_.is_boundary(ix, iy)) {
                    t.emplace_back(c, c, 1.0);
                    continue;
                }
                const Eigen::Index e = id(ix + 1, iy), w = id(ix - 1, iy), nn = id(ix, iy + 1), s = id(ix, iy - 1);
                const Local lc = coeffs(c, u[c]), le = coeffs(e, u[e]), lw = coeffs(w, u[w]), ln = coeffs(nn, u[nn]),
                            ls = coeffs(s, u[s]);
                const complex gx = (u[e] - u[w]) / (2 * hx), gy = (u[nn] - u[s]) / (2 * hy);
                // -Lap
                complex diag = 2.0 / (hx * hx) + 2.0 / (hy * hy);
                complex ce = -1.0 / (hx * hx), cw = ce, cn = -1.0 / (hy * hy), cs = cn;
                // -i div(B delta), B = A + A' u at the neighbour
                ce += -I * (le.ax + le.dax * u[e]) / (2 * hx);
                cw += I * (lw.ax + lw.dax * u[w]) / (2 * hx);
                cn += -I * (ln.ay + ln.day * u[nn]) / (2 * hy);
                cs += I * (ls.ay + ls.day * u[s]) / (2 * hy);
                // -i A . grad delta
                ce += -I * lc.ax / (2 * hx);
                cw += I * lc.ax / (2 * hx);
                cn += -I * lc.ay / (2 * hy);
                cs += I * lc.ay / (2 * hy);
                // -i (A' delta) . grad u, (A.A)(u) u and q(u)
                diag += -I * (lc.dax * gx + lc.day * gy);
                diag += 2.0 * (lc.ax * lc.dax + lc.ay * lc.day) * u[c] + (lc.ax * lc.ax + lc.ay * lc.ay);
                diag += lc.dq;
                t.emplace_back(c, c, diag);
                t.emplace_back(c, e, ce);
                t.emplace_back(c, w, cw);
                t.emplace_back(c, nn, cn);
                t.emplace_back(c, s, cs);
            }
        Eigen::SparseMatrix<complex> J(static_cast<Eigen::Index>(g_.node_count()),
                                       static_cast<Eigen::Index>(g_.node_count()));
        J.setFromTriplets(t.begin(), t.end());
        return J;
    }

    const TaylorPotential& p_;
    Grid g_;
};

}  // namespace magsi::test
