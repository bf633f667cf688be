#include "magsi/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace magsi {

namespace {

Eigen::Index at(std::size_t i) { return static_cast<Eigen::Index>(i); }

void add_boundary_node(detail::GridData& d, int ix, int iy) {
    BoundaryNode n;
    n.ix = ix;
    n.iy = iy;
    const bool left = ix == 0, right = ix == d.nx - 1;
    const bool bottom = iy == 0, top = iy == d.ny - 1;
    const bool vertical = left || right;
    const bool horizontal = bottom || top;
    const double vx = left ? -1.0 : (right ? 1.0 : 0.0);
    const double vy = bottom ? -1.0 : (top ? 1.0 : 0.0);
    if (vertical && horizontal) {
        n.corner = true;
        n.weight = 0.5 * (d.hx + d.hy);
        // horizontal edge contributes hx/2 with normal (0, vy), vertical edge hy/2 with (vx, 0)
        n.nx = vx * 0.5 * d.hy / n.weight;
        n.ny = vy * 0.5 * d.hx / n.weight;
    } else if (vertical) {
        n.weight = d.hy;
        n.nx = vx;
    } else {
        n.weight = d.hx;
        n.ny = vy;
    }
    d.boundary_slot[static_cast<std::size_t>(iy) * d.nx + ix] = static_cast<std::ptrdiff_t>(d.boundary.size());
    d.boundary.push_back(n);
}

}  // namespace

// ---------------------------------------------------------------------------
// Grid

Grid Grid::make(int nx, int ny, Rect rect) {
    if (nx < 3 || ny < 3) throw std::invalid_argument("grid too coarse");
    for (double v : {rect.x_min, rect.x_max, rect.y_min, rect.y_max})
        if (!std::isfinite(v)) throw std::invalid_argument("grid bounds must be finite");
    if (!(rect.x_max > rect.x_min) || !(rect.y_max > rect.y_min))
        throw std::invalid_argument("grid bounds inverted or degenerate");

    auto d = std::make_shared<detail::GridData>();
    d->nx = nx;
    d->ny = ny;
    d->rect = rect;
    d->hx = rect.width() / (nx - 1);
    d->hy = rect.height() / (ny - 1);
    d->boundary_slot.assign(static_cast<std::size_t>(nx) * ny, -1);
    for (int ix = 0; ix < nx; ++ix) add_boundary_node(*d, ix, 0);
    for (int iy = 1; iy < ny; ++iy) add_boundary_node(*d, nx - 1, iy);
    for (int ix = nx - 2; ix >= 0; --ix) add_boundary_node(*d, ix, ny - 1);
    for (int iy = ny - 2; iy >= 1; --iy) add_boundary_node(*d, 0, iy);

    Grid g;
    g.data_ = std::move(d);
    return g;
}

Grid build_grid(int nx, int ny, Rect rect) { return Grid::make(nx, ny, rect); }

int Grid::cells_from_boundary(int ix, int iy) const {
    return std::min({ix, iy, nx() - 1 - ix, ny() - 1 - iy});
}

bool Grid::same_as(const Grid& other) const {
    if (data_ == other.data_) return true;
    if (!data_ || !other.data_) return false;
    const auto& a = *data_;
    const auto& b = *other.data_;
    return a.nx == b.nx && a.ny == b.ny && a.rect.x_min == b.rect.x_min && a.rect.x_max == b.rect.x_max &&
           a.rect.y_min == b.rect.y_min && a.rect.y_max == b.rect.y_max;
}

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
    if (!(a == b)) throw std::invalid_argument(std::string(where) + ": fields live on different grids");
}

// ---------------------------------------------------------------------------
// Fields

ScalarField::ScalarField(Grid grid) : grid_(std::move(grid)), values_(CVector::Zero(at(grid_.node_count()))) {}

ScalarField::ScalarField(Grid grid, CVector values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != at(grid_.node_count()))
        throw std::invalid_argument("ScalarField: value count does not match grid");
}

ScalarField ScalarField::constant(Grid grid, complex c) {
    ScalarField f(std::move(grid));
    f.values_.setConstant(c);
    return f;
}

ScalarField ScalarField::sample(Grid grid, const std::function<complex(double, double)>& fn) {
    ScalarField f(std::move(grid));
    const Grid& g = f.grid();
    for (int iy = 0; iy < g.ny(); ++iy)
        for (int ix = 0; ix < g.nx(); ++ix) f(ix, iy) = fn(g.x(ix), g.y(iy));
    return f;
}

double ScalarField::max_abs() const { return values_.size() ? values_.cwiseAbs().maxCoeff() : 0.0; }

double ScalarField::max_abs_interior() const {
    double m = 0.0;
    for (int iy = 1; iy < grid_.ny() - 1; ++iy)
        for (int ix = 1; ix < grid_.nx() - 1; ++ix) m = std::max(m, std::abs((*this)(ix, iy)));
    return m;
}

bool ScalarField::all_finite() const { return values_.allFinite(); }

ScalarField& ScalarField::operator+=(const ScalarField& o) {
    require_same_grid(grid_, o.grid_, "ScalarField +=");
    values_ += o.values_;
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
    require_same_grid(grid_, o.grid_, "ScalarField -=");
    values_ -= o.values_;
    return *this;
}

ScalarField& ScalarField::operator*=(complex c) {
    values_ *= c;
    return *this;
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid(), b.grid(), "ScalarField *");
    return ScalarField(a.grid(), a.values().cwiseProduct(b.values()));
}

VectorField::VectorField(ScalarField x_, ScalarField y_) : x(std::move(x_)), y(std::move(y_)) {
    require_same_grid(x.grid(), y.grid(), "VectorField");
}

double VectorField::max_abs() const {
    double m = 0.0;
    for (Eigen::Index i = 0; i < x.values().size(); ++i)
        m = std::max(m, std::sqrt(std::norm(x.values()[i]) + std::norm(y.values()[i])));
    return m;
}

VectorField& VectorField::operator+=(const VectorField& o) {
    x += o.x;
    y += o.y;
    return *this;
}

VectorField& VectorField::operator*=(complex c) {
    x *= c;
    y *= c;
    return *this;
}

VectorField operator*(const VectorField& v, const ScalarField& s) { return VectorField(v.x * s, v.y * s); }

ScalarField dot(const VectorField& a, const VectorField& b) { return a.x * b.x + a.y * b.y; }

// ---------------------------------------------------------------------------
// Boundary segments and data

BoundarySegment BoundarySegment::full(const Grid& grid) {
    return BoundarySegment{grid, std::vector<bool>(grid.boundary_count(), true), SegmentLabel::full};
}

BoundarySegment BoundarySegment::edges(const Grid& grid, const std::vector<Edge>& edges, SegmentLabel label) {
    BoundarySegment s{grid, std::vector<bool>(grid.boundary_count(), false), label};
    for (std::size_t b = 0; b < grid.boundary_count(); ++b) {
        const auto& n = grid.boundary_node(b);
        for (Edge e : edges) {
            if ((e == Edge::bottom && n.iy == 0) || (e == Edge::top && n.iy == grid.ny() - 1) ||
                (e == Edge::left && n.ix == 0) || (e == Edge::right && n.ix == grid.nx() - 1))
                s.mask[b] = true;
        }
    }
    return s;
}

BoundarySegment BoundarySegment::where(const Grid& grid, const std::function<bool(double, double)>& pred,
                                       SegmentLabel label) {
    BoundarySegment s{grid, std::vector<bool>(grid.boundary_count(), false), label};
    for (std::size_t b = 0; b < grid.boundary_count(); ++b) {
        const auto& n = grid.boundary_node(b);
        s.mask[b] = pred(grid.x(n.ix), grid.y(n.iy));
    }
    return s;
}

std::size_t BoundarySegment::count() const { return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true)); }

BoundaryData::BoundaryData(const Grid& g, CVector v) : grid(g), values(std::move(v)) {
    if (values.size() != at(grid.boundary_count()))
        throw std::invalid_argument("BoundaryData: value count does not match boundary");
}

BoundaryData BoundaryData::sample(const Grid& grid, const std::function<complex(double, double)>& fn) {
    BoundaryData d(grid);
    for (std::size_t b = 0; b < grid.boundary_count(); ++b) {
        const auto& n = grid.boundary_node(b);
        d[b] = fn(grid.x(n.ix), grid.y(n.iy));
    }
    return d;
}

BoundaryData BoundaryData::restricted(const BoundarySegment& seg) const {
    require_same_grid(grid, seg.grid, "BoundaryData::restricted");
    BoundaryData out = *this;
    for (std::size_t b = 0; b < grid.boundary_count(); ++b)
        if (!seg.mask[b]) out[b] = 0.0;
    return out;
}

bool BoundaryData::supported_in(const BoundarySegment& seg) const {
    require_same_grid(grid, seg.grid, "BoundaryData::supported_in");
    for (std::size_t b = 0; b < grid.boundary_count(); ++b)
        if (!seg.mask[b] && (*this)[b] != complex(0.0)) return false;
    return true;
}

BoundaryData& BoundaryData::operator+=(const BoundaryData& o) {
    require_same_grid(grid, o.grid, "BoundaryData +=");
    values += o.values;
    return *this;
}

BoundaryData& BoundaryData::operator-=(const BoundaryData& o) {
    require_same_grid(grid, o.grid, "BoundaryData -=");
    values -= o.values;
    return *this;
}

BoundaryData& BoundaryData::operator*=(complex c) {
    values *= c;
    return *this;
}

BoundaryData operator*(const BoundaryData& a, const BoundaryData& b) {
    require_same_grid(a.grid, b.grid, "BoundaryData *");
    return BoundaryData(a.grid, a.values.cwiseProduct(b.values));
}

// ---------------------------------------------------------------------------
// Operators

ScalarField second_difference_x(const ScalarField& u) {
    const Grid& g = u.grid();
    ScalarField out(g);
    const double s = 1.0 / (g.hx() * g.hx());
    for (int iy = 1; iy < g.ny() - 1; ++iy)
        for (int ix = 1; ix < g.nx() - 1; ++ix) out(ix, iy) = (u(ix - 1, iy) - 2.0 * u(ix, iy) + u(ix + 1, iy)) * s;
    return out;
}

ScalarField second_difference_y(const ScalarField& u) {
    const Grid& g = u.grid();
    ScalarField out(g);
    const double s = 1.0 / (g.hy() * g.hy());
    for (int iy = 1; iy < g.ny() - 1; ++iy)
        for (int ix = 1; ix < g.nx() - 1; ++ix) out(ix, iy) = (u(ix, iy - 1) - 2.0 * u(ix, iy) + u(ix, iy + 1)) * s;
    return out;
}

ScalarField laplacian(const ScalarField& u) {
    const Grid& g = u.grid();
    ScalarField out(g);
    const double sx = 1.0 / (g.hx() * g.hx());
    const double sy = 1.0 / (g.hy() * g.hy());
    for (int iy = 1; iy < g.ny() - 1; ++iy)
        for (int ix = 1; ix < g.nx() - 1; ++ix) {
            const complex c = u(ix, iy);
            out(ix, iy) = (u(ix - 1, iy) - 2.0 * c + u(ix + 1, iy)) * sx + (u(ix, iy - 1) - 2.0 * c + u(ix, iy + 1)) * sy;
        }
    return out;
}

ScalarField derivative_x(const ScalarField& u) {
    const Grid& g = u.grid();
    ScalarField out(g);
    const int n = g.nx();
    const double s = 0.5 / g.hx();
    for (int iy = 0; iy < g.ny(); ++iy) {
        out(0, iy) = (-3.0 * u(0, iy) + 4.0 * u(1, iy) - u(2, iy)) * s;
        for (int ix = 1; ix < n - 1; ++ix) out(ix, iy) = (u(ix + 1, iy) - u(ix - 1, iy)) * s;
        out(n - 1, iy) = (3.0 * u(n - 1, iy) - 4.0 * u(n - 2, iy) + u(n - 3, iy)) * s;
    }
    return out;
}

ScalarField derivative_y(const ScalarField& u) {
    const Grid& g = u.grid();
    ScalarField out(g);
    const int n = g.ny();
    const double s = 0.5 / g.hy();
    for (int ix = 0; ix < g.nx(); ++ix) {
        out(ix, 0) = (-3.0 * u(ix, 0) + 4.0 * u(ix, 1) - u(ix, 2)) * s;
        for (int iy = 1; iy < n - 1; ++iy) out(ix, iy) = (u(ix, iy + 1) - u(ix, iy - 1)) * s;
        out(ix, n - 1) = (3.0 * u(ix, n - 1) - 4.0 * u(ix, n - 2) + u(ix, n - 3)) * s;
    }
    return out;
}

VectorField gradient(const ScalarField& u) { return VectorField(derivative_x(u), derivative_y(u)); }

ScalarField divergence(const VectorField& v) { return derivative_x(v.x) + derivative_y(v.y); }

BoundaryData trace(const ScalarField& u) {
    const Grid& g = u.grid();
    BoundaryData d(g);
    for (std::size_t b = 0; b < g.boundary_count(); ++b) {
        const auto& n = g.boundary_node(b);
        d[b] = u(n.ix, n.iy);
    }
    return d;
}

ScalarField extend_by_zero(const BoundaryData& gdata) {
    const Grid& g = gdata.grid;
    ScalarField u(g);
    for (std::size_t b = 0; b < g.boundary_count(); ++b) {
        const auto& n = g.boundary_node(b);
        u(n.ix, n.iy) = gdata[b];
    }
    return u;
}

namespace {

// One-sided second-order derivative along the outward normal direction of a single edge.
complex outward_x(const ScalarField& u, int ix, int iy) {
    const Grid& g = u.grid();
    const int n = g.nx();
    const double s = 0.5 / g.hx();
    if (ix == 0) return (-3.0 * u(0, iy) + 4.0 * u(1, iy) - u(2, iy)) * s;
    return (3.0 * u(n - 1, iy) - 4.0 * u(n - 2, iy) + u(n - 3, iy)) * s;
}

complex outward_y(const ScalarField& u, int ix, int iy) {
    const Grid& g = u.grid();
    const int n = g.ny();
    const double s = 0.5 / g.hy();
    if (iy == 0) return (-3.0 * u(ix, 0) + 4.0 * u(ix, 1) - u(ix, 2)) * s;
    return (3.0 * u(ix, n - 1) - 4.0 * u(ix, n - 2) + u(ix, n - 3)) * s;
}

}  // namespace

BoundaryData normal_derivative(const ScalarField& u, const BoundarySegment& seg) {
    const Grid& g = u.grid();
    require_same_grid(g, seg.grid, "normal_derivative");
    BoundaryData d(g);
    for (std::size_t b = 0; b < g.boundary_count(); ++b) {
        if (!seg.mask[b]) continue;
        const auto& n = g.boundary_node(b);
        complex v = 0.0;
        if (n.nx != 0.0) v += n.nx * outward_x(u, n.ix, n.iy);
        if (n.ny != 0.0) v += n.ny * outward_y(u, n.ix, n.iy);
        d[b] = v;
    }
    return d;
}

BoundaryData normal_derivative(const ScalarField& u) { return normal_derivative(u, BoundarySegment::full(u.grid())); }

BoundaryData normal_component(const VectorField& v) {
    const Grid& g = v.grid();
    BoundaryData d(g);
    for (std::size_t b = 0; b < g.boundary_count(); ++b) {
        const auto& n = g.boundary_node(b);
        d[b] = n.nx * v.x(n.ix, n.iy) + n.ny * v.y(n.ix, n.iy);
    }
    return d;
}

complex integrate_interior(const ScalarField& u) {
    const Grid& g = u.grid();
    complex sum = 0.0;
    for (int iy = 0; iy < g.ny(); ++iy) {
        const double wy = (iy == 0 || iy == g.ny() - 1) ? 0.5 : 1.0;
        complex row = 0.0;
        for (int ix = 0; ix < g.nx(); ++ix) {
            const double wx = (ix == 0 || ix == g.nx() - 1) ? 0.5 : 1.0;
            row += wx * u(ix, iy);
        }
        sum += wy * row;
    }
    return sum * (g.hx() * g.hy());
}

complex integrate_boundary(const BoundaryData& bd) {
    const Grid& g = bd.grid;
    complex sum = 0.0;
    for (std::size_t b = 0; b < g.boundary_count(); ++b) sum += g.boundary_node(b).weight * bd[b];
    return sum;
}

double harmonic_defect(const ScalarField& v) {
    const Grid& g = v.grid();
    const double sx = 1.0 / (g.hx() * g.hx());
    const double sy = 1.0 / (g.hy() * g.hy());
    double num = 0.0, den = 0.0;
    for (int iy = 1; iy < g.ny() - 1; ++iy)
        for (int ix = 1; ix < g.nx() - 1; ++ix) {
            const complex c = v(ix, iy);
            const complex lap = (v(ix - 1, iy) - 2.0 * c + v(ix + 1, iy)) * sx + (v(ix, iy - 1) - 2.0 * c + v(ix, iy + 1)) * sy;
            num = std::max(num, std::abs(lap));
            den = std::max(den, (std::abs(v(ix - 1, iy)) + 2.0 * std::abs(c) + std::abs(v(ix + 1, iy))) * sx +
                                    (std::abs(v(ix, iy - 1)) + 2.0 * std::abs(c) + std::abs(v(ix, iy + 1))) * sy);
        }
    return den == 0.0 ? 0.0 : num / den;
}

// ---------------------------------------------------------------------------
// Poisson solver

namespace {

// Interior unknown numbering: (ix-1) + (iy-1)*(nx-2).
Eigen::Index unknown(const Grid& g, int ix, int iy) { return (ix - 1) + static_cast<Eigen::Index>(iy - 1) * (g.nx() - 2); }

}  // namespace

PoissonSolver::PoissonSolver(Grid grid, double rel_tolerance) : grid_(std::move(grid)), rel_tolerance_(rel_tolerance) {
    const Grid& g = grid_;
    const Eigen::Index n = static_cast<Eigen::Index>(g.nx() - 2) * (g.ny() - 2);
    const double sx = 1.0 / (g.hx() * g.hx());
    const double sy = 1.0 / (g.hy() * g.hy());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) * 5);
    for (int iy = 1; iy < g.ny() - 1; ++iy)
        for (int ix = 1; ix < g.nx() - 1; ++ix) {
            const Eigen::Index r = unknown(g, ix, iy);
            trip.emplace_back(r, r, 2.0 * sx + 2.0 * sy);
            if (ix > 1) trip.emplace_back(r, unknown(g, ix - 1, iy), -sx);
            if (ix < g.nx() - 2) trip.emplace_back(r, unknown(g, ix + 1, iy), -sx);
            if (iy > 1) trip.emplace_back(r, unknown(g, ix, iy - 1), -sy);
            if (iy < g.ny() - 2) trip.emplace_back(r, unknown(g, ix, iy + 1), -sy);
        }
    matrix_.resize(n, n);
    matrix_.setFromTriplets(trip.begin(), trip.end());
    matrix_norm_ = 4.0 * sx + 4.0 * sy;
    factor_.compute(matrix_);
    if (factor_.info() != Eigen::Success) throw SolverError("Poisson factorization failed", 0, 0.0);
}

ScalarField PoissonSolver::solve(const ScalarField& rhs, const BoundaryData& gdata) const {
    const Grid& g = grid_;
    require_same_grid(g, rhs.grid(), "PoissonSolver::solve (rhs)");
    require_same_grid(g, gdata.grid, "PoissonSolver::solve (boundary)");

    const Eigen::Index n = matrix_.rows();
    const double sx = 1.0 / (g.hx() * g.hx());
    const double sy = 1.0 / (g.hy() * g.hy());
    Eigen::MatrixXd b(n, 2);
    for (int iy = 1; iy < g.ny() - 1; ++iy)
        for (int ix = 1; ix < g.nx() - 1; ++ix) {
            complex v = rhs(ix, iy);
            if (ix == 1) v += sx * gdata[static_cast<std::size_t>(g.boundary_slot(0, iy))];
            if (ix == g.nx() - 2) v += sx * gdata[static_cast<std::size_t>(g.boundary_slot(g.nx() - 1, iy))];
            if (iy == 1) v += sy * gdata[static_cast<std::size_t>(g.boundary_slot(ix, 0))];
            if (iy == g.ny() - 2) v += sy * gdata[static_cast<std::size_t>(g.boundary_slot(ix, g.ny() - 1))];
            const Eigen::Index r = unknown(g, ix, iy);
            b(r, 0) = v.real();
            b(r, 1) = v.imag();
        }

    // Normwise backward error |b - Ax| / (|A| |x| + |b|), sup norms.
    Eigen::MatrixXd x = factor_.solve(b);
    const double bnorm = b.cwiseAbs().maxCoeff();
    double rel = 0.0;
    int steps = 1;
    if (bnorm > 0.0) {
        const auto backward_error = [&](const Eigen::MatrixXd& r) {
            return r.cwiseAbs().maxCoeff() / (matrix_norm_ * x.cwiseAbs().maxCoeff() + bnorm);
        };
        Eigen::MatrixXd r = b - matrix_ * x;
        rel = backward_error(r);
        while (rel > rel_tolerance_ && steps < 3) {
            x += factor_.solve(r);
            r = b - matrix_ * x;
            rel = backward_error(r);
            ++steps;
        }
    }
    if (!x.allFinite() || rel > rel_tolerance_) {
        std::ostringstream os;
        os << "Poisson solve did not reach tolerance: relative residual " << rel << " after " << steps
           << " iterations";
        throw SolverError(os.str(), steps, rel);
    }

    ScalarField u = extend_by_zero(gdata);
    for (int iy = 1; iy < g.ny() - 1; ++iy)
        for (int ix = 1; ix < g.nx() - 1; ++ix) {
            const Eigen::Index r = unknown(g, ix, iy);
            u(ix, iy) = complex(x(r, 0), x(r, 1));
        }
    return u;
}

ScalarField PoissonSolver::solve(const ScalarField& rhs) const { return solve(rhs, BoundaryData(grid_)); }

ScalarField PoissonSolver::harmonic_extension(const BoundaryData& g) const { return solve(ScalarField(grid_), g); }

ScalarField solve_dirichlet_poisson(const PoissonSolver& solver, const ScalarField& rhs, const BoundaryData& g) {
    return solver.solve(rhs, g);
}

}  // namespace magsi
