#pragma once

/// Structured 2-D grids, complex nodal fields, finite-difference operators
/// and the Dirichlet Poisson solver everything else is built on.

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace magsi {

using complex = std::complex<double>;
using CVector = Eigen::VectorXcd;

inline constexpr complex I{0.0, 1.0};

struct Rect {
    double x_min = 0.0;
    double x_max = 1.0;
    double y_min = 0.0;
    double y_max = 1.0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
};

enum class Edge { bottom, right, top, left };

/// One node of the boundary, in counter-clockwise order starting at (x_min, y_min).
///
/// Corner nodes carry the average of the two adjacent edge normals, weighted
/// by the trapezoid weights of the two edges, so that `weight * normal`
/// reproduces the per-edge trapezoid rule exactly.
struct BoundaryNode {
    int ix = 0;
    int iy = 0;
    double nx = 0.0;
    double ny = 0.0;
    double weight = 0.0;
    bool corner = false;
};

namespace detail {
struct GridData {
    int nx = 0;
    int ny = 0;
    Rect rect;
    double hx = 0.0;
    double hy = 0.0;
    std::vector<BoundaryNode> boundary;
    std::vector<std::ptrdiff_t> boundary_slot;  // node index -> boundary index or -1
};
}  // namespace detail

/// Tensor-product grid on a rectangle. Node (ix, iy) has flat index iy * nx + ix.
///
/// Cheap to copy: the geometry is shared and immutable.
class Grid {
public:
    Grid() = default;

    /// Throws std::invalid_argument("grid too coarse") when nx or ny < 3 and
    /// std::invalid_argument on inverted or non-finite bounds.
    static Grid make(int nx, int ny, Rect rect = {});

    int nx() const { return data_->nx; }
    int ny() const { return data_->ny; }
    const Rect& rect() const { return data_->rect; }
    double hx() const { return data_->hx; }
    double hy() const { return data_->hy; }

    std::size_t node_count() const { return static_cast<std::size_t>(nx()) * ny(); }
    std::size_t index(int ix, int iy) const { return static_cast<std::size_t>(iy) * nx() + ix; }
    double x(int ix) const { return rect().x_min + ix * hx(); }
    double y(int iy) const { return rect().y_min + iy * hy(); }

    bool is_boundary(int ix, int iy) const {
        return ix == 0 || iy == 0 || ix == nx() - 1 || iy == ny() - 1;
    }
    std::size_t boundary_count() const { return data_->boundary.size(); }
    const std::vector<BoundaryNode>& boundary_nodes() const { return data_->boundary; }
    const BoundaryNode& boundary_node(std::size_t b) const { return data_->boundary[b]; }
    /// Boundary slot of a node, or -1 for interior nodes.
    std::ptrdiff_t boundary_slot(int ix, int iy) const { return data_->boundary_slot[index(ix, iy)]; }

    /// Distance of node (ix, iy) to the boundary, in grid cells.
    int cells_from_boundary(int ix, int iy) const;

    bool valid() const { return data_ != nullptr; }
    bool same_as(const Grid& other) const;
    friend bool operator==(const Grid& a, const Grid& b) { return a.same_as(b); }

private:
    std::shared_ptr<const detail::GridData> data_;
};

void require_same_grid(const Grid& a, const Grid& b, const char* where);

/// Complex nodal values on every grid node.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(Grid grid);
    ScalarField(Grid grid, CVector values);

    static ScalarField constant(Grid grid, complex c);
    static ScalarField sample(Grid grid, const std::function<complex(double, double)>& fn);

    const Grid& grid() const { return grid_; }
    const CVector& values() const { return values_; }
    CVector& values() { return values_; }

    complex& operator()(int ix, int iy) { return values_[static_cast<Eigen::Index>(grid_.index(ix, iy))]; }
    complex operator()(int ix, int iy) const { return values_[static_cast<Eigen::Index>(grid_.index(ix, iy))]; }

    double max_abs() const;
    /// Sup norm over interior nodes only.
    double max_abs_interior() const;
    bool all_finite() const;

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(complex c);

    friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
    friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
    friend ScalarField operator*(ScalarField a, complex c) { return a *= c; }
    friend ScalarField operator*(complex c, ScalarField a) { return a *= c; }

private:
    Grid grid_;
    CVector values_;
};

/// Pointwise product.
ScalarField operator*(const ScalarField& a, const ScalarField& b);

/// Two components sharing one grid.
struct VectorField {
    ScalarField x;
    ScalarField y;

    VectorField() = default;
    explicit VectorField(const Grid& grid) : x(grid), y(grid) {}
    VectorField(ScalarField x_, ScalarField y_);

    const Grid& grid() const { return x.grid(); }
    double max_abs() const;

    VectorField& operator+=(const VectorField& o);
    VectorField& operator*=(complex c);
    friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
    friend VectorField operator*(VectorField a, complex c) { return a *= c; }
};

/// Componentwise product V * s.
VectorField operator*(const VectorField& v, const ScalarField& s);
/// Complex dot product without conjugation.
ScalarField dot(const VectorField& a, const VectorField& b);

enum class SegmentLabel { gamma1, gamma2, full, custom };

/// A subset of boundary nodes.
struct BoundarySegment {
    Grid grid;
    std::vector<bool> mask;
    SegmentLabel label = SegmentLabel::custom;

    static BoundarySegment full(const Grid& grid);
    /// Nodes lying on any of the given edges (corners belong to both adjacent edges).
    static BoundarySegment edges(const Grid& grid, const std::vector<Edge>& edges,
                                 SegmentLabel label = SegmentLabel::custom);
    static BoundarySegment where(const Grid& grid, const std::function<bool(double, double)>& pred,
                                 SegmentLabel label = SegmentLabel::custom);

    bool contains(std::size_t b) const { return mask[b]; }
    std::size_t count() const;
    bool empty() const { return count() == 0; }
};

/// Complex values on boundary nodes, indexed by boundary slot.
struct BoundaryData {
    Grid grid;
    CVector values;

    BoundaryData() = default;
    explicit BoundaryData(const Grid& g) : grid(g), values(CVector::Zero(static_cast<Eigen::Index>(g.boundary_count()))) {}
    BoundaryData(const Grid& g, CVector v);

    static BoundaryData sample(const Grid& grid, const std::function<complex(double, double)>& fn);

    complex& operator[](std::size_t b) { return values[static_cast<Eigen::Index>(b)]; }
    complex operator[](std::size_t b) const { return values[static_cast<Eigen::Index>(b)]; }

    double max_abs() const { return values.size() ? values.cwiseAbs().maxCoeff() : 0.0; }
    /// Values outside `seg` set to zero.
    BoundaryData restricted(const BoundarySegment& seg) const;
    /// True when every value outside `seg` is exactly zero.
    bool supported_in(const BoundarySegment& seg) const;

    BoundaryData& operator+=(const BoundaryData& o);
    BoundaryData& operator-=(const BoundaryData& o);
    BoundaryData& operator*=(complex c);
    friend BoundaryData operator+(BoundaryData a, const BoundaryData& b) { return a += b; }
    friend BoundaryData operator-(BoundaryData a, const BoundaryData& b) { return a -= b; }
    friend BoundaryData operator*(BoundaryData a, complex c) { return a *= c; }
    friend BoundaryData operator*(complex c, BoundaryData a) { return a *= c; }
};

/// Pointwise product of boundary data.
BoundaryData operator*(const BoundaryData& a, const BoundaryData& b);

// ---------------------------------------------------------------------------
// Discrete operators

Grid build_grid(int nx, int ny, Rect rect);

/// 5-point Laplacian at interior nodes, zero on the boundary.
ScalarField laplacian(const ScalarField& u);
/// Second differences along x and y separately (interior only).
ScalarField second_difference_x(const ScalarField& u);
ScalarField second_difference_y(const ScalarField& u);

/// Centered differences inside, one-sided second-order differences on the boundary.
VectorField gradient(const ScalarField& u);
ScalarField divergence(const VectorField& v);
ScalarField derivative_x(const ScalarField& u);
ScalarField derivative_y(const ScalarField& u);

/// Boundary trace of a nodal field.
BoundaryData trace(const ScalarField& u);
/// Field that equals `g` on the boundary and zero inside.
ScalarField extend_by_zero(const BoundaryData& g);

/// nu . grad u on the nodes of `seg` (zero elsewhere), second-order one-sided.
BoundaryData normal_derivative(const ScalarField& u, const BoundarySegment& seg);
BoundaryData normal_derivative(const ScalarField& u);
/// nu . V on every boundary node.
BoundaryData normal_component(const VectorField& v);

/// Composite trapezoid rule over the rectangle.
complex integrate_interior(const ScalarField& u);
/// Composite trapezoid rule along the boundary, edge by edge.
complex integrate_boundary(const BoundaryData& b);

/// Relative harmonicity defect: sup |Lap_h v| over the sup of the summed absolute
/// stencil terms, interior nodes only. Zero for the zero field.
double harmonic_defect(const ScalarField& v);

// ---------------------------------------------------------------------------
// Dirichlet Poisson solver

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, int iterations, double residual)
        : std::runtime_error(what), iterations_(iterations), residual_(residual) {}
    int iterations() const { return iterations_; }
    double residual() const { return residual_; }

private:
    int iterations_;
    double residual_;
};

/// Solves -Lap_h u = rhs at interior nodes with u = g on the boundary.
/// Accepts the solution once the normwise backward error
/// |b - Ax| / (|A| |x| + |b|) is at most the relative tolerance, using up to
/// two steps of iterative refinement.
///
/// The interior matrix is factorized once at construction (sparse LDL^T);
/// `solve` is const and may be called from several threads.
class PoissonSolver {
public:
    explicit PoissonSolver(Grid grid, double rel_tolerance = 1e-12);

    const Grid& grid() const { return grid_; }

    ScalarField solve(const ScalarField& rhs, const BoundaryData& g) const;
    /// Zero boundary values.
    ScalarField solve(const ScalarField& rhs) const;
    /// Harmonic extension of `g`.
    ScalarField harmonic_extension(const BoundaryData& g) const;

private:
    Grid grid_;
    double rel_tolerance_;
    Eigen::SparseMatrix<double> matrix_;
    double matrix_norm_ = 0.0;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor_;
};

ScalarField solve_dirichlet_poisson(const PoissonSolver& solver, const ScalarField& rhs, const BoundaryData& g);

}  // namespace magsi
