#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace magsi;
using namespace magsi::test;

namespace {

ScalarField sinsin(const Grid& g) {
    return ScalarField::sample(g, [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); });
}

ScalarField random_field(const Grid& g, unsigned seed, bool zero_boundary) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    ScalarField f(g);
    for (int iy = 0; iy < g.ny(); ++iy)
        for (int ix = 0; ix < g.nx(); ++ix)
            f(ix, iy) = (zero_boundary && g.is_boundary(ix, iy)) ? complex(0.0) : complex(d(rng), d(rng));
    return f;
}

}  // namespace

TEST(BuildGrid, SpacingOfThreeByThree) {
    const Grid g = build_grid(3, 3, Rect{});
    EXPECT_DOUBLE_EQ(g.hx(), 0.5);
    EXPECT_DOUBLE_EQ(g.hy(), 0.5);
}

TEST(BuildGrid, SpacingOf129) {
    const Grid g = unit_grid(129);
    EXPECT_DOUBLE_EQ(g.hx(), 1.0 / 128);
    EXPECT_EQ(g.node_count(), 129u * 129u);
}

TEST(BuildGrid, RejectsTooCoarse) {
    try {
        build_grid(2, 5, Rect{});
        FAIL() << "expected an exception";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("grid too coarse"), std::string::npos);
    }
}

TEST(BuildGrid, RejectsInvertedBounds) {
    EXPECT_THROW(build_grid(5, 5, Rect{1.0, 0.0, 0.0, 1.0}), std::invalid_argument);
    EXPECT_THROW(build_grid(5, 5, Rect{0.0, 1.0, 0.0, 0.0}), std::invalid_argument);
}

TEST(BuildGrid, RowMajorYOuter) {
    const Grid g = build_grid(4, 3, Rect{});
    EXPECT_EQ(g.index(1, 0), 1u);
    EXPECT_EQ(g.index(0, 1), 4u);
}

TEST(BuildGrid, BoundaryAndInteriorPartitionNodes) {
    const Grid g = build_grid(7, 5, Rect{-1.0, 0.0, -0.5, 0.5});
    std::size_t boundary = 0, interior = 0;
    for (int iy = 0; iy < g.ny(); ++iy)
        for (int ix = 0; ix < g.nx(); ++ix) {
            const bool b = g.is_boundary(ix, iy);
            (b ? boundary : interior)++;
            EXPECT_EQ(b, g.boundary_slot(ix, iy) >= 0);
        }
    EXPECT_EQ(boundary + interior, g.node_count());
    EXPECT_EQ(boundary, g.boundary_count());
    EXPECT_EQ(interior, 5u * 3u);
}

TEST(Laplacian, HarmonicQuadraticIsExact) {
    const Grid g = unit_grid(33);
    const ScalarField u = ScalarField::sample(g, [](double x, double y) { return x * x - y * y; });
    EXPECT_LT(laplacian(u).max_abs(), 1e-10);
}

TEST(Laplacian, ConstantGivesZero) {
    const Grid g = unit_grid(17);
    EXPECT_EQ(laplacian(ScalarField::constant(g, complex(2.5, -1.0))).max_abs(), 0.0);
}

TEST(Laplacian, QuarticAtCenter) {
    // (x+h)^4 - 2x^4 + (x-h)^4 = 12 x^2 h^2 + 2 h^4, so the stencil gives 12 x^2 + 2 h^2.
    const Grid g = unit_grid(65);
    const ScalarField u = ScalarField::sample(g, [](double x, double) { return std::pow(x, 4); });
    const double h = g.hx();
    const complex got = laplacian(u)(32, 32);
    EXPECT_NEAR(got.real(), 12 * 0.25, 3 * h * h);
    EXPECT_NEAR(got.real(), 12 * 0.25 + 2 * h * h, 1e-9);
}

TEST(Laplacian, BoundaryNodesCarryZero) {
    const Grid g = unit_grid(9);
    const ScalarField l = laplacian(ScalarField::sample(g, [](double x, double y) { return std::exp(x + 2 * y); }));
    for (const auto& n : g.boundary_nodes()) EXPECT_EQ(l(n.ix, n.iy), complex(0.0));
}

TEST(Laplacian, RefinementSlopeTwo) {
    std::vector<double> h, err;
    for (int n : {17, 33, 65, 129}) {
        const Grid g = unit_grid(n);
        const ScalarField l = laplacian(sinsin(g));
        const ScalarField exact = complex(-2 * kPi * kPi) * sinsin(g);
        h.push_back(g.hx());
        err.push_back((l - exact).max_abs_interior());
    }
    EXPECT_NEAR(log_slope(h, err), 2.0, 0.2);
}

TEST(Gradient, LinearIsExactEverywhere) {
    const Grid g = build_grid(9, 7, Rect{0.0, 2.0, -1.0, 1.0});
    const VectorField gr = gradient(ScalarField::sample(g, [](double x, double) { return x; }));
    EXPECT_LT((gr.x - ScalarField::constant(g, 1.0)).max_abs(), 1e-13);
    EXPECT_LT(gr.y.max_abs(), 1e-13);
}

TEST(Divergence, IdentityFieldGivesTwo) {
    const Grid g = unit_grid(11);
    const VectorField v(ScalarField::sample(g, [](double x, double) { return x; }),
                        ScalarField::sample(g, [](double, double y) { return y; }));
    EXPECT_LT((divergence(v) - ScalarField::constant(g, 2.0)).max_abs(), 1e-13);
}

TEST(Gradient, RefinementSlopeTwo) {
    std::vector<double> h, err;
    for (int n : {33, 65, 129}) {
        const Grid g = unit_grid(n);
        const VectorField gr = gradient(sinsin(g));
        const ScalarField ex = ScalarField::sample(g, [](double x, double y) { return kPi * std::cos(kPi * x) * std::sin(kPi * y); });
        const ScalarField ey = ScalarField::sample(g, [](double x, double y) { return kPi * std::sin(kPi * x) * std::cos(kPi * y); });
        h.push_back(g.hx());
        err.push_back(std::max((gr.x - ex).max_abs(), (gr.y - ey).max_abs()));
    }
    EXPECT_LT(err.back(), 20 * h.back() * h.back());
    EXPECT_NEAR(log_slope(h, err), 2.0, 0.2);
}

TEST(Poisson, HarmonicQuadraticReproduced) {
    const Grid g = unit_grid(33);
    const PoissonSolver s(g);
    const ScalarField u = ScalarField::sample(g, [](double x, double y) { return x * x - y * y; });
    EXPECT_LT((s.solve(ScalarField(g), trace(u)) - u).max_abs(), 1e-12);
}

TEST(Poisson, ZeroDataZeroSolution) {
    const Grid g = unit_grid(17);
    const PoissonSolver s(g);
    EXPECT_EQ(s.solve(ScalarField(g), BoundaryData(g)).max_abs(), 0.0);
}

TEST(Poisson, TorsionCenterValue) {
    const Grid g = unit_grid(129);
    const PoissonSolver s(g);
    const ScalarField u = solve_dirichlet_poisson(s, ScalarField::constant(g, 2.0), BoundaryData(g));
    EXPECT_LT(std::abs(u(64, 64) - kTorsionCenter) / kTorsionCenter, 1e-4);
}

TEST(Poisson, InvertsLaplacianOnZeroBoundaryFields) {
    const Grid g = unit_grid(33);
    const PoissonSolver s(g);
    const ScalarField u = random_field(g, 7, true);
    const ScalarField back = s.solve(complex(-1.0) * laplacian(u));
    EXPECT_LT((back - u).max_abs(), 1e-10);
}

TEST(Poisson, ComplexRightSideRespectsBoundaryValues) {
    const Grid g = build_grid(21, 13, Rect{-1.0, 0.0, -0.5, 0.5});
    const PoissonSolver s(g);
    const ScalarField rhs = random_field(g, 3, false);
    const BoundaryData bd = trace(random_field(g, 4, false));
    const ScalarField u = s.solve(rhs, bd);
    EXPECT_LT((trace(u) - bd).max_abs(), 0.0 + 1e-15);
    const ScalarField r = complex(-1.0) * laplacian(u) - rhs;
    EXPECT_LT(r.max_abs_interior(), 1e-9);
}

TEST(NormalDerivative, QuadraticOnRightEdge) {
    const Grid g = unit_grid(17);
    const ScalarField u = ScalarField::sample(g, [](double x, double y) { return x * x - y * y; });
    const BoundarySegment right = BoundarySegment::edges(g, {Edge::right});
    const BoundaryData d = normal_derivative(u, right);
    for (std::size_t b = 0; b < g.boundary_count(); ++b) {
        const auto& n = g.boundary_node(b);
        if (n.ix == g.nx() - 1 && !n.corner) EXPECT_NEAR(std::abs(d[b] - 2.0), 0.0, 1e-12);
        if (!right.contains(b)) EXPECT_EQ(d[b], complex(0.0));
    }
}

TEST(NormalDerivative, ConstantGivesZero) {
    const Grid g = unit_grid(9);
    EXPECT_LT(normal_derivative(ScalarField::constant(g, 3.0)).max_abs(), 1e-12);
}

TEST(NormalDerivative, TopEdgeSecondOrder) {
    std::vector<double> h, err;
    for (int n : {33, 65, 129}) {
        const Grid g = unit_grid(n);
        const ScalarField u = ScalarField::sample(g, [](double x, double y) { return std::sin(kPi * x) * std::sinh(kPi * y); });
        const BoundaryData d = normal_derivative(u, BoundarySegment::edges(g, {Edge::top}));
        double e = 0.0;
        for (std::size_t b = 0; b < g.boundary_count(); ++b) {
            const auto& nd = g.boundary_node(b);
            if (nd.iy != g.ny() - 1 || nd.corner) continue;
            e = std::max(e, std::abs(d[b] - kPi * std::sin(kPi * g.x(nd.ix)) * std::cosh(kPi)));
        }
        h.push_back(g.hx());
        err.push_back(e);
    }
    EXPECT_NEAR(log_slope(h, err), 2.0, 0.2);
}

TEST(Integrate, ConstantOverUnitSquare) {
    EXPECT_NEAR(std::abs(integrate_interior(ScalarField::constant(unit_grid(9), 1.0)) - 1.0), 0.0, 1e-14);
}

TEST(Integrate, BoundaryLengthOfUnitSquare) {
    const Grid g = unit_grid(9);
    BoundaryData one(g);
    one.values.setOnes();
    EXPECT_NEAR(std::abs(integrate_boundary(one) - 4.0), 0.0, 1e-14);
}

TEST(Integrate, BilinearIsExact) {
    const Grid g = build_grid(7, 5, Rect{0.0, 2.0, 1.0, 2.0});
    const ScalarField u = ScalarField::sample(g, [](double x, double y) { return 1.0 + 2.0 * x + 3.0 * y + x * y; });
    // int_0^2 int_1^2 (1 + 2x + 3y + xy) dy dx = 2 + 4 + 9 + 3
    EXPECT_NEAR(std::abs(integrate_interior(u) - 18.0), 0.0, 1e-12);
}

TEST(Integrate, LinearAlongBoundaryIsExact) {
    const Grid g = unit_grid(5);
    const BoundaryData b = BoundaryData::sample(g, [](double x, double y) { return x + 2 * y; });
    // edges: bottom 1/2, right 1 + 1, top 1/2 + 2, left 1
    EXPECT_NEAR(std::abs(integrate_boundary(b) - 6.0), 0.0, 1e-12);
}

TEST(Integrate, SinSinSecondOrder) {
    std::vector<double> h, err;
    for (int n : {17, 33, 65}) {
        const Grid g = unit_grid(n);
        h.push_back(g.hx());
        err.push_back(std::abs(integrate_interior(sinsin(g)) - 4.0 / (kPi * kPi)));
    }
    EXPECT_NEAR(log_slope(h, err), 2.0, 0.2);
}

TEST(MeshProperties, DiscreteGreenIdentity) {
    std::vector<double> h, gap;
    for (int n : {33, 65, 129}) {
        const Grid g = unit_grid(n);
        const ScalarField u = ScalarField::sample(g, [](double x, double y) { return std::exp(x) * std::sin(kPi * x) * std::sin(2 * kPi * y); });
        const ScalarField w = ScalarField::sample(g, [](double x, double y) { return x * (1 - x) * y * (1 - y) * (1 + x); });
        const complex a = integrate_interior(complex(-1.0) * laplacian(u) * w);
        const complex b = integrate_interior(complex(-1.0) * laplacian(w) * u);
        h.push_back(g.hx());
        gap.push_back(std::abs(a - b) + 1e-300);
    }
    EXPECT_LT(gap.back(), 1.0 * h.back() * h.back());
}

TEST(MeshProperties, OperatorsAreLinear) {
    const Grid g = build_grid(13, 11, Rect{});
    const ScalarField u = random_field(g, 1, false), v = random_field(g, 2, false);
    const complex a(0.3, -1.2), b(2.0, 0.5);
    const ScalarField c = a * u + b * v;
    EXPECT_LT((laplacian(c) - (a * laplacian(u) + b * laplacian(v))).max_abs(), 1e-10);
    const VectorField gc = gradient(c), gu = gradient(u), gv = gradient(v);
    EXPECT_LT((gc.x - (a * gu.x + b * gv.x)).max_abs(), 1e-11);
    EXPECT_LT((divergence(VectorField(u, v)) * b - divergence(VectorField(b * u, b * v))).max_abs(), 1e-11);
    EXPECT_LT((normal_derivative(c) - (a * normal_derivative(u) + b * normal_derivative(v))).max_abs(), 1e-11);
    EXPECT_LT(std::abs(integrate_interior(c) - (a * integrate_interior(u) + b * integrate_interior(v))), 1e-13);
    const PoissonSolver s(g);
    EXPECT_LT((s.solve(c) - (a * s.solve(u) + b * s.solve(v))).max_abs(), 1e-12);
}

TEST(BoundaryTypes, SegmentsAndRestriction) {
    const Grid g = unit_grid(9);
    const BoundarySegment left = BoundarySegment::edges(g, {Edge::left}, SegmentLabel::gamma1);
    EXPECT_EQ(left.count(), 9u);
    EXPECT_EQ(left.label, SegmentLabel::gamma1);
    EXPECT_EQ(BoundarySegment::full(g).count(), g.boundary_count());
    const BoundaryData one = BoundaryData::sample(g, [](double, double) { return 1.0; });
    const BoundaryData r = one.restricted(left);
    EXPECT_TRUE(r.supported_in(left));
    EXPECT_FALSE(one.supported_in(left));
    // Each corner carries the trapezoid weight of both adjacent edges.
    EXPECT_NEAR(std::abs(integrate_boundary(r) - (1.0 + g.hx())), 0.0, 1e-14);
}

TEST(BoundaryTypes, CornerWeightedNormalsReproduceEdgeRule) {
    // Sum of weight * normal over the boundary of a rectangle vanishes (closed curve).
    const Grid g = build_grid(11, 7, Rect{-1.0, 0.0, -0.5, 0.5});
    double sx = 0, sy = 0, len = 0;
    for (const auto& n : g.boundary_nodes()) {
        sx += n.weight * n.nx;
        sy += n.weight * n.ny;
        len += n.weight;
    }
    EXPECT_NEAR(sx, 0.0, 1e-14);
    EXPECT_NEAR(sy, 0.0, 1e-14);
    EXPECT_NEAR(len, 4.0, 1e-13);
}

TEST(Fields, RejectMismatchedGrids) {
    const ScalarField a(unit_grid(5)), b(unit_grid(7));
    EXPECT_THROW(a + b, std::invalid_argument);
}
