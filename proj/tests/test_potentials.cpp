#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace magsi;
using namespace magsi::test;

namespace {

ScalarField random_z(const Grid& g, unsigned seed, double scale) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> d(-scale, scale);
    ScalarField z(g);
    for (auto& v : z.values()) v = complex(d(rng), d(rng));
    return z;
}

TaylorPotential full_potential(const Grid& g, const std::string& preset, int order) {
    PotentialSpec s;
    s.preset = preset;
    s.order = order;
    for (int k = 1; k <= order; ++k) {
        s.scales["A" + std::to_string(k) + "x"] = 0.3 * k;
        s.scales["A" + std::to_string(k) + "y"] = -0.2 + 0.1 * k;
        if (k >= 2) s.scales["q" + std::to_string(k)] = 1.0 / k;
    }
    return synth_potential(g, s);
}

}  // namespace

TEST(EvalA, SingleFirstOrderTerm) {
    const Grid g = unit_grid(17);
    const TaylorPotential p = bump_potential(g, {{"A1x", 1.0}, {"A1y", -0.5}});
    const ScalarField z = random_z(g, 1, 0.5);
    const VectorField a = eval_A(p, z);
    EXPECT_LT((a.x - p.A(1).x * z).max_abs(), 1e-15);
    EXPECT_LT((a.y - p.A(1).y * z).max_abs(), 1e-15);
}

TEST(EvalA, ZeroArgumentGivesZero) {
    const Grid g = unit_grid(17);
    for (const char* preset : {"gaussian_bump", "cosine_bump", "two_bumps"}) {
        const TaylorPotential p = full_potential(g, preset, 4);
        const ScalarField z(g);
        EXPECT_EQ(eval_A(p, z).max_abs(), 0.0);
        EXPECT_EQ(eval_q(p, z).max_abs(), 0.0);
    }
}

TEST(EvalQ, SecondOrderOnlyConstantArgument) {
    const Grid g = unit_grid(17);
    const TaylorPotential p = bump_potential(g, {{"q2", 1.0}});
    const complex c(0.4, -0.3);
    const ScalarField q = eval_q(p, ScalarField::constant(g, c));
    EXPECT_LT((q - p.q(2) * (c * c / 2.0)).max_abs(), 1e-15);
}

TEST(Remainder, FirstOrderAIsIndependentOfZ) {
    const Grid g = unit_grid(17);
    const TaylorPotential p = bump_potential(g, {{"A1x", 1.0}, {"A1y", 2.0}});
    for (unsigned seed : {1u, 2u}) {
        const VectorField ar = remainder_Ar(p, random_z(g, seed, 1.0));
        EXPECT_EQ((ar.x - p.A(1).x).max_abs(), 0.0);
        EXPECT_EQ((ar.y - p.A(1).y).max_abs(), 0.0);
    }
}

TEST(Remainder, SecondOrderQIsHalfQ2) {
    const Grid g = unit_grid(17);
    const TaylorPotential p = bump_potential(g, {{"q2", 1.0}});
    EXPECT_LT((remainder_qr(p, random_z(g, 3, 1.0)) - p.q(2) * 0.5).max_abs(), 1e-16);
}

TEST(Remainder, TaylorIdentityAllPresets) {
    const Grid g = unit_grid(33);
    for (const char* preset : {"gaussian_bump", "cosine_bump", "two_bumps"}) {
        for (int order : {2, 3, 4}) {
            const TaylorPotential p = full_potential(g, preset, order);
            for (unsigned seed = 0; seed < 3; ++seed) {
                const ScalarField z = random_z(g, seed, 0.8);
                const VectorField a = eval_A(p, z), ar = remainder_Ar(p, z);
                const double scale = 1.0 + a.max_abs();
                EXPECT_LT((a.x - ar.x * z).max_abs(), 1e-14 * scale) << preset << " " << order;
                EXPECT_LT((a.y - ar.y * z).max_abs(), 1e-14 * scale);
                const ScalarField q = eval_q(p, z);
                EXPECT_LT((q - remainder_qr(p, z) * z * z).max_abs(), 1e-14 * (1.0 + q.max_abs()));
            }
        }
    }
}

TEST(Derivatives, EvalDerivativesMatchSeries) {
    const Grid g = unit_grid(17);
    const TaylorPotential p = full_potential(g, "gaussian_bump", 3);
    const ScalarField z = random_z(g, 5, 0.5);
    // d/dz (q2 z^2/2 + q3 z^3/6) = q2 z + q3 z^2/2
    const ScalarField dq = p.q(2) * z + p.q(3) * z * z * 0.5;
    EXPECT_LT((eval_dq(p, z) - dq).max_abs(), 1e-14);
    const ScalarField dax = p.A(1).x + p.A(2).x * z + p.A(3).x * z * z * 0.5;
    EXPECT_LT((eval_dA(p, z).x - dax).max_abs(), 1e-14);
}

TEST(Derivatives, FiniteDifferenceExtractionIsSecondOrder) {
    const Grid g = unit_grid(17);
    const TaylorPotential p = full_potential(g, "gaussian_bump", 5);
    const int ic = 8;
    const auto q_at = [&](double z) { return eval_q(p, ScalarField::constant(g, z))(ic, ic); };
    std::vector<double> deltas{0.2, 0.1, 0.05}, e2, e3;
    for (double d : deltas) {
        const complex d2 = (q_at(d) - 2.0 * q_at(0.0) + q_at(-d)) / (d * d);
        const complex d3 = (q_at(2 * d) - 2.0 * q_at(d) + 2.0 * q_at(-d) - q_at(-2 * d)) / (2 * d * d * d);
        e2.push_back(std::abs(d2 - p.q(2)(ic, ic)));
        e3.push_back(std::abs(d3 - p.q(3)(ic, ic)));
    }
    EXPECT_NEAR(log_slope(deltas, e2), 2.0, 0.1);
    EXPECT_NEAR(log_slope(deltas, e3), 2.0, 0.1);
}

TEST(Synth, ZeroAmplitudeGivesZero) {
    const Grid g = unit_grid(33);
    const TaylorPotential p = bump_potential(g, {{"A1x", 1.0}, {"q2", 1.0}, {"q3", 2.0}}, 0.0);
    EXPECT_TRUE(p.is_zero());
}

TEST(Synth, GaussianBumpCenterAndBoundary) {
    const Grid g = unit_grid(129);
    const TaylorPotential p = bump_potential(g, {{"A1x", 1.0}});
    EXPECT_NEAR(std::abs(p.A(1).x(64, 64) - 1.0), 0.0, 1e-15);
    // exp(-0.25 / 0.01) at the edge midpoints
    EXPECT_LT(gaussian(0.5, 0.0), 1e-8);
    for (const auto& n : g.boundary_nodes()) EXPECT_LT(std::abs(p.A(1).x(n.ix, n.iy)), 1e-8);
    EXPECT_NEAR(p.A(1).x(80, 64).real(), gaussian(g.x(80), g.y(64)), 1e-15);
    EXPECT_TRUE(p.compact_support());
    EXPECT_TRUE(p.vanishes_near_boundary(2));
}

TEST(Synth, TwoBumpsHaveDisjointSupports) {
    const Grid g = unit_grid(65);
    PotentialSpec s;
    s.preset = "two_bumps";
    s.sigma = 0.12;
    const ScalarField prof = preset_profile(g, s);
    const double cl = 0.5 - 1.25 * s.sigma, cr = 0.5 + 1.25 * s.sigma;
    bool left = false, right = false;
    for (int iy = 0; iy < g.ny(); ++iy)
        for (int ix = 0; ix < g.nx(); ++ix) {
            if (prof(ix, iy) == complex(0.0)) continue;
            const double x = g.x(ix), y = g.y(iy);
            const bool in_l = std::hypot(x - cl, y - 0.5) < s.sigma;
            const bool in_r = std::hypot(x - cr, y - 0.5) < s.sigma;
            EXPECT_TRUE(in_l != in_r);
            left |= in_l;
            right |= in_r;
        }
    EXPECT_TRUE(left && right);
}

TEST(Synth, CosineBumpIsCompact) {
    const Grid g = unit_grid(65);
    PotentialSpec s;
    s.preset = "cosine_bump";
    s.sigma = 0.2;
    const ScalarField prof = preset_profile(g, s);
    EXPECT_NEAR(prof(32, 32).real(), 1.0, 1e-15);
    EXPECT_EQ(prof(32 + 14, 32), complex(0.0));
}

TEST(Synth, UnknownPresetOrCoefficientThrows) {
    const Grid g = unit_grid(17);
    PotentialSpec s;
    s.preset = "square_bump";
    EXPECT_THROW(synth_potential(g, s), std::invalid_argument);
    s.preset = "gaussian_bump";
    s.scales = {{"q1", 1.0}};
    EXPECT_THROW(synth_potential(g, s), std::invalid_argument);
    s.scales = {{"A4x", 1.0}};
    EXPECT_THROW(synth_potential(g, s), std::invalid_argument);
}

TEST(Synth, BumpReachingTheBoundaryThrows) {
    const Grid g = unit_grid(33);
    PotentialSpec s;
    s.sigma = 0.5;
    s.scales = {{"q2", 1.0}};
    EXPECT_THROW(synth_potential(g, s), std::invalid_argument);
}

TEST(TaylorPotentialType, StructuralZerosAndOrders) {
    const Grid g = unit_grid(9);
    const TaylorPotential p(g, 3);
    EXPECT_FALSE(p.has_q(1));
    EXPECT_FALSE(p.has_A(0));
    EXPECT_TRUE(p.has_A(3));
    EXPECT_EQ(p.q(1).max_abs(), 0.0);
    EXPECT_EQ(p.A(7).max_abs(), 0.0);
    EXPECT_THROW(TaylorPotential(g, 1), std::invalid_argument);
}

TEST(TaylorPotentialType, ValidateRejectsBoundaryMass) {
    const Grid g = unit_grid(9);
    TaylorPotential p(g, 2);
    p.q(2)(0, 4) = 1.0;
    EXPECT_FALSE(p.vanishes_near_boundary());
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p.set_compact_support(false);
    EXPECT_NO_THROW(p.validate());
    p.q(2)(4, 4) = std::numeric_limits<double>::infinity();
    EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(TaylorPotentialType, LowerOrdersDropsTheOrderMCoefficients) {
    const Grid g = unit_grid(33);
    const TaylorPotential p = full_potential(g, "gaussian_bump", 3);
    const TaylorPotential l2 = lower_orders(p, 2);
    EXPECT_TRUE(l2.is_zero());
    const TaylorPotential l3 = lower_orders(p, 3);
    EXPECT_TRUE(l3.agrees_with(p, 1, 2));
    EXPECT_EQ(l3.A(2).max_abs(), 0.0);
    EXPECT_EQ(l3.q(3).max_abs(), 0.0);
    EXPECT_FALSE(l3.agrees_with(p, 2, 2));
}
