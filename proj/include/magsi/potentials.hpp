#pragma once

/// Nonlinear potentials A(x, z), q(x, z) stored as truncated Taylor series in z
/// around z = 0, with A(x, 0) = 0 and q(x, 0) = d_z q(x, 0) = 0 built in.

#include "magsi/mesh.hpp"

#include <map>
#include <string>
#include <vector>

namespace magsi {

/// Coefficients d_z^k A(x, 0) for 1 <= k <= M and d_z^k q(x, 0) for 2 <= k <= M.
///
/// No slots exist for the k = 0 terms of A and q or for the k = 1 term of q,
/// so those vanish structurally.
class TaylorPotential {
public:
    TaylorPotential() = default;
    /// All-zero potential of truncation order `order` (>= 2).
    TaylorPotential(Grid grid, int order, bool compact_support = true);

    const Grid& grid() const { return grid_; }
    int order() const { return order_; }
    bool compact_support() const { return compact_support_; }
    void set_compact_support(bool flag) { compact_support_ = flag; }

    /// d_z^k A(x, 0); zero field for k outside [1, M].
    const VectorField& A(int k) const;
    VectorField& A(int k);
    /// d_z^k q(x, 0); zero field for k outside [2, M].
    const ScalarField& q(int k) const;
    ScalarField& q(int k);

    bool has_A(int k) const { return k >= 1 && k <= order_; }
    bool has_q(int k) const { return k >= 2 && k <= order_; }

    /// Every coefficient field is finite.
    bool all_finite() const;
    /// Every coefficient vanishes within `margin` cells of the boundary.
    bool vanishes_near_boundary(int margin = 2) const;
    /// True when all coefficients are exactly zero.
    bool is_zero() const;

    /// Throws std::invalid_argument when an invariant is broken.
    void validate() const;

    /// Same coefficients through A order `a_max` and q order `q_max`.
    bool agrees_with(const TaylorPotential& other, int a_max, int q_max, double tol = 0.0) const;

private:
    Grid grid_;
    int order_ = 0;
    bool compact_support_ = true;
    std::vector<VectorField> a_;  // a_[k - 1]
    std::vector<ScalarField> q_;  // q_[k - 2]
    VectorField zero_vector_;
    ScalarField zero_scalar_;
};

/// Copy of `p` without the coefficients d^k A, k >= m - 1, and d^k q, k >= m:
/// what remains is known before the order-m step of the recovery.
TaylorPotential lower_orders(const TaylorPotential& p, int m);

/// A(x, z) = sum_k d_z^k A(x, 0) z^k / k!
VectorField eval_A(const TaylorPotential& p, const ScalarField& z);
/// q(x, z) = sum_k d_z^k q(x, 0) z^k / k!
ScalarField eval_q(const TaylorPotential& p, const ScalarField& z);
/// d_z A(x, z)
VectorField eval_dA(const TaylorPotential& p, const ScalarField& z);
/// d_z q(x, z)
ScalarField eval_dq(const TaylorPotential& p, const ScalarField& z);

/// A_r(x, z) = int_0^1 d_z A(x, tz) dt, so that A(x, z) = A_r(x, z) z.
VectorField remainder_Ar(const TaylorPotential& p, const ScalarField& z);
/// q_r(x, z) = int_0^1 d_z^2 q(x, tz)(1 - t) dt, so that q(x, z) = q_r(x, z) z^2.
ScalarField remainder_qr(const TaylorPotential& p, const ScalarField& z);

enum class Preset { gaussian_bump, cosine_bump, two_bumps };

/// Named fixture for synthetic potentials.
///
/// Every coefficient named in `scales` ("A1x", "A1y", "A2x", ..., "q2", "q3", ...)
/// is set to amplitude * scale * profile(x). Profiles:
///   gaussian_bump  exp(-|x - c|^2 / sigma^2), forced to zero within 2 cells of the boundary
///   cosine_bump    ((1 + cos(pi r / sigma)) / 2)^2 for r < sigma
///   two_bumps      two cosine bumps of radius sigma centred at c -+ (1.25 sigma, 0)
struct PotentialSpec {
    std::string preset = "gaussian_bump";
    double amplitude = 1.0;
    double sigma = 0.1;
    double center_x = 0.5;
    double center_y = 0.5;
    int order = 3;
    std::map<std::string, double> scales;
};

Preset parse_preset(const std::string& name);
const char* preset_name(Preset p);

/// Real profile of the preset on the grid (before amplitude and scale).
ScalarField preset_profile(const Grid& grid, const PotentialSpec& spec);

/// Throws std::invalid_argument for an unknown preset or coefficient name, and
/// when a compactly supported profile reaches into the boundary margin.
TaylorPotential synth_potential(const Grid& grid, const PotentialSpec& spec);

}  // namespace magsi
