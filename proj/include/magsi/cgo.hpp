#pragma once

/// Isotropic directions, harmonic exponentials and corrected exponentials
/// v = exp(-i x.zeta / h) + w~ that vanish on the far part of the boundary.

#include "magsi/mesh.hpp"

#include <array>
#include <string>
#include <vector>

namespace magsi {

/// zeta in C^2 with zeta . zeta = 0 (no conjugation). The zero vector is
/// admitted so that constant harmonic functions fit the same interface.
class IsotropicDirection {
public:
    IsotropicDirection() = default;
    /// Throws std::invalid_argument when |zeta . zeta| > 1e-14 |zeta|^2.
    IsotropicDirection(complex z1, complex z2);

    /// lambda (1, i) or lambda (1, -i); exactly isotropic for every lambda.
    static IsotropicDirection plus(complex lambda) { return {lambda, lambda * I, true}; }
    static IsotropicDirection minus(complex lambda) { return {lambda, -lambda * I, true}; }

    complex operator[](int k) const { return z_[static_cast<std::size_t>(k)]; }
    const std::array<complex, 2>& components() const { return z_; }
    /// sqrt(|z1|^2 + |z2|^2)
    double norm() const;
    bool is_zero() const { return z_[0] == 0.0 && z_[1] == 0.0; }
    /// zeta . zeta without conjugation.
    complex self_dot() const { return z_[0] * z_[0] + z_[1] * z_[1]; }

private:
    IsotropicDirection(complex z1, complex z2, bool) : z_{z1, z2} {}
    std::array<complex, 2> z_{};
};

enum class IsotropicKind {
    plus,                   ///< lambda (1, i)
    minus,                  ///< lambda (1, -i)
    imaginary_first,        ///< (i, 1)
    imaginary_first_mirror, ///< (i, -1)
    scaled_plus,            ///< h (1, i)
    scaled_minus,           ///< h (1, -i)
};

IsotropicKind parse_isotropic_kind(const std::string& name);
const char* isotropic_kind_name(IsotropicKind kind);

/// Throws std::invalid_argument("zero scale") when param == 0. The step-1
/// kinds ignore `param` apart from that check.
IsotropicDirection make_isotropic(IsotropicKind kind, complex param = 1.0);

enum class ExpMode {
    growing,  ///< exp(zeta . x)
    phase,    ///< exp(-i x . zeta / h)
};

inline constexpr double kMaxExponent = 50.0;

/// Nodal exp(zeta . x - log_shift) or exp(-i x . zeta / h - log_shift).
/// Throws std::overflow_error when the real part of the exponent exceeds 50.
ScalarField harmonic_exponential(const Grid& grid, const IsotropicDirection& zeta, ExpMode mode, double h = 1.0,
                                 double log_shift = 0.0);

/// max over the grid of Re(zeta . x); shift that normalizes exp(zeta . x) to sup 1 on the boundary.
double max_real_exponent(const Grid& grid, const IsotropicDirection& zeta);

/// 6 t^5 - 15 t^4 + 10 t^3 clamped to [0, 1].
double smoothstep5(double t);

/// Boundary nodes with x1 <= -2c.
BoundarySegment far_segment(const Grid& grid, double c);

/// chi(x1) = smoothstep5((-c - x1) / c): 1 for x1 <= -2c, 0 for x1 >= -c.
/// Throws std::invalid_argument when c <= 0 or gamma2_tilde has nodes with x1 > -2c.
BoundaryData build_cutoff(const Grid& grid, double c, const BoundarySegment& gamma2_tilde);

struct CgoSolution {
    IsotropicDirection zeta;
    double h = 0.0;
    double c = 0.0;
    /// exp(-i x . zeta / h)
    ScalarField phase;
    ScalarField v;
    ScalarField w_tilde;
    BoundaryData chi;
    BoundarySegment gamma2_tilde;
};

/// Smallest admissible h: the phase needs about six nodes per oscillation.
double min_resolved_h(const Grid& grid, const IsotropicDirection& zeta);

/// Throws std::invalid_argument when Im zeta_1 < 0 or h is under-resolved.
CgoSolution corrected_exponential(const PoissonSolver& solver, const IsotropicDirection& zeta, double h, double c,
                                  const BoundarySegment& gamma2_tilde);

struct DecayRow {
    double h = 0.0;
    /// sup over {x1 > -c} of |w~ exp(i x . zeta / h)|
    double sup_w = 0.0;
    /// sup over {x1 > -c} of |D w~ exp(i x . zeta / h)|
    double sup_dw = 0.0;
    double predicted_envelope = 0.0;
};

struct DecayReport {
    std::vector<DecayRow> rows;
    /// Least-squares slope of log sup_w against 1/h.
    double slope = 0.0;
    double slope_dw = 0.0;
    /// -c Im zeta_1
    double predicted_slope = 0.0;
    /// slope <= 0.7 predicted_slope (always true when no decay is predicted and slope <= 0).
    bool within_tolerance = false;
};

/// Throws std::invalid_argument for fewer than four or non-decreasing h values.
DecayReport decay_probe(const PoissonSolver& solver, const IsotropicDirection& zeta, const std::vector<double>& h_list,
                        double c, const BoundarySegment& gamma2_tilde);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace magsi
