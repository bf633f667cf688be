#include "magsi/potentials.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace magsi {

namespace {

constexpr int kMargin = 2;

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

bool field_vanishes_near_boundary(const ScalarField& f, int margin) {
    const Grid& g = f.grid();
    for (int iy = 0; iy < g.ny(); ++iy)
        for (int ix = 0; ix < g.nx(); ++ix)
            if (g.cells_from_boundary(ix, iy) <= margin && f(ix, iy) != complex(0.0)) return false;
    return true;
}

bool fields_agree(const ScalarField& a, const ScalarField& b, double tol) {
    return (a.values() - b.values()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace

TaylorPotential::TaylorPotential(Grid grid, int order, bool compact_support)
    : grid_(std::move(grid)), order_(order), compact_support_(compact_support) {
    if (order < 2) throw std::invalid_argument("TaylorPotential: truncation order must be >= 2");
    a_.assign(static_cast<std::size_t>(order), VectorField(grid_));
    q_.assign(static_cast<std::size_t>(order - 1), ScalarField(grid_));
    zero_vector_ = VectorField(grid_);
    zero_scalar_ = ScalarField(grid_);
}

const VectorField& TaylorPotential::A(int k) const { return has_A(k) ? a_[static_cast<std::size_t>(k - 1)] : zero_vector_; }

VectorField& TaylorPotential::A(int k) {
    if (!has_A(k)) throw std::out_of_range("TaylorPotential::A: order outside [1, M]");
    return a_[static_cast<std::size_t>(k - 1)];
}

const ScalarField& TaylorPotential::q(int k) const { return has_q(k) ? q_[static_cast<std::size_t>(k - 2)] : zero_scalar_; }

ScalarField& TaylorPotential::q(int k) {
    if (!has_q(k)) throw std::out_of_range("TaylorPotential::q: order outside [2, M]");
    return q_[static_cast<std::size_t>(k - 2)];
}

bool TaylorPotential::all_finite() const {
    for (const auto& a : a_)
        if (!a.x.all_finite() || !a.y.all_finite()) return false;
    for (const auto& q : q_)
        if (!q.all_finite()) return false;
    return true;
}

bool TaylorPotential::vanishes_near_boundary(int margin) const {
    for (const auto& a : a_)
        if (!field_vanishes_near_boundary(a.x, margin) || !field_vanishes_near_boundary(a.y, margin)) return false;
    for (const auto& q : q_)
        if (!field_vanishes_near_boundary(q, margin)) return false;
    return true;
}

bool TaylorPotential::is_zero() const {
    for (const auto& a : a_)
        if (a.max_abs() != 0.0) return false;
    for (const auto& q : q_)
        if (q.max_abs() != 0.0) return false;
    return true;
}

void TaylorPotential::validate() const {
    if (!grid_.valid()) throw std::invalid_argument("TaylorPotential: no grid");
    if (!all_finite()) throw std::invalid_argument("TaylorPotential: non-finite coefficient");
    if (compact_support_ && !vanishes_near_boundary(kMargin))
        throw std::invalid_argument("TaylorPotential: compactly supported potential touches the boundary margin");
}

bool TaylorPotential::agrees_with(const TaylorPotential& other, int a_max, int q_max, double tol) const {
    require_same_grid(grid_, other.grid_, "TaylorPotential::agrees_with");
    for (int k = 1; k <= a_max; ++k)
        if (!fields_agree(A(k).x, other.A(k).x, tol) || !fields_agree(A(k).y, other.A(k).y, tol)) return false;
    for (int k = 2; k <= q_max; ++k)
        if (!fields_agree(q(k), other.q(k), tol)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Evaluation. Every series is summed with explicit powers z^j / j! per node.

namespace {

// sum_{k=k0}^{M} c_k(x) z^{k - shift} / denom(k)
template <class Coeff, class Denom>
CVector series(const Grid& g, int k0, int M, const ScalarField& z, Coeff coeff, Denom denom, int shift) {
    const Eigen::Index n = static_cast<Eigen::Index>(g.node_count());
    CVector out = CVector::Zero(n);
    for (int k = k0; k <= M; ++k) {
        const CVector& c = coeff(k);
        if (c.cwiseAbs().maxCoeff() == 0.0) continue;
        const int power = k - shift;
        const double d = denom(k);
        for (Eigen::Index i = 0; i < n; ++i) {
            complex zp = 1.0;
            for (int j = 0; j < power; ++j) zp *= z.values()[i];
            out[i] += c[i] * zp / d;
        }
    }
    return out;
}

}  // namespace

VectorField eval_A(const TaylorPotential& p, const ScalarField& z) {
    require_same_grid(p.grid(), z.grid(), "eval_A");
    const Grid& g = p.grid();
    auto fact = [](int k) { return factorial(k); };
    return VectorField(
        ScalarField(g, series(g, 1, p.order(), z, [&](int k) -> const CVector& { return p.A(k).x.values(); }, fact, 0)),
        ScalarField(g, series(g, 1, p.order(), z, [&](int k) -> const CVector& { return p.A(k).y.values(); }, fact, 0)));
}

ScalarField eval_q(const TaylorPotential& p, const ScalarField& z) {
    require_same_grid(p.grid(), z.grid(), "eval_q");
    auto fact = [](int k) { return factorial(k); };
    return ScalarField(p.grid(), series(p.grid(), 2, p.order(), z, [&](int k) -> const CVector& { return p.q(k).values(); },
                                        fact, 0));
}

VectorField eval_dA(const TaylorPotential& p, const ScalarField& z) {
    require_same_grid(p.grid(), z.grid(), "eval_dA");
    const Grid& g = p.grid();
    auto fact = [](int k) { return factorial(k - 1); };
    return VectorField(
        ScalarField(g, series(g, 1, p.order(), z, [&](int k) -> const CVector& { return p.A(k).x.values(); }, fact, 1)),
        ScalarField(g, series(g, 1, p.order(), z, [&](int k) -> const CVector& { return p.A(k).y.values(); }, fact, 1)));
}

ScalarField eval_dq(const TaylorPotential& p, const ScalarField& z) {
    require_same_grid(p.grid(), z.grid(), "eval_dq");
    auto fact = [](int k) { return factorial(k - 1); };
    return ScalarField(p.grid(), series(p.grid(), 2, p.order(), z, [&](int k) -> const CVector& { return p.q(k).values(); },
                                        fact, 1));
}

VectorField remainder_Ar(const TaylorPotential& p, const ScalarField& z) {
    require_same_grid(p.grid(), z.grid(), "remainder_Ar");
    const Grid& g = p.grid();
    auto fact = [](int k) { return factorial(k); };
    return VectorField(
        ScalarField(g, series(g, 1, p.order(), z, [&](int k) -> const CVector& { return p.A(k).x.values(); }, fact, 1)),
        ScalarField(g, series(g, 1, p.order(), z, [&](int k) -> const CVector& { return p.A(k).y.values(); }, fact, 1)));
}

ScalarField remainder_qr(const TaylorPotential& p, const ScalarField& z) {
    require_same_grid(p.grid(), z.grid(), "remainder_qr");
    auto fact = [](int k) { return factorial(k); };
    return ScalarField(p.grid(), series(p.grid(), 2, p.order(), z, [&](int k) -> const CVector& { return p.q(k).values(); },
                                        fact, 2));
}

// ---------------------------------------------------------------------------
// Presets

Preset parse_preset(const std::string& name) {
    if (name == "gaussian_bump") return Preset::gaussian_bump;
    if (name == "cosine_bump") return Preset::cosine_bump;
    if (name == "two_bumps") return Preset::two_bumps;
    throw std::invalid_argument("unknown preset '" + name + "'");
}

const char* preset_name(Preset p) {
    switch (p) {
        case Preset::gaussian_bump: return "gaussian_bump";
        case Preset::cosine_bump: return "cosine_bump";
        case Preset::two_bumps: return "two_bumps";
    }
    return "?";
}

namespace {

double cosine_profile(double r, double radius) {
    if (r >= radius) return 0.0;
    const double c = 0.5 * (1.0 + std::cos(std::numbers::pi * r / radius));
    return c * c;
}

}  // namespace

ScalarField preset_profile(const Grid& grid, const PotentialSpec& spec) {
    const Preset preset = parse_preset(spec.preset);
    if (!(spec.sigma > 0.0)) throw std::invalid_argument("preset sigma must be positive");
    const double cx = spec.center_x, cy = spec.center_y, s = spec.sigma;
    ScalarField f(grid);
    for (int iy = 0; iy < grid.ny(); ++iy)
        for (int ix = 0; ix < grid.nx(); ++ix) {
            const double dx = grid.x(ix) - cx, dy = grid.y(iy) - cy;
            double v = 0.0;
            switch (preset) {
                case Preset::gaussian_bump: v = std::exp(-(dx * dx + dy * dy) / (s * s)); break;
                case Preset::cosine_bump: v = cosine_profile(std::hypot(dx, dy), s); break;
                case Preset::two_bumps:
                    v = cosine_profile(std::hypot(dx + 1.25 * s, dy), s) + cosine_profile(std::hypot(dx - 1.25 * s, dy), s);
                    break;
            }
            f(ix, iy) = v;
        }

    double truncated = 0.0;
    for (int iy = 0; iy < grid.ny(); ++iy)
        for (int ix = 0; ix < grid.nx(); ++ix)
            if (grid.cells_from_boundary(ix, iy) <= kMargin) {
                truncated = std::max(truncated, std::abs(f(ix, iy)));
                f(ix, iy) = 0.0;
            }
    const double limit = preset == Preset::gaussian_bump ? 1e-6 : 0.0;
    if (truncated > limit)
        throw std::invalid_argument(std::string(preset_name(preset)) + " profile reaches the boundary margin (value " +
                                    std::to_string(truncated) + ")");
    return f;
}

TaylorPotential synth_potential(const Grid& grid, const PotentialSpec& spec) {
    TaylorPotential p(grid, spec.order, true);
    const ScalarField profile = preset_profile(grid, spec);
    for (const auto& [name, scale] : spec.scales) {
        if (name.size() < 2) throw std::invalid_argument("unknown coefficient '" + name + "'");
        const char kind = name[0];
        std::size_t pos = 1;
        int k = 0;
        while (pos < name.size() && std::isdigit(static_cast<unsigned char>(name[pos]))) k = 10 * k + (name[pos++] - '0');
        const std::string rest = name.substr(pos);
        const ScalarField field = profile * complex(spec.amplitude * scale);
        if (kind == 'A' && (rest == "x" || rest == "y") && p.has_A(k)) {
            (rest == "x" ? p.A(k).x : p.A(k).y) = field;
        } else if (kind == 'q' && rest.empty() && p.has_q(k)) {
            p.q(k) = field;
        } else {
            throw std::invalid_argument("unknown coefficient '" + name + "' for order " + std::to_string(spec.order));
        }
    }
    p.validate();
    return p;
}

TaylorPotential lower_orders(const TaylorPotential& p, int m) {
    TaylorPotential out = p;
    for (int k = std::max(1, m - 1); k <= p.order(); ++k) out.A(k) = VectorField(p.grid());
    for (int k = std::max(2, m); k <= p.order(); ++k) out.q(k) = ScalarField(p.grid());
    return out;
}

}  // namespace magsi
