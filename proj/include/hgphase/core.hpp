// core.hpp: complex linear-algebra primitives, time grids, phase arithmetic
// and quadrature shared by every hgphase module. Units: hbar = 1.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hgphase/errors.hpp"

namespace hgphase {

using complex = std::complex<double>;
using Index = Eigen::Index;

// Column vector of complex amplitudes.
using StateVector = Eigen::VectorXcd;
// d x d complex matrix; Hermitian by contract wherever this alias is used.
using HermitianMatrix = Eigen::MatrixXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kNormTol = 1e-12;

// ----------------------------------------------------------------------------
// Levels of the two-level model

enum class Level { plus, minus };

inline constexpr double sign(Level l) noexcept { return l == Level::plus ? 1.0 : -1.0; }
inline constexpr Index index_of(Level l) noexcept { return l == Level::plus ? 0 : 1; }

inline std::string_view to_string(Level l) noexcept { return l == Level::plus ? "+" : "-"; }

inline Level parse_level(std::string_view s) {
    if (s == "+" || s == "plus") return Level::plus;
    if (s == "-" || s == "minus") return Level::minus;
    throw ConfigError("unknown level '" + std::string(s) + "' (expected + or -)");
}

// ----------------------------------------------------------------------------
// Inner products and matrix checks

// Sum_k conj(u_k) v_k.
inline complex inner(const StateVector& u, const StateVector& v) {
    if (u.size() != v.size()) {
        throw DimensionError("inner: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                             std::to_string(v.size()) + ")");
    }
    return u.dot(v);
}

inline bool is_normalized(const StateVector& v, double tol = kNormTol) {
    return v.size() >= 1 && std::abs(inner(v, v).real() - 1.0) <= tol;
}

inline double max_abs(const Eigen::MatrixXcd& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// max |M - M^dagger| entrywise.
inline double hermiticity_defect(const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols()) throw DimensionError("hermiticity_defect: matrix is not square");
    return max_abs(m - m.adjoint());
}

inline bool is_hermitian(const Eigen::MatrixXcd& m, double rel_tol = 1e-12) {
    return hermiticity_defect(m) <= rel_tol * std::max(max_abs(m), 1e-300);
}

inline double identity_defect(const Eigen::MatrixXcd& m) {
    return max_abs(m - Eigen::MatrixXcd::Identity(m.rows(), m.cols()));
}

inline bool all_finite(const Eigen::MatrixXcd& m) {
    return m.allFinite();
}

// ----------------------------------------------------------------------------
// Time grid

class TimeGrid {
public:
    TimeGrid(double t_start, double t_end, std::size_t n_steps)
        : t_start_(t_start), t_end_(t_end), n_steps_(n_steps) {
        if (!std::isfinite(t_start) || !std::isfinite(t_end) || !(t_end > t_start)) {
            throw GridError("TimeGrid: require finite t_end > t_start");
        }
        if (n_steps < 1) throw GridError("TimeGrid: n_steps must be >= 1");
    }

    double t_start() const noexcept { return t_start_; }
    double t_end() const noexcept { return t_end_; }
    std::size_t n_steps() const noexcept { return n_steps_; }
    std::size_t n_points() const noexcept { return n_steps_ + 1; }
    double dt() const noexcept { return (t_end_ - t_start_) / static_cast<double>(n_steps_); }
    double span() const noexcept { return t_end_ - t_start_; }

    double time(std::size_t k) const noexcept {
        if (k >= n_steps_) return t_end_;
        return t_start_ + static_cast<double>(k) * dt();
    }
    double midpoint(std::size_t k) const noexcept { return t_start_ + (static_cast<double>(k) + 0.5) * dt(); }

    // Index of grid point t; GridError if t is not a grid point.
    std::size_t index_of(double t) const {
        const double x = (t - t_start_) / dt();
        const double k = std::round(x);
        const double slack = 1e-9 + 8.0 * std::numeric_limits<double>::epsilon() * std::abs(x);
        if (!std::isfinite(x) || k < 0.0 || k > static_cast<double>(n_steps_) || std::abs(x - k) > slack) {
            throw GridError("time " + std::to_string(t) + " is not a grid point");
        }
        return static_cast<std::size_t>(k);
    }

    std::vector<double> points() const {
        std::vector<double> ts(n_points());
        for (std::size_t k = 0; k < ts.size(); ++k) ts[k] = time(k);
        return ts;
    }

private:
    double t_start_;
    double t_end_;
    std::size_t n_steps_;
};

// ----------------------------------------------------------------------------
// Hamiltonians

// Time-parametrized Hermitian operator H(t) on a d-dimensional space.
class HamiltonianModel {
public:
    using Rule = std::function<HermitianMatrix(double)>;

    HamiltonianModel(Index dim, Rule rule) : dim_(dim), rule_(std::move(rule)) {
        if (dim < 1) throw DimensionError("HamiltonianModel: dim must be >= 1");
    }

    Index dim() const noexcept { return dim_; }

    HermitianMatrix evaluate(double t) const {
        HermitianMatrix h = rule_(t);
        if (h.rows() != dim_ || h.cols() != dim_) throw DimensionError("HamiltonianModel: rule returned wrong shape");
        return h;
    }

    static HamiltonianModel zero(Index dim) {
        return {dim, [dim](double) -> HermitianMatrix { return HermitianMatrix::Zero(dim, dim); }};
    }

    static HamiltonianModel constant(const HermitianMatrix& h) {
        if (h.rows() != h.cols()) throw DimensionError("HamiltonianModel::constant: matrix is not square");
        return {h.rows(), [h](double) { return h; }};
    }

private:
    Index dim_;
    Rule rule_;
};

// ----------------------------------------------------------------------------
// Phase arithmetic

// Reduce to [0, 2pi).
inline double wrap_two_pi(double x) {
    double r = std::fmod(x, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

// Reduce to (-pi, pi].
inline double wrap_pi(double x) {
    double r = wrap_two_pi(x);
    if (r > kPi) r -= kTwoPi;
    return r;
}

// Distance between two angles on the circle, in [0, pi].
inline double circular_distance(double a, double b) {
    return std::abs(wrap_pi(a - b));
}

// ----------------------------------------------------------------------------
// Quadrature on a uniform grid
//
// Composite trapezoid with the leading Euler-Maclaurin endpoint correction
// -(h^2/12)[f'(b) - f'(a)], f' from second-order differences. Fourth order
// overall; the correction vanishes for periodic integrands.

namespace detail {

inline double end_slope_left(std::span<const double> f, double h) {
    if (f.size() >= 3) return (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    return 0.0;
}

inline double end_slope_right(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    if (n >= 3) return (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return 0.0;
}

inline double slope_at(std::span<const double> f, std::size_t k, double h) {
    if (f.size() < 3) return 0.0;
    if (k == 0) return end_slope_left(f, h);
    if (k + 1 == f.size()) return end_slope_right(f, h);
    return (f[k + 1] - f[k - 1]) / (2.0 * h);
}

} // namespace detail

inline double integrate(std::span<const double> f, double h) {
    if (f.size() < 2) return 0.0;
    double s = 0.5 * (f.front() + f.back());
    for (std::size_t k = 1; k + 1 < f.size(); ++k) s += f[k];
    s *= h;
    if (f.size() >= 3) s -= h * h / 12.0 * (detail::end_slope_right(f, h) - detail::end_slope_left(f, h));
    return s;
}

// Running integral from the first node; out[k] = integral over [t_0, t_k].
inline std::vector<double> integrate_cumulative(std::span<const double> f, double h) {
    std::vector<double> out(f.size(), 0.0);
    if (f.size() < 2) return out;
    double trap = 0.0;
    const double slope0 = detail::slope_at(f, 0, h);
    for (std::size_t k = 1; k < f.size(); ++k) {
        trap += 0.5 * h * (f[k - 1] + f[k]);
        out[k] = trap - h * h / 12.0 * (detail::slope_at(f, k, h) - slope0);
    }
    return out;
}

} // namespace hgphase
