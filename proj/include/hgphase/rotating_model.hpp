// rotating_model.hpp: spin-1/2 in a magnetic field of constant magnitude B
// rotating about z at angular velocity omega0 with fixed polar angle theta.
//
// H(t) = -(B/2) [sigma_x sin(theta) cos(omega0 t) + sigma_y sin(theta) sin(omega0 t)
//               + sigma_z cos(theta)]
//
// The tilted frame w_(+/-)(t) built from theta - theta0 diagonalizes the
// effective Hamiltonian H - i d/dt exactly, which gives closed forms for the
// amplitudes and phases at any rotation speed. Units: hbar = 1.

#pragma once

#include <cmath>
#include <utility>

#include "hgphase/core.hpp"
#include "hgphase/frame.hpp"

namespace hgphase {

struct RotatingFieldParams {
    double B{1.0};
    double theta{kPi / 2};
    double omega0{1.0};
    double hbar{1.0}; // display only

    void validate() const {
        if (!std::isfinite(B) || B < 0.0) throw ConfigError("RotatingFieldParams: B must be finite and >= 0");
        if (!std::isfinite(theta) || theta < 0.0 || theta > kPi) {
            throw ConfigError("RotatingFieldParams: theta must lie in [0, pi]");
        }
        if (!std::isfinite(omega0)) throw ConfigError("RotatingFieldParams: omega0 must be finite");
    }

    // Level crossing: the instantaneous levels meet when the field vanishes.
    bool degenerate() const noexcept { return B == 0.0; }

    double period() const {
        if (omega0 == 0.0) throw DegenerateParameterError("period undefined for omega0 = 0");
        return kTwoPi / std::abs(omega0);
    }
};

inline double theta0(const RotatingFieldParams& p) {
    const double y = p.omega0 * std::sin(p.theta);
    const double x = p.B + p.omega0 * std::cos(p.theta);
    if (p.B == 0.0 && p.omega0 == 0.0) throw DegenerateParameterError("theta0 undefined for B = 0 and omega0 = 0");
    return std::atan2(y, x);
}

// theta - theta0
inline double tilt(const RotatingFieldParams& p) { return p.theta - theta0(p); }

namespace pauli {

inline Eigen::Matrix2cd x() { return (Eigen::Matrix2cd() << 0.0, 1.0, 1.0, 0.0).finished(); }
inline Eigen::Matrix2cd y() {
    return (Eigen::Matrix2cd() << 0.0, complex(0.0, -1.0), complex(0.0, 1.0), 0.0).finished();
}
inline Eigen::Matrix2cd z() { return (Eigen::Matrix2cd() << 1.0, 0.0, 0.0, -1.0).finished(); }

} // namespace pauli

inline HermitianMatrix hamiltonian(const RotatingFieldParams& p, double t) {
    const double phi = p.omega0 * t;
    const double st = std::sin(p.theta);
    Eigen::Matrix2cd h = pauli::x() * (st * std::cos(phi)) + pauli::y() * (st * std::sin(phi)) +
                         pauli::z() * std::cos(p.theta);
    return -0.5 * p.B * h;
}

inline HamiltonianModel rotating_hamiltonian(const RotatingFieldParams& p) {
    return {2, [p](double t) { return hamiltonian(p, t); }};
}

namespace detail {

// Columns w_+, w_- for tilt angle `tilt` and azimuth phi.
inline Eigen::Matrix2cd tilted_basis(double tilt, double omega0, double t) {
    const complex e = std::polar(1.0, -omega0 * t);
    const double c = std::cos(0.5 * tilt);
    const double s = std::sin(0.5 * tilt);
    Eigen::Matrix2cd w;
    w << e * c, e * s,
         s,     -c;
    return w;
}

inline Eigen::Matrix2cd tilted_basis_derivative(double tilt, double omega0, double t) {
    const complex de = complex(0.0, -omega0) * std::polar(1.0, -omega0 * t);
    const double c = std::cos(0.5 * tilt);
    const double s = std::sin(0.5 * tilt);
    Eigen::Matrix2cd w;
    w << de * c, de * s,
         0.0,    0.0;
    return w;
}

inline BasisFrame tilted_frame(double tilt, double omega0) {
    return BasisFrame::analytic(
        2, [=](double t) -> Eigen::MatrixXcd { return tilted_basis(tilt, omega0, t); },
        [=](double t) -> Eigen::MatrixXcd { return tilted_basis_derivative(tilt, omega0, t); });
}

} // namespace detail

// (w_+(t), w_-(t))
inline std::pair<StateVector, StateVector> basis_w(const RotatingFieldParams& p, double t) {
    const Eigen::Matrix2cd w = detail::tilted_basis(tilt(p), p.omega0, t);
    return {w.col(0), w.col(1)};
}

inline std::pair<StateVector, StateVector> basis_w_derivative(const RotatingFieldParams& p, double t) {
    const Eigen::Matrix2cd w = detail::tilted_basis_derivative(tilt(p), p.omega0, t);
    return {w.col(0), w.col(1)};
}

// The exactly diagonalizing frame {w_+, w_-} with analytic derivative.
inline BasisFrame rotating_frame(const RotatingFieldParams& p) {
    return detail::tilted_frame(tilt(p), p.omega0);
}

// Instantaneous eigenvectors of H(t) (tilt = theta, i.e. theta0 ignored).
inline BasisFrame instantaneous_eigenframe(const RotatingFieldParams& p) {
    return detail::tilted_frame(p.theta, p.omega0);
}

// Static computational basis.
inline BasisFrame lab_frame(Index dim = 2) {
    return BasisFrame::constant(Eigen::MatrixXcd::Identity(dim, dim));
}

// Time-independent diagonal elements <w|H|w> and <w|i d/dt|w> for both levels.
struct DiagonalCouplings {
    double energy_plus;   // <w+|H|w+>
    double energy_minus;  // <w-|H|w->
    double connection_plus;  // <w+|i d/dt|w+>
    double connection_minus; // <w-|i d/dt|w->
};

inline DiagonalCouplings diagonal_couplings(const RotatingFieldParams& p) {
    const double th0 = theta0(p);
    const double cv = std::cos(p.theta - th0);
    return {-0.5 * p.B * std::cos(th0), 0.5 * p.B * std::cos(th0), 0.5 * p.omega0 * (1.0 + cv),
            0.5 * p.omega0 * (1.0 - cv)};
}

struct Energies {
    double plus;
    double minus;

    double operator[](Level l) const noexcept { return l == Level::plus ? plus : minus; }
};

// E_(+/-) = <w|(H - i d/dt)|w>
inline Energies energies(const RotatingFieldParams& p) {
    const DiagonalCouplings c = diagonal_couplings(p);
    return {c.energy_plus - c.connection_plus, c.energy_minus - c.connection_minus};
}

// <w_-(t)| (H - i d/dt) |w_+(t)>, evaluated numerically from the matrices.
inline complex off_diagonal_coupling(const RotatingFieldParams& p, double t) {
    const auto [wp, wm] = basis_w(p, t);
    const StateVector dwp = basis_w_derivative(p, t).first;
    const StateVector hw = hamiltonian(p, t) * wp;
    return inner(wm, hw) - complex(0.0, 1.0) * inner(wm, dwp);
}

// psi_l(t) = w_l(t) exp(-i E_l t)
inline StateVector exact_amplitude(const RotatingFieldParams& p, Level level, double t) {
    const auto [wp, wm] = basis_w(p, t);
    const double e = energies(p)[level];
    return (level == Level::plus ? wp : wm) * std::polar(1.0, -e * t);
}

// pi (1 +/- cos theta) in [0, 2pi)
inline double berry_phase_adiabatic(double theta, Level level) {
    return wrap_two_pi(kPi * (1.0 + sign(level) * std::cos(theta)));
}

// Exact one-cycle geometric phase without reduction mod 2pi; continuous in
// omega0 on each side of zero. Negative omega0 reverses the circuit.
inline double geometric_phase_exact_unwrapped(const RotatingFieldParams& p, Level level) {
    const double direction = p.omega0 < 0.0 ? -1.0 : 1.0;
    return direction * kPi * (1.0 + sign(level) * std::cos(tilt(p)));
}

inline double geometric_phase_exact(const RotatingFieldParams& p, Level level) {
    return wrap_two_pi(geometric_phase_exact_unwrapped(p, level));
}

} // namespace hgphase
