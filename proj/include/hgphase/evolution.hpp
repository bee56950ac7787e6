// evolution.hpp: effective Hamiltonian in a moving frame, time-ordered
// evolution operator, amplitude reconstruction, and an independent RK4
// Schrodinger integrator used as oracle.

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "hgphase/core.hpp"
#include "hgphase/frame.hpp"

namespace hgphase {

// Matrices <v_n(t)|(H(t) - i d/dt)|v_m(t)> sampled at grid nodes and at step
// midpoints (the propagator uses the midpoints).
struct EffectiveHamiltonianSeries {
    TimeGrid grid;
    std::vector<Eigen::MatrixXcd> at_nodes;     // n_points entries
    std::vector<Eigen::MatrixXcd> at_midpoints; // n_steps entries

    Index dim() const { return at_nodes.empty() ? 0 : at_nodes.front().rows(); }
};

// <m|U(t_k)|n> at each grid node; U(t_start) = 1.
struct EvolutionOperatorSeries {
    TimeGrid grid;
    std::vector<Eigen::MatrixXcd> U;

    const Eigen::MatrixXcd& at(double t) const { return U[grid.index_of(t)]; }
};

// States psi(t_k) stored column-wise.
struct AmplitudeSeries {
    TimeGrid grid;
    Eigen::MatrixXcd states; // dim x n_points

    StateVector at(std::size_t k) const { return states.col(static_cast<Index>(k)); }
    Index dim() const { return states.rows(); }
};

inline Eigen::MatrixXcd effective_hamiltonian_at(const HamiltonianModel& H, const BasisFrame& frame, double t) {
    const Eigen::MatrixXcd v = frame.evaluate(t);
    const Eigen::MatrixXcd dv = frame.derivative(t);
    return v.adjoint() * H.evaluate(t) * v - complex(0.0, 1.0) * (v.adjoint() * dv);
}

inline EffectiveHamiltonianSeries effective_hamiltonian(const HamiltonianModel& H, const BasisFrame& frame,
                                                        const TimeGrid& grid) {
    if (H.dim() != frame.dim()) {
        throw DimensionError("effective_hamiltonian: Hamiltonian dim " + std::to_string(H.dim()) +
                             " != frame dim " + std::to_string(frame.dim()));
    }
    EffectiveHamiltonianSeries s{grid, {}, {}};
    s.at_nodes.reserve(grid.n_points());
    s.at_midpoints.reserve(grid.n_steps());
    for (std::size_t k = 0; k < grid.n_points(); ++k) s.at_nodes.push_back(effective_hamiltonian_at(H, frame, grid.time(k)));
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
        s.at_midpoints.push_back(effective_hamiltonian_at(H, frame, grid.midpoint(k)));
    }
    return s;
}

inline double max_hermiticity_defect(const EffectiveHamiltonianSeries& s) {
    double worst = 0.0;
    for (const auto& m : s.at_nodes) worst = std::max(worst, hermiticity_defect(m));
    for (const auto& m : s.at_midpoints) worst = std::max(worst, hermiticity_defect(m));
    return worst;
}

// exp(-i H dt) for Hermitian H by eigendecomposition. Only the Hermitian part
// of `h` is exponentiated, so the result is unitary to roundoff.
inline Eigen::MatrixXcd unitary_step(const Eigen::MatrixXcd& h, double dt) {
    const Eigen::MatrixXcd herm = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(herm);
    if (eig.info() != Eigen::Success) throw NumericalError("unitary_step: eigendecomposition failed");
    Eigen::VectorXcd phases(herm.rows());
    for (Index j = 0; j < phases.size(); ++j) phases(j) = std::polar(1.0, -eig.eigenvalues()(j) * dt);
    return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

// Time-ordered product of midpoint exponentials; second order in dt.
inline EvolutionOperatorSeries evolve(const EffectiveHamiltonianSeries& series) {
    const TimeGrid& grid = series.grid;
    if (series.at_midpoints.size() != grid.n_steps() || series.at_nodes.size() != grid.n_points()) {
        throw DimensionError("evolve: series length does not match its grid");
    }
    const Index d = series.dim();
    EvolutionOperatorSeries out{grid, {}};
    out.U.reserve(grid.n_points());
    out.U.push_back(Eigen::MatrixXcd::Identity(d, d));
    const double dt = grid.dt();
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
        const Eigen::MatrixXcd& h = series.at_midpoints[k];
        if (!all_finite(h)) throw NumericalError("evolve: non-finite effective Hamiltonian at step " + std::to_string(k));
        out.U.push_back(unitary_step(h, dt) * out.U.back());
    }
    return out;
}

inline double max_unitarity_defect(const EvolutionOperatorSeries& s) {
    double worst = 0.0;
    for (const auto& u : s.U) worst = std::max(worst, identity_defect(u.adjoint() * u));
    return worst;
}

// psi_n(t) = sum_m v_m(t) U_mn(t)
inline StateVector reconstruct_amplitude(const BasisFrame& frame, const EvolutionOperatorSeries& U, Index n, double t) {
    frame.check_level(n);
    const std::size_t k = U.grid.index_of(t);
    if (U.U[k].rows() != frame.dim()) throw DimensionError("reconstruct_amplitude: frame and operator dims differ");
    return frame.evaluate(U.grid.time(k)) * U.U[k].col(n);
}

inline AmplitudeSeries reconstruct_series(const BasisFrame& frame, const EvolutionOperatorSeries& U, Index n) {
    frame.check_level(n);
    AmplitudeSeries out{U.grid, Eigen::MatrixXcd(frame.dim(), static_cast<Index>(U.grid.n_points()))};
    for (std::size_t k = 0; k < U.grid.n_points(); ++k) {
        out.states.col(static_cast<Index>(k)) = frame.evaluate(U.grid.time(k)) * U.U[k].col(n);
    }
    return out;
}

// Propagate an arbitrary initial state: psi(t) = V(t) U(t) V(0)^dagger psi0.
inline AmplitudeSeries propagate_state(const BasisFrame& frame, const EvolutionOperatorSeries& U, const StateVector& psi0) {
    if (psi0.size() != frame.dim()) throw DimensionError("propagate_state: state dim != frame dim");
    const Eigen::VectorXcd coeffs = frame.evaluate(U.grid.t_start()).adjoint() * psi0;
    AmplitudeSeries out{U.grid, Eigen::MatrixXcd(frame.dim(), static_cast<Index>(U.grid.n_points()))};
    for (std::size_t k = 0; k < U.grid.n_points(); ++k) {
        out.states.col(static_cast<Index>(k)) = frame.evaluate(U.grid.time(k)) * (U.U[k] * coeffs);
    }
    return out;
}

// Classical RK4 for i dpsi/dt = H(t) psi. No renormalization: norm drift is
// left visible as a diagnostic.
inline AmplitudeSeries schrodinger_integrate(const HamiltonianModel& H, const StateVector& psi0, const TimeGrid& grid) {
    if (psi0.size() != H.dim()) throw DimensionError("schrodinger_integrate: state dim != Hamiltonian dim");
    if (!is_normalized(psi0, 1e-10)) throw NormalizationError("schrodinger_integrate: initial state is not normalized");

    const complex minus_i(0.0, -1.0);
    auto rhs = [&](double t, const Eigen::VectorXcd& psi) -> Eigen::VectorXcd { return minus_i * (H.evaluate(t) * psi); };

    AmplitudeSeries out{grid, Eigen::MatrixXcd(H.dim(), static_cast<Index>(grid.n_points()))};
    Eigen::VectorXcd psi = psi0;
    out.states.col(0) = psi;
    const double dt = grid.dt();
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
        const double t = grid.time(k);
        const Eigen::VectorXcd k1 = rhs(t, psi);
        const Eigen::VectorXcd k2 = rhs(t + 0.5 * dt, psi + 0.5 * dt * k1);
        const Eigen::VectorXcd k3 = rhs(t + 0.5 * dt, psi + 0.5 * dt * k2);
        const Eigen::VectorXcd k4 = rhs(t + dt, psi + dt * k3);
        psi += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!psi.allFinite()) throw NumericalError("schrodinger_integrate: non-finite state at step " + std::to_string(k));
        out.states.col(static_cast<Index>(k + 1)) = psi;
    }
    return out;
}

// Drop all off-diagonal couplings (adiabatic approximation).
inline EffectiveHamiltonianSeries adiabatic_projection(const EffectiveHamiltonianSeries& series) {
    EffectiveHamiltonianSeries out = series;
    auto keep_diagonal = [](Eigen::MatrixXcd& m) {
        const Eigen::VectorXcd diag = m.diagonal();
        m.setZero();
        m.diagonal() = diag;
    };
    for (auto& m : out.at_nodes) keep_diagonal(m);
    for (auto& m : out.at_midpoints) keep_diagonal(m);
    return out;
}

// max_k max_j |a_jk - b_jk|
inline double max_deviation(const AmplitudeSeries& a, const AmplitudeSeries& b) {
    if (a.states.rows() != b.states.rows() || a.states.cols() != b.states.cols()) {
        throw DimensionError("max_deviation: series shapes differ");
    }
    return max_abs(a.states - b.states);
}

} // namespace hgphase
