// phases.hpp: dynamical, geometric, Aharonov-Anandan and non-cyclic phases;
// parallel-transport gauge fixing and holonomy of basis vectors.
//
// Conventions: arg() is the principal value in (-pi, pi]; every reported
// geometric phase is reduced to [0, 2pi). Integrals over the grid use the
// endpoint-corrected trapezoid from core.hpp.

#pragma once

#include <cmath>
#include <algorithm>
#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "hgphase/core.hpp"
#include "hgphase/evolution.hpp"
#include "hgphase/frame.hpp"

namespace hgphase {

inline constexpr double kOverlapFloor = 1e-6;
inline constexpr double kCyclicTol = 1e-8;

struct PhaseDecomposition {
    double total_phase{0.0};     // (-pi, pi]
    double dynamical_phase{0.0}; // integral of <H>, not reduced
    double geometric_phase{0.0}; // [0, 2pi)
    complex overlap_prefactor{1.0, 0.0};
    bool cyclic{true};
};

struct Holonomy {
    complex value;
    double phase; // [0, 2pi)
};

namespace detail {

inline void require_overlap(complex overlap, double floor, const char* what) {
    if (std::abs(overlap) < floor) {
        throw OrthogonalEndpointError(std::string(what) + ": endpoint overlap " + std::to_string(std::abs(overlap)) +
                                      " below floor; phase undefined");
    }
}

inline bool is_cyclic(complex overlap) { return std::abs(overlap) >= 1.0 - kCyclicTol; }

// Re <v_n(t)| i d/dt |v_n(t)> with the imaginary residue checked.
inline double connection_at(const BasisFrame& frame, Index n, double t) {
    const StateVector v = frame.vector(n, t);
    const StateVector dv = frame.derivative_vector(n, t);
    const complex c = complex(0.0, 1.0) * inner(v, dv);
    const double scale = std::max(1.0, dv.norm());
    if (std::abs(c.imag()) > 1e-8 * scale) {
        throw NumericalError("derivative coupling has imaginary part " + std::to_string(c.imag()) +
                             "; frame is not normalized along its path");
    }
    return c.real();
}

inline std::vector<double> connection_samples(const BasisFrame& frame, Index n, const TimeGrid& grid) {
    std::vector<double> f(grid.n_points());
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = connection_at(frame, n, grid.time(k));
    return f;
}

// <v_n(0), v_n(T)> exp(i int <v_n, i d/dt v_n> dt)
inline complex gauge_invariant_product(const BasisFrame& frame, Index n, const TimeGrid& grid, complex& prefactor) {
    frame.check_level(n);
    prefactor = inner(frame.vector(n, grid.t_start()), frame.vector(n, grid.t_end()));
    const std::vector<double> f = connection_samples(frame, n, grid);
    return prefactor * std::polar(1.0, integrate(f, grid.dt()));
}

} // namespace detail

// int <v_n, H v_n> dt over the grid
inline double dynamical_phase(const HamiltonianModel& H, const BasisFrame& frame, Index n, const TimeGrid& grid) {
    if (H.dim() != frame.dim()) throw DimensionError("dynamical_phase: Hamiltonian and frame dims differ");
    frame.check_level(n);
    std::vector<double> f(grid.n_points());
    for (std::size_t k = 0; k < f.size(); ++k) {
        const double t = grid.time(k);
        const StateVector v = frame.vector(n, t);
        const complex e = inner(v, H.evaluate(t) * v);
        if (std::abs(e.imag()) > 1e-8) {
            throw HermiticityError("dynamical_phase: <v|H|v> has imaginary part " + std::to_string(e.imag()));
        }
        f[k] = e.real();
    }
    return integrate(f, grid.dt());
}

// beta_n = arg{ <v_n(0), v_n(T)> exp(i int <v_n, i d/dt v_n> dt) }, with the
// dynamical phase reported alongside.
inline PhaseDecomposition geometric_phase_beta(const HamiltonianModel& H, const BasisFrame& frame, Index n,
                                               const TimeGrid& grid, double overlap_floor = kOverlapFloor) {
    if (H.dim() != frame.dim()) throw DimensionError("geometric_phase_beta: Hamiltonian and frame dims differ");
    complex prefactor;
    const complex product = detail::gauge_invariant_product(frame, n, grid, prefactor);
    detail::require_overlap(prefactor, overlap_floor, "geometric_phase_beta");
    PhaseDecomposition out;
    out.geometric_phase = wrap_two_pi(std::arg(product));
    out.dynamical_phase = dynamical_phase(H, frame, n, grid);
    out.total_phase = wrap_pi(out.geometric_phase - out.dynamical_phase);
    out.overlap_prefactor = prefactor;
    out.cyclic = detail::is_cyclic(prefactor);
    return out;
}

namespace detail {

// Fourth-order finite-difference time derivative of a stored series; central
// in the interior, one-sided at the two outermost points on each end.
inline Eigen::MatrixXcd series_derivative(const Eigen::MatrixXcd& psi, double h) {
    const Index n = psi.cols();
    Eigen::MatrixXcd d(psi.rows(), n);
    if (n >= 5) {
        for (Index k = 2; k + 2 < n; ++k) {
            d.col(k) = (psi.col(k - 2) - 8.0 * psi.col(k - 1) + 8.0 * psi.col(k + 1) - psi.col(k + 2)) / (12.0 * h);
        }
        auto forward = [&](Index k) {
            return (-25.0 * psi.col(k) + 48.0 * psi.col(k + 1) - 36.0 * psi.col(k + 2) + 16.0 * psi.col(k + 3) -
                    3.0 * psi.col(k + 4)) / (12.0 * h);
        };
        auto backward = [&](Index k) {
            return (25.0 * psi.col(k) - 48.0 * psi.col(k - 1) + 36.0 * psi.col(k - 2) - 16.0 * psi.col(k - 3) +
                    3.0 * psi.col(k - 4)) / (12.0 * h);
        };
        // second point from each end: shifted stencil, still fourth order
        auto forward1 = [&](Index k) {
            return (-3.0 * psi.col(k - 1) - 10.0 * psi.col(k) + 18.0 * psi.col(k + 1) - 6.0 * psi.col(k + 2) +
                    psi.col(k + 3)) / (12.0 * h);
        };
        auto backward1 = [&](Index k) {
            return (3.0 * psi.col(k + 1) + 10.0 * psi.col(k) - 18.0 * psi.col(k - 1) + 6.0 * psi.col(k - 2) -
                    psi.col(k - 3)) / (12.0 * h);
        };
        d.col(0) = forward(0);
        d.col(1) = forward1(1);
        d.col(n - 2) = backward1(n - 2);
        d.col(n - 1) = backward(n - 1);
    } else if (n >= 3) {
        for (Index k = 1; k + 1 < n; ++k) d.col(k) = (psi.col(k + 1) - psi.col(k - 1)) / (2.0 * h);
        d.col(0) = (-3.0 * psi.col(0) + 4.0 * psi.col(1) - psi.col(2)) / (2.0 * h);
        d.col(n - 1) = (3.0 * psi.col(n - 1) - 4.0 * psi.col(n - 2) + psi.col(n - 3)) / (2.0 * h);
    } else {
        throw GridError("series_derivative: need at least 3 samples");
    }
    return d;
}

} // namespace detail

// Aharonov-Anandan phase of a stored amplitude series over [0, T]:
// beta = arg{ <psi(0), psi(T)> exp(i int <psi, i d/dt psi> dt) }.
inline PhaseDecomposition aa_phase(const AmplitudeSeries& amplitudes, double overlap_floor = kOverlapFloor) {
    const Eigen::MatrixXcd& psi = amplitudes.states;
    if (psi.cols() != static_cast<Index>(amplitudes.grid.n_points())) {
        throw DimensionError("aa_phase: series length does not match its grid");
    }
    for (Index k = 0; k < psi.cols(); ++k) {
        if (std::abs(psi.col(k).squaredNorm() - 1.0) > 1e-6) {
            throw NormalizationError("aa_phase: amplitude not normalized at sample " + std::to_string(k));
        }
    }
    const double h = amplitudes.grid.dt();
    const Eigen::MatrixXcd dpsi = detail::series_derivative(psi, h);
    std::vector<double> f(static_cast<std::size_t>(psi.cols()));
    for (Index k = 0; k < psi.cols(); ++k) {
        f[static_cast<std::size_t>(k)] = (complex(0.0, 1.0) * psi.col(k).dot(dpsi.col(k))).real();
    }
    const complex overlap = psi.col(0).dot(psi.col(psi.cols() - 1));
    detail::require_overlap(overlap, overlap_floor, "aa_phase");

    PhaseDecomposition out;
    out.dynamical_phase = integrate(f, h);
    out.total_phase = std::arg(overlap);
    out.geometric_phase = wrap_two_pi(out.total_phase + out.dynamical_phase);
    out.overlap_prefactor = overlap;
    out.cyclic = detail::is_cyclic(overlap);
    return out;
}

// max over the grid of |<v_n(t), d/dt v_n(t)>|
inline double parallel_residual(const BasisFrame& frame, Index n, const TimeGrid& grid) {
    frame.check_level(n);
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.n_points(); ++k) {
        const double t = grid.time(k);
        worst = std::max(worst, std::abs(inner(frame.vector(n, t), frame.derivative_vector(n, t))));
    }
    return worst;
}

// vbar_n(t) = exp(i int_0^t <v_n, i d/dt' v_n> dt') v_n(t) for every level.
// The accumulated phase is tabulated on the grid; off the grid it is
// continued with a trapezoid step from the nearest node.
inline BasisFrame parallel_transport_fix(const BasisFrame& frame, const TimeGrid& grid) {
    struct Table {
        TimeGrid grid;
        std::vector<std::vector<double>> phase; // per level, per node
    };
    auto table = std::make_shared<Table>(Table{grid, {}});
    for (Index n = 0; n < frame.dim(); ++n) {
        const std::vector<double> f = detail::connection_samples(frame, n, grid);
        table->phase.push_back(integrate_cumulative(f, grid.dt()));
    }

    std::vector<PhaseFunction> alphas;
    for (Index n = 0; n < frame.dim(); ++n) {
        auto rate = [frame, n](double t) {
            const StateVector v = frame.vector(n, t);
            return (complex(0.0, 1.0) * inner(v, frame.derivative_vector(n, t))).real();
        };
        auto value = [table, n, rate](double t) {
            const TimeGrid& g = table->grid;
            const std::vector<double>& a = table->phase[static_cast<std::size_t>(n)];
            const double x = (t - g.t_start()) / g.dt();
            const double kf = std::clamp(std::round(x), 0.0, static_cast<double>(g.n_steps()));
            const auto k = static_cast<std::size_t>(kf);
            const double tk = g.time(k);
            if (t == tk) return a[k];
            return a[k] + 0.5 * (t - tk) * (rate(tk) + rate(t));
        };
        alphas.push_back({value, rate});
    }
    return apply_gauge(frame, GaugeTransform(std::move(alphas)));
}

// Projection of the parallel-transported vector after one cycle onto its start.
inline Holonomy holonomy(const BasisFrame& frame, Index n, const TimeGrid& grid, double overlap_floor = kOverlapFloor) {
    complex prefactor;
    const complex h = detail::gauge_invariant_product(frame, n, grid, prefactor);
    if (std::abs(h) < overlap_floor) throw OrthogonalEndpointError("holonomy: modulus below overlap floor");
    return {h, wrap_two_pi(std::arg(h))};
}

// Gauge-invariant phase over an open interval [t_start, t_end]. Rephasing so
// the endpoint overlap is real and positive leaves exactly this phase in the
// exponential factor. No Hamiltonian is involved, so dynamical_phase is 0.
inline PhaseDecomposition noncyclic_phase(const BasisFrame& frame, Index n, const TimeGrid& grid,
                                          double overlap_floor = kOverlapFloor) {
    complex prefactor;
    const complex product = detail::gauge_invariant_product(frame, n, grid, prefactor);
    detail::require_overlap(prefactor, overlap_floor, "noncyclic_phase");
    PhaseDecomposition out;
    out.geometric_phase = wrap_two_pi(std::arg(product));
    out.dynamical_phase = 0.0;
    out.total_phase = wrap_pi(out.geometric_phase);
    out.overlap_prefactor = prefactor;
    out.cyclic = detail::is_cyclic(prefactor);
    return out;
}

// Remove 2pi jumps: each successive difference is brought into (-pi, pi].
inline std::vector<double> unwrap_phase_series(std::span<const double> phases) {
    if (phases.empty()) throw ConfigError("unwrap_phase_series: empty input");
    std::vector<double> out(phases.begin(), phases.end());
    double offset = 0.0;
    for (std::size_t k = 1; k < out.size(); ++k) {
        const double jump = phases[k] - phases[k - 1];
        double turns = std::round(-jump / kTwoPi);
        if (jump + kTwoPi * turns <= -kPi) turns += 1.0;
        offset += kTwoPi * turns;
        out[k] = phases[k] + offset;
    }
    return out;
}

} // namespace hgphase
