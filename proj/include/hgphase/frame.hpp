// frame.hpp: time-dependent orthonormal basis frames and the hidden gauge
// transformation v_n(t) -> exp(i alpha_n(t)) v_n(t).

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hgphase/core.hpp"

namespace hgphase {

enum class DerivativeMode { analytic, central_difference };

// Orthonormal set {v_n(t)}; column n of evaluate(t) is v_n(t).
//
// Immutable. Copies share the underlying rules.
class BasisFrame {
public:
    using Rule = std::function<Eigen::MatrixXcd(double)>;

    static BasisFrame analytic(Index dim, Rule value, Rule derivative) {
        return BasisFrame(dim, std::move(value), std::move(derivative), DerivativeMode::analytic, 0.0);
    }

    // derivative(t) = [evaluate(t+h) - evaluate(t-h)] / (2h)
    static BasisFrame central_difference(Index dim, Rule value, double h) {
        if (!(h > 0.0) || !std::isfinite(h)) throw NumericalError("BasisFrame: finite-difference step must be > 0");
        auto shared = std::make_shared<Rule>(std::move(value));
        Rule deriv = [shared, h](double t) -> Eigen::MatrixXcd {
            return ((*shared)(t + h) - (*shared)(t - h)) / (2.0 * h);
        };
        return BasisFrame(dim, [shared](double t) { return (*shared)(t); }, std::move(deriv),
                          DerivativeMode::central_difference, h);
    }

    // Time-independent frame; columns of `basis` must be orthonormal.
    static BasisFrame constant(const Eigen::MatrixXcd& basis) {
        if (basis.rows() != basis.cols()) throw DimensionError("BasisFrame::constant: basis must be square");
        const Index d = basis.rows();
        return analytic(d, [basis](double) { return basis; },
                        [d](double) -> Eigen::MatrixXcd { return Eigen::MatrixXcd::Zero(d, d); });
    }

    // New rules carrying the derivative mode and step of `source`.
    static BasisFrame derived(const BasisFrame& source, Rule value, Rule derivative) {
        return BasisFrame(source.dim_, std::move(value), std::move(derivative), source.mode_, source.step_);
    }

    // Rebuild this frame's values with a central-difference derivative of step h.
    BasisFrame with_central_difference(double h) const {
        return central_difference(dim_, value_, h);
    }

    Index dim() const noexcept { return dim_; }
    DerivativeMode mode() const noexcept { return mode_; }
    double step() const noexcept { return step_; }

    Eigen::MatrixXcd evaluate(double t) const { return checked(value_(t), "evaluate"); }
    Eigen::MatrixXcd derivative(double t) const { return checked(derivative_(t), "derivative"); }

    StateVector vector(Index n, double t) const { return evaluate(t).col(check_level(n)); }
    StateVector derivative_vector(Index n, double t) const { return derivative(t).col(check_level(n)); }

    Index check_level(Index n) const {
        if (n < 0 || n >= dim_) {
            throw DimensionError("level index " + std::to_string(n) + " out of range for dim " + std::to_string(dim_));
        }
        return n;
    }

private:
    BasisFrame(Index dim, Rule value, Rule derivative, DerivativeMode mode, double step)
        : dim_(dim), value_(std::move(value)), derivative_(std::move(derivative)), mode_(mode), step_(step) {
        if (dim < 1) throw DimensionError("BasisFrame: dim must be >= 1");
    }

    Eigen::MatrixXcd checked(Eigen::MatrixXcd m, const char* what) const {
        if (m.rows() != dim_ || m.cols() != dim_) {
            throw DimensionError(std::string("BasisFrame::") + what + ": rule returned wrong shape");
        }
        return m;
    }

    Index dim_;
    Rule value_;
    Rule derivative_;
    DerivativeMode mode_;
    double step_;
};

// Default finite-difference step for a frame sampled on `grid`.
inline double default_fd_step(const TimeGrid& grid) { return grid.dt() / 10.0; }

// max |V(t)^dagger V(t) - 1|
inline double gram_defect(const BasisFrame& frame, double t) {
    const Eigen::MatrixXcd v = frame.evaluate(t);
    return identity_defect(v.adjoint() * v);
}

inline double max_gram_defect(const BasisFrame& frame, const TimeGrid& grid) {
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.n_points(); ++k) worst = std::max(worst, gram_defect(frame, grid.time(k)));
    return worst;
}

// ----------------------------------------------------------------------------
// Gauge phases

// A real phase function alpha(t) with its time derivative.
struct PhaseFunction {
    std::function<double(double)> value;
    std::function<double(double)> derivative;

    static PhaseFunction constant(double c) {
        return {[c](double) { return c; }, [](double) { return 0.0; }};
    }
};

// alpha(t) = a0 + sum_k [a_k cos(2 pi k t / t_ref) + b_k sin(2 pi k t / t_ref)]
struct FourierPhase {
    double a0{0.0};
    std::vector<double> cos_coeffs;
    std::vector<double> sin_coeffs;
    double t_ref{kTwoPi};

    double value(double t) const {
        double s = a0;
        for (std::size_t k = 0; k < cos_coeffs.size(); ++k) {
            const double w = kTwoPi * static_cast<double>(k + 1) / t_ref;
            s += cos_coeffs[k] * std::cos(w * t) + sin_coeffs[k] * std::sin(w * t);
        }
        return s;
    }

    double derivative(double t) const {
        double s = 0.0;
        for (std::size_t k = 0; k < cos_coeffs.size(); ++k) {
            const double w = kTwoPi * static_cast<double>(k + 1) / t_ref;
            s += w * (-cos_coeffs[k] * std::sin(w * t) + sin_coeffs[k] * std::cos(w * t));
        }
        return s;
    }

    // Triangle-inequality bound on max |alpha(t)|.
    double amplitude_bound() const {
        double s = std::abs(a0);
        for (std::size_t k = 0; k < cos_coeffs.size(); ++k) s += std::abs(cos_coeffs[k]) + std::abs(sin_coeffs[k]);
        return s;
    }

    bool operator==(const FourierPhase&) const = default;
};

// Per-level phase functions alpha_n(t).
class GaugeTransform {
public:
    explicit GaugeTransform(std::vector<PhaseFunction> alphas) : alphas_(std::move(alphas)) {
        if (alphas_.empty()) throw DimensionError("GaugeTransform: need at least one phase function");
    }

    static GaugeTransform identity(Index dim) {
        return GaugeTransform(std::vector<PhaseFunction>(static_cast<std::size_t>(dim), PhaseFunction::constant(0.0)));
    }

    static GaugeTransform constant(Index dim, double c) {
        return GaugeTransform(std::vector<PhaseFunction>(static_cast<std::size_t>(dim), PhaseFunction::constant(c)));
    }

    static GaugeTransform from_fourier(const std::vector<FourierPhase>& series) {
        std::vector<PhaseFunction> alphas;
        alphas.reserve(series.size());
        for (const FourierPhase& f : series) {
            alphas.push_back({[f](double t) { return f.value(t); }, [f](double t) { return f.derivative(t); }});
        }
        return GaugeTransform(std::move(alphas));
    }

    // alpha -> -alpha
    GaugeTransform inverse() const {
        std::vector<PhaseFunction> neg;
        neg.reserve(alphas_.size());
        for (const PhaseFunction& a : alphas_) {
            neg.push_back({[a](double t) { return -a.value(t); }, [a](double t) { return -a.derivative(t); }});
        }
        return GaugeTransform(std::move(neg));
    }

    Index dim() const noexcept { return static_cast<Index>(alphas_.size()); }
    const PhaseFunction& operator[](Index n) const { return alphas_.at(static_cast<std::size_t>(n)); }

    Eigen::VectorXd values(double t) const {
        Eigen::VectorXd v(dim());
        for (Index n = 0; n < dim(); ++n) v(n) = alphas_[static_cast<std::size_t>(n)].value(t);
        return v;
    }

    Eigen::VectorXd derivatives(double t) const {
        Eigen::VectorXd v(dim());
        for (Index n = 0; n < dim(); ++n) v(n) = alphas_[static_cast<std::size_t>(n)].derivative(t);
        return v;
    }

    // Largest |alpha(t+dt) - 2 alpha(t) + alpha(t-dt)| / dt^2 over the grid
    // interior. NumericalError if any phase is non-finite on the grid.
    double max_second_difference(const TimeGrid& grid) const {
        const double h = grid.dt();
        double worst = 0.0;
        for (std::size_t k = 0; k < grid.n_points(); ++k) {
            const Eigen::VectorXd a = values(grid.time(k));
            const Eigen::VectorXd da = derivatives(grid.time(k));
            if (!a.allFinite() || !da.allFinite()) throw NumericalError("GaugeTransform: non-finite phase on grid");
            if (k == 0 || k + 1 == grid.n_points()) continue;
            const Eigen::VectorXd curv = (values(grid.time(k + 1)) - 2.0 * a + values(grid.time(k - 1))) / (h * h);
            worst = std::max(worst, curv.cwiseAbs().maxCoeff());
        }
        return worst;
    }

private:
    std::vector<PhaseFunction> alphas_;
};

// v_n(t) -> exp(i alpha_n(t)) v_n(t); the derivative picks up
// i alpha_n'(t) exp(i alpha_n(t)) v_n(t).
inline BasisFrame apply_gauge(const BasisFrame& frame, const GaugeTransform& g) {
    if (g.dim() != frame.dim()) {
        throw DimensionError("apply_gauge: gauge has " + std::to_string(g.dim()) + " phases, frame dim is " +
                             std::to_string(frame.dim()));
    }
    auto phases = [g](double t) -> Eigen::VectorXcd {
        const Eigen::VectorXd a = g.values(t);
        Eigen::VectorXcd p(a.size());
        for (Index n = 0; n < a.size(); ++n) p(n) = std::polar(1.0, a(n));
        return p;
    };
    BasisFrame::Rule value = [frame, phases](double t) -> Eigen::MatrixXcd {
        return frame.evaluate(t) * phases(t).asDiagonal();
    };
    BasisFrame::Rule deriv = [frame, g, phases](double t) -> Eigen::MatrixXcd {
        const Eigen::VectorXcd i_rate = complex(0.0, 1.0) * g.derivatives(t).cast<complex>();
        const Eigen::MatrixXcd d = frame.derivative(t) + frame.evaluate(t) * i_rate.asDiagonal();
        return d * phases(t).asDiagonal();
    };
    return BasisFrame::derived(frame, std::move(value), std::move(deriv));
}

// Deterministic smooth random gauge coefficients, |coef| <= amplitude_bound.
inline std::vector<FourierPhase> gauge_fuzz_coefficients(std::uint64_t seed, Index dim, int n_modes,
                                                         double amplitude_bound, double t_ref = kTwoPi) {
    if (n_modes < 1) throw ConfigError("gauge_fuzz_sample: n_modes must be >= 1");
    if (!(amplitude_bound >= 0.0) || !std::isfinite(amplitude_bound)) {
        throw ConfigError("gauge_fuzz_sample: amplitude_bound must be finite and >= 0");
    }
    if (!(t_ref > 0.0)) throw ConfigError("gauge_fuzz_sample: t_ref must be > 0");
    if (dim < 1) throw DimensionError("gauge_fuzz_sample: dim must be >= 1");

    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(dim), static_cast<std::uint32_t>(n_modes)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    auto draw = [&] { return amplitude_bound * unit(rng); };

    std::vector<FourierPhase> out(static_cast<std::size_t>(dim));
    for (FourierPhase& f : out) {
        f.t_ref = t_ref;
        f.a0 = draw();
        f.cos_coeffs.resize(static_cast<std::size_t>(n_modes));
        f.sin_coeffs.resize(static_cast<std::size_t>(n_modes));
        for (int k = 0; k < n_modes; ++k) {
            f.cos_coeffs[static_cast<std::size_t>(k)] = draw();
            f.sin_coeffs[static_cast<std::size_t>(k)] = draw();
        }
    }
    return out;
}

inline GaugeTransform gauge_fuzz_sample(std::uint64_t seed, Index dim, int n_modes, double amplitude_bound,
                                        double t_ref = kTwoPi) {
    return GaugeTransform::from_fourier(gauge_fuzz_coefficients(seed, dim, n_modes, amplitude_bound, t_ref));
}

} // namespace hgphase
