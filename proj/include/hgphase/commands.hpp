// commands.hpp: library side of the hgphase CLI: eta sweeps with CSV
// output, the oracle validation ladder, gauge-fuzz campaigns and single-point
// phase evaluation. Each command returns a RunReport.

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "hgphase/core.hpp"
#include "hgphase/evolution.hpp"
#include "hgphase/frame.hpp"
#include "hgphase/phases.hpp"
#include "hgphase/report.hpp"
#include "hgphase/rotating_model.hpp"

namespace hgphase {

// Tolerances shared by the commands and the test suites.
namespace tol {
inline constexpr double beta_vs_closed_form = 1e-6;
inline constexpr double aa_vs_beta = 1e-5;
inline constexpr double oracle = 1e-6;
inline constexpr double off_diagonal = 1e-10;
inline constexpr double unitarity = 1e-8;
inline constexpr double hermiticity = 1e-8;
inline constexpr double gauge = 1e-8;
inline constexpr double convergence_ratio = 3.5;
inline constexpr double roundoff_floor = 1e-10;
} // namespace tol

// Largest AA grid. Below eta ~ 1e-3 the dynamical phase per period needs
// more samples than this and the aa_phase column loses digits.
inline constexpr std::size_t kMaxAaSteps = std::size_t{1} << 20;

namespace detail {

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

// Run body(i) for i in [0, n) on up to `threads` workers; first exception wins.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

inline AmplitudeSeries exact_series(const RotatingFieldParams& p, Level level, const TimeGrid& grid) {
    AmplitudeSeries s{grid, Eigen::MatrixXcd(2, static_cast<Index>(grid.n_points()))};
    for (std::size_t k = 0; k < grid.n_points(); ++k) {
        s.states.col(static_cast<Index>(k)) = exact_amplitude(p, level, grid.time(k));
    }
    return s;
}

} // namespace detail

// Steps needed to resolve the exact amplitude of `level` over one period for
// the AA phase: at most 0.02 rad of phase advance per step.
inline std::size_t aa_steps(const RotatingFieldParams& p, Level level, std::size_t minimum) {
    const double advance = (std::abs(energies(p)[level]) + std::abs(p.omega0)) * p.period();
    const double needed = std::ceil(advance / 0.02);
    return std::clamp<std::size_t>(static_cast<std::size_t>(needed), std::max<std::size_t>(minimum, 16), kMaxAaSteps);
}

// AA phase of the exact amplitude over one period.
inline PhaseDecomposition exact_aa_phase(const RotatingFieldParams& p, Level level, std::size_t min_steps) {
    const TimeGrid grid(0.0, p.period(), aa_steps(p, level, min_steps));
    return aa_phase(detail::exact_series(p, level, grid));
}

// ----------------------------------------------------------------------------
// sweep

enum class Spacing { log, linear };

struct SweepConfig {
    double theta{kPi / 2};
    double eta_min{1e-4};
    double eta_max{1e4};
    int n_points{60};
    Spacing spacing{Spacing::log};
    Level level{Level::plus};
    int n_steps_per_period{2000};
    std::filesystem::path output_path{"sweep.csv"};
    unsigned threads{0}; // 0 = hardware concurrency

    void validate() const {
        if (!std::isfinite(theta) || theta < 0.0 || theta > kPi) throw ConfigError("sweep: theta must lie in [0, pi]");
        if (!(eta_min > 0.0) || !std::isfinite(eta_max)) throw ConfigError("sweep: eta values must be finite and > 0");
        if (!(eta_min < eta_max)) throw ConfigError("sweep: require eta_min < eta_max");
        if (n_points < 2) throw ConfigError("sweep: n_points must be >= 2");
        if (n_steps_per_period < 2) throw ConfigError("sweep: n_steps_per_period must be >= 2");
    }

    std::vector<double> etas() const {
        std::vector<double> out(static_cast<std::size_t>(n_points));
        const double last = static_cast<double>(n_points - 1);
        for (int k = 0; k < n_points; ++k) {
            const double f = static_cast<double>(k) / last;
            out[static_cast<std::size_t>(k)] =
                spacing == Spacing::log ? std::exp(std::log(eta_min) + f * (std::log(eta_max) - std::log(eta_min)))
                                        : eta_min + f * (eta_max - eta_min);
        }
        out.front() = eta_min;
        out.back() = eta_max;
        return out;
    }
};

// One CSV row. The beta columns refer to the configured level.
struct SweepRow {
    double eta;
    double theta0;
    double beta;
    double beta_unwrapped;
    double beta_closed_form;
    double berry_adiabatic;
    double aa_phase;
    double dyn_phase;
    double e_plus;
    double e_minus;
};

inline constexpr const char* kSweepCsvHeader =
    "eta,theta0,beta_plus,beta_plus_unwrapped,beta_closed_form,berry_adiabatic,aa_phase,dyn_phase,E_plus,E_minus";

// B = 1, omega0 = eta.
inline SweepRow sweep_point(double theta, double eta, Level level, int n_steps_per_period) {
    const RotatingFieldParams p{1.0, theta, eta};
    const TimeGrid grid(0.0, p.period(), static_cast<std::size_t>(n_steps_per_period));
    const Index n = index_of(level);
    const PhaseDecomposition beta = geometric_phase_beta(rotating_hamiltonian(p), rotating_frame(p), n, grid);
    const Energies e = energies(p);
    SweepRow row{};
    row.eta = eta;
    row.theta0 = theta0(p);
    row.beta = beta.geometric_phase;
    row.beta_unwrapped = beta.geometric_phase;
    row.beta_closed_form = geometric_phase_exact(p, level);
    row.berry_adiabatic = berry_phase_adiabatic(theta, level);
    row.aa_phase = exact_aa_phase(p, level, static_cast<std::size_t>(n_steps_per_period)).geometric_phase;
    row.dyn_phase = beta.dynamical_phase;
    row.e_plus = e.plus;
    row.e_minus = e.minus;
    return row;
}

// Rows in eta order regardless of worker completion order.
inline std::vector<SweepRow> compute_sweep(const SweepConfig& config) {
    config.validate();
    const std::vector<double> etas = config.etas();
    std::vector<SweepRow> rows(etas.size());
    detail::parallel_for(etas.size(), config.threads, [&](std::size_t i) {
        rows[i] = sweep_point(config.theta, etas[i], config.level, config.n_steps_per_period);
    });
    std::vector<double> beta(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) beta[i] = rows[i].beta;
    const std::vector<double> unwrapped = unwrap_phase_series(beta);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].beta_unwrapped = unwrapped[i];
    return rows;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << kSweepCsvHeader << '\n';
    for (const SweepRow& r : rows) {
        const double cols[] = {r.eta,      r.theta0,    r.beta,  r.beta_unwrapped, r.beta_closed_form, r.berry_adiabatic,
                               r.aa_phase, r.dyn_phase, r.e_plus, r.e_minus};
        bool first = true;
        for (double c : cols) {
            if (!first) os << ',';
            os << format_number(c);
            first = false;
        }
        os << '\n';
    }
}

inline std::string describe(const SweepConfig& c) {
    return "sweep --theta " + format_number(c.theta) + " --eta-min " + format_number(c.eta_min) + " --eta-max " +
           format_number(c.eta_max) + " --n-points " + std::to_string(c.n_points) + " --spacing " +
           (c.spacing == Spacing::log ? "log" : "linear") + " --level " + std::string(to_string(c.level)) +
           " --n-steps-per-period " + std::to_string(c.n_steps_per_period) + " --output " + c.output_path.string();
}

inline RunReport cmd_sweep(const SweepConfig& config) {
    detail::Stopwatch clock;
    config.validate();
    std::ofstream out(config.output_path);
    if (!out) throw IoError("cannot open '" + config.output_path.string() + "' for writing");

    const std::vector<SweepRow> rows = compute_sweep(config);
    write_sweep_csv(out, rows);
    out.flush();
    if (!out) throw IoError("write to '" + config.output_path.string() + "' failed");

    RunReport report;
    report.command = describe(config);
    report.value("rows", static_cast<double>(rows.size()));
    for (const SweepRow& r : rows) {
        report.check("beta_vs_closed_form[eta=" + format_number(r.eta) + "]",
                     circular_distance(r.beta, r.beta_closed_form), tol::beta_vs_closed_form);
    }
    report.wall_time_s = clock.seconds();
    return report;
}

// ----------------------------------------------------------------------------
// validate

namespace detail {

struct LadderRung {
    double rk4;
    double w_frame;
    double lab_frame;
};

inline LadderRung oracle_deviations(const RotatingFieldParams& p, std::size_t n_steps, double& unitarity,
                                    double& hermiticity) {
    const TimeGrid grid(0.0, p.period(), n_steps);
    const HamiltonianModel H = rotating_hamiltonian(p);
    const BasisFrame w = rotating_frame(p);
    const BasisFrame lab = lab_frame();
    const EffectiveHamiltonianSeries heff_w = effective_hamiltonian(H, w, grid);
    const EffectiveHamiltonianSeries heff_lab = effective_hamiltonian(H, lab, grid);
    const EvolutionOperatorSeries u_w = evolve(heff_w);
    const EvolutionOperatorSeries u_lab = evolve(heff_lab);
    unitarity = std::max(max_unitarity_defect(u_w), max_unitarity_defect(u_lab));
    hermiticity = std::max(max_hermiticity_defect(heff_w), max_hermiticity_defect(heff_lab));

    LadderRung out{0.0, 0.0, 0.0};
    for (Level level : {Level::plus, Level::minus}) {
        const AmplitudeSeries exact = exact_series(p, level, grid);
        const StateVector psi0 = exact.at(0);
        out.rk4 = std::max(out.rk4, max_deviation(schrodinger_integrate(H, psi0, grid), exact));
        out.w_frame = std::max(out.w_frame, max_deviation(reconstruct_series(w, u_w, index_of(level)), exact));
        out.lab_frame = std::max(out.lab_frame, max_deviation(propagate_state(lab, u_lab, psi0), exact));
    }
    return out;
}

inline void convergence_check(RunReport& report, const std::string& name, double coarse, double fine) {
    if (coarse <= tol::roundoff_floor && fine <= tol::roundoff_floor) {
        report.check(name, coarse / std::max(fine, 1e-300), tol::convergence_ratio, Comparison::at_least,
                     "both deviations at roundoff floor");
        report.records.back().pass = true;
        return;
    }
    report.check(name, coarse / fine, tol::convergence_ratio, Comparison::at_least);
}

} // namespace detail

inline RunReport cmd_validate(const RotatingFieldParams& p, std::size_t n_steps) {
    detail::Stopwatch clock;
    p.validate();
    if (n_steps < 100) throw ConfigError("validate: n_steps must be >= 100");
    if (p.omega0 == 0.0) throw ConfigError("validate: omega0 must be non-zero");

    RunReport report;
    report.command = "validate --B " + format_number(p.B) + " --theta " + format_number(p.theta) + " --omega0 " +
                     format_number(p.omega0) + " --n-steps " + std::to_string(n_steps);
    if (p.degenerate()) report.flags.push_back("degenerate: B = 0 (level crossing)");

    const Energies e = energies(p);
    report.value("theta0", theta0(p));
    report.value("E_plus", e.plus);
    report.value("E_minus", e.minus);
    report.value("period", p.period());

    double unitarity = 0.0;
    double hermiticity = 0.0;
    double unitarity_fine = 0.0;
    double hermiticity_fine = 0.0;
    const detail::LadderRung coarse = detail::oracle_deviations(p, n_steps, unitarity, hermiticity);
    const detail::LadderRung fine = detail::oracle_deviations(p, 2 * n_steps, unitarity_fine, hermiticity_fine);

    report.value("lab_frame_deviation", coarse.lab_frame);
    report.value("lab_frame_deviation_2x", fine.lab_frame);
    report.value("rk4_deviation_2x", fine.rk4);

    report.check("rk4_vs_exact", coarse.rk4, tol::oracle);
    report.check("effective_hamiltonian_vs_exact", coarse.w_frame, tol::oracle);
    detail::convergence_check(report, "rk4_convergence_ratio", coarse.rk4, fine.rk4);
    detail::convergence_check(report, "lab_frame_convergence_ratio", coarse.lab_frame, fine.lab_frame);

    const TimeGrid grid(0.0, p.period(), n_steps);
    double off = 0.0;
    for (std::size_t k = 0; k < grid.n_points(); ++k) off = std::max(off, std::abs(off_diagonal_coupling(p, grid.time(k))));
    report.check("off_diagonal_coupling", off, tol::off_diagonal);
    report.check("unitarity", std::max(unitarity, unitarity_fine), tol::unitarity);
    report.check("effective_hamiltonian_hermiticity", std::max(hermiticity, hermiticity_fine), tol::hermiticity);

    report.wall_time_s = clock.seconds();
    return report;
}

// ----------------------------------------------------------------------------
// gauge-fuzz

struct GaugeFuzzConfig {
    std::uint64_t seed{1};
    int n_trials{50};
    RotatingFieldParams params{};
    double amplitude_bound{kPi};
    int n_modes{3};
    std::size_t n_steps{4000};
};

// Gauge-sensitive inputs, gauge-invariant outputs for both levels.
struct GaugeObservables {
    double beta[2];
    complex holonomy[2];
    double noncyclic_half_period[2];
    double dynamical[2];
};

inline GaugeObservables gauge_observables(const HamiltonianModel& H, const BasisFrame& frame, const TimeGrid& period,
                                          const TimeGrid& half_period) {
    GaugeObservables o{};
    for (Index n = 0; n < 2; ++n) {
        const PhaseDecomposition b = geometric_phase_beta(H, frame, n, period);
        o.beta[n] = b.geometric_phase;
        o.dynamical[n] = b.dynamical_phase;
        o.holonomy[n] = holonomy(frame, n, period).value;
        o.noncyclic_half_period[n] = noncyclic_phase(frame, n, half_period).geometric_phase;
    }
    return o;
}

inline std::uint64_t trial_seed(std::uint64_t seed, int trial) {
    return seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(trial) + 1;
}

inline RunReport cmd_gauge_fuzz(const GaugeFuzzConfig& c) {
    detail::Stopwatch clock;
    c.params.validate();
    if (c.n_trials < 1) throw ConfigError("gauge-fuzz: n_trials must be >= 1");
    if (c.n_steps < 4) throw ConfigError("gauge-fuzz: n_steps must be >= 4");
    if (c.params.omega0 == 0.0) throw ConfigError("gauge-fuzz: omega0 must be non-zero");

    const RotatingFieldParams& p = c.params;
    const double T = p.period();
    const TimeGrid period(0.0, T, c.n_steps);
    const TimeGrid half(0.0, 0.5 * T, std::max<std::size_t>(c.n_steps / 2, 2));
    const HamiltonianModel H = rotating_hamiltonian(p);
    const BasisFrame w = rotating_frame(p);
    const GaugeObservables base = gauge_observables(H, w, period, half);

    RunReport report;
    report.command = "gauge-fuzz --seed " + std::to_string(c.seed) + " --n-trials " + std::to_string(c.n_trials) +
                     " --B " + format_number(p.B) + " --theta " + format_number(p.theta) + " --omega0 " +
                     format_number(p.omega0) + " --amplitude-bound " + format_number(c.amplitude_bound) +
                     " --n-modes " + std::to_string(c.n_modes) + " --n-steps " + std::to_string(c.n_steps);
    if (p.degenerate()) report.flags.push_back("degenerate: B = 0 (level crossing)");
    for (Index n = 0; n < 2; ++n) {
        const std::string lv = n == 0 ? "plus" : "minus";
        report.value("beta_" + lv, base.beta[n]);
        report.value("holonomy_phase_" + lv, wrap_two_pi(std::arg(base.holonomy[n])));
        report.value("noncyclic_half_period_" + lv, base.noncyclic_half_period[n]);
        report.value("dynamical_phase_" + lv, base.dynamical[n]);
    }

    double worst_beta = 0.0, worst_hol_mod = 0.0, worst_hol_arg = 0.0, worst_noncyclic = 0.0, worst_dyn = 0.0;
    for (int trial = 0; trial < c.n_trials; ++trial) {
        const GaugeTransform g = gauge_fuzz_sample(trial_seed(c.seed, trial), 2, c.n_modes, c.amplitude_bound, T);
        const GaugeObservables o = gauge_observables(H, apply_gauge(w, g), period, half);
        double trial_worst = 0.0;
        for (Index n = 0; n < 2; ++n) {
            const double d_beta = circular_distance(o.beta[n], base.beta[n]);
            const double d_mod = std::abs(std::abs(o.holonomy[n]) - std::abs(base.holonomy[n]));
            const double d_arg = circular_distance(std::arg(o.holonomy[n]), std::arg(base.holonomy[n]));
            const double d_nc = circular_distance(o.noncyclic_half_period[n], base.noncyclic_half_period[n]);
            const double d_dyn = std::abs(o.dynamical[n] - base.dynamical[n]);
            worst_beta = std::max(worst_beta, d_beta);
            worst_hol_mod = std::max(worst_hol_mod, d_mod);
            worst_hol_arg = std::max(worst_hol_arg, d_arg);
            worst_noncyclic = std::max(worst_noncyclic, d_nc);
            worst_dyn = std::max(worst_dyn, d_dyn);
            trial_worst = std::max({trial_worst, d_beta, d_mod, d_arg, d_nc, d_dyn});
        }
        report.check("trial[" + std::to_string(trial) + "].max_delta", trial_worst, tol::gauge);
    }
    report.check("beta.max_delta", worst_beta, tol::gauge);
    report.check("holonomy_modulus.max_delta", worst_hol_mod, tol::gauge);
    report.check("holonomy_phase.max_delta", worst_hol_arg, tol::gauge);
    report.check("noncyclic_half_period.max_delta", worst_noncyclic, tol::gauge);
    report.check("dynamical_phase.max_delta", worst_dyn, tol::gauge);
    report.wall_time_s = clock.seconds();
    return report;
}

// ----------------------------------------------------------------------------
// phase

struct PhasePointConfig {
    RotatingFieldParams params{};
    Level level{Level::plus};
    std::size_t n_steps{2000};
    double t_fraction{0.5}; // non-cyclic endpoint as a fraction of T
};

inline RunReport cmd_phase(const PhasePointConfig& c) {
    detail::Stopwatch clock;
    const RotatingFieldParams& p = c.params;
    p.validate();
    if (p.omega0 == 0.0) throw ConfigError("phase: omega0 must be non-zero");
    if (c.n_steps < 4) throw ConfigError("phase: n_steps must be >= 4");
    if (!(c.t_fraction > 0.0) || c.t_fraction > 1.0) throw ConfigError("phase: t_fraction must lie in (0, 1]");

    const Index n = index_of(c.level);
    const double T = p.period();
    const TimeGrid grid(0.0, T, c.n_steps);
    const TimeGrid partial(0.0, c.t_fraction * T, std::max<std::size_t>(static_cast<std::size_t>(std::ceil(c.t_fraction * static_cast<double>(c.n_steps))), 2));
    const HamiltonianModel H = rotating_hamiltonian(p);
    const BasisFrame w = rotating_frame(p);

    const PhaseDecomposition beta = geometric_phase_beta(H, w, n, grid);
    const PhaseDecomposition aa = exact_aa_phase(p, c.level, c.n_steps);
    const Holonomy hol = holonomy(w, n, grid);
    const Energies e = energies(p);

    RunReport report;
    report.command = "phase --B " + format_number(p.B) + " --theta " + format_number(p.theta) + " --omega0 " +
                     format_number(p.omega0) + " --level " + std::string(to_string(c.level)) + " --n-steps " +
                     std::to_string(c.n_steps) + " --t-fraction " + format_number(c.t_fraction);
    if (p.degenerate()) report.flags.push_back("degenerate: B = 0 (level crossing)");
    report.value("theta0", theta0(p));
    report.value("E_plus", e.plus);
    report.value("E_minus", e.minus);
    report.value("period", T);
    report.value("beta", beta.geometric_phase);
    report.value("beta_closed_form", geometric_phase_exact(p, c.level));
    report.value("berry_adiabatic", berry_phase_adiabatic(p.theta, c.level));
    report.value("aa_phase", aa.geometric_phase);
    report.value("dynamical_phase", beta.dynamical_phase);
    report.value("total_phase", beta.total_phase);
    report.value("holonomy_phase", hol.phase);
    report.value("holonomy_modulus", std::abs(hol.value));
    try {
        report.value("noncyclic_phase", noncyclic_phase(w, n, partial).geometric_phase);
    } catch (const OrthogonalEndpointError&) {
        report.flags.push_back("noncyclic phase undefined: endpoint overlap below floor");
    }

    report.check("beta_vs_closed_form", circular_distance(beta.geometric_phase, geometric_phase_exact(p, c.level)),
                 tol::beta_vs_closed_form);
    report.check("aa_vs_beta", circular_distance(aa.geometric_phase, beta.geometric_phase), tol::aa_vs_beta);
    report.wall_time_s = clock.seconds();
    return report;
}

} // namespace hgphase
