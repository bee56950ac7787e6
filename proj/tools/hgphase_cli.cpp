// hgphase: command-line front end.
//
//   hgphase sweep      --theta 1.5707963 --eta-min 1e-4 --eta-max 1e4 --n-points 60 --output sweep.csv
//   hgphase validate   --B 1 --theta 1.0471976 --omega0 0.7 --n-steps 4000
//   hgphase gauge-fuzz --seed 1 --n-trials 50 --B 1 --theta 1.5707963 --omega0 1
//   hgphase phase      --B 1 --theta 1.5707963 --omega0 1 --level +
//
// Exit status: 0 all tolerances met, 1 a tolerance was violated, 2 usage error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "hgphase/commands.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;

void add_field_options(CLI::App* cmd, hgphase::RotatingFieldParams& p) {
    cmd->add_option("--B", p.B, "field magnitude (angular-frequency units)")->capture_default_str();
    cmd->add_option("--theta", p.theta, "polar angle of the field, radians")->capture_default_str();
    cmd->add_option("--omega0", p.omega0, "rotation angular velocity")->capture_default_str();
}

void add_level_option(CLI::App* cmd, std::string& level) {
    cmd->add_option("--level", level, "level: + (plus) or - (minus)")
        ->check(CLI::IsMember({"+", "-", "plus", "minus"}))
        ->capture_default_str();
}

int emit(const hgphase::RunReport& report, const std::string& json_path) {
    std::cout << report.to_text();
    std::cerr << "wall time: " << report.wall_time_s << " s\n";
    if (!json_path.empty()) {
        std::ofstream out(json_path);
        if (!out) throw hgphase::IoError("cannot open '" + json_path + "' for writing");
        out << report.to_json().dump(2) << '\n';
        if (!out) throw hgphase::IoError("write to '" + json_path + "' failed");
    }
    return report.all_passed() ? kExitOk : kExitViolation;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometric phases of driven two-level systems via hidden gauge symmetry"};
    app.require_subcommand(1);
    std::string json_path;

    // sweep
    hgphase::SweepConfig sweep;
    std::string sweep_spacing = "log";
    std::string sweep_level = "+";
    std::string sweep_output;
    auto* sweep_cmd = app.add_subcommand("sweep", "eta = omega0/B sweep at fixed theta, CSV output");
    sweep_cmd->add_option("--theta", sweep.theta, "polar angle, radians")->capture_default_str();
    sweep_cmd->add_option("--eta-min", sweep.eta_min)->capture_default_str();
    sweep_cmd->add_option("--eta-max", sweep.eta_max)->capture_default_str();
    sweep_cmd->add_option("--n-points", sweep.n_points)->capture_default_str();
    sweep_cmd->add_option("--spacing", sweep_spacing)->check(CLI::IsMember({"log", "linear"}))->capture_default_str();
    add_level_option(sweep_cmd, sweep_level);
    sweep_cmd->add_option("--n-steps-per-period", sweep.n_steps_per_period)->capture_default_str();
    sweep_cmd->add_option("--output", sweep_output, "CSV output path")->required();
    sweep_cmd->add_option("--threads", sweep.threads, "worker threads (0 = all cores)")->capture_default_str();
    sweep_cmd->add_option("--json-report", json_path);

    // validate
    hgphase::RotatingFieldParams validate_params{1.0, hgphase::kPi / 3, 0.7};
    std::size_t validate_steps = 4000;
    auto* validate_cmd = app.add_subcommand("validate", "oracle ladder: exact vs RK4 vs effective-Hamiltonian propagation");
    add_field_options(validate_cmd, validate_params);
    validate_cmd->add_option("--n-steps", validate_steps)->capture_default_str();
    validate_cmd->add_option("--json-report", json_path);

    // gauge-fuzz
    hgphase::GaugeFuzzConfig fuzz;
    auto* fuzz_cmd = app.add_subcommand("gauge-fuzz", "random smooth hidden-gauge transforms; all outputs must be invariant");
    fuzz_cmd->add_option("--seed", fuzz.seed)->capture_default_str();
    fuzz_cmd->add_option("--n-trials", fuzz.n_trials)->capture_default_str();
    add_field_options(fuzz_cmd, fuzz.params);
    fuzz_cmd->add_option("--amplitude-bound", fuzz.amplitude_bound)->capture_default_str();
    fuzz_cmd->add_option("--n-modes", fuzz.n_modes)->capture_default_str();
    fuzz_cmd->add_option("--n-steps", fuzz.n_steps)->capture_default_str();
    fuzz_cmd->add_option("--json-report", json_path);

    // phase
    hgphase::PhasePointConfig point;
    std::string point_level = "+";
    auto* phase_cmd = app.add_subcommand("phase", "single-point phase evaluation");
    add_field_options(phase_cmd, point.params);
    add_level_option(phase_cmd, point_level);
    phase_cmd->add_option("--n-steps", point.n_steps)->capture_default_str();
    phase_cmd->add_option("--t-fraction", point.t_fraction, "non-cyclic endpoint as a fraction of T")->capture_default_str();
    phase_cmd->add_option("--json-report", json_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*sweep_cmd) {
            sweep.spacing = sweep_spacing == "log" ? hgphase::Spacing::log : hgphase::Spacing::linear;
            sweep.level = hgphase::parse_level(sweep_level);
            sweep.output_path = sweep_output;
            return emit(hgphase::cmd_sweep(sweep), json_path);
        }
        if (*validate_cmd) return emit(hgphase::cmd_validate(validate_params, validate_steps), json_path);
        if (*fuzz_cmd) return emit(hgphase::cmd_gauge_fuzz(fuzz), json_path);
        if (*phase_cmd) {
            point.level = hgphase::parse_level(point_level);
            return emit(hgphase::cmd_phase(point), json_path);
        }
    } catch (const hgphase::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const hgphase::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const hgphase::Error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitViolation;
    }
    return kExitUsage;
}
