#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hgphase/commands.hpp"

using namespace hgphase;

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, sep)) out.push_back(cell);
    return out;
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "hgphase_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST(SweepPoint, AdiabaticEnd) {
    const SweepRow r = sweep_point(kPi / 2, 1e-4, Level::plus, 2000);
    EXPECT_NEAR(r.beta, kPi, 1e-3);
    EXPECT_NEAR(r.berry_adiabatic, kPi, 1e-15);
    EXPECT_LE(std::abs(r.beta - r.berry_adiabatic), 1e-3);
    EXPECT_LE(circular_distance(r.beta, r.beta_closed_form), 1e-6);
}

TEST(SweepPoint, FastEnd) {
    const SweepRow r = sweep_point(kPi / 2, 1e4, Level::plus, 2000);
    EXPECT_LE(circular_distance(r.beta, 0.0), 1e-3);
    EXPECT_LE(circular_distance(r.aa_phase, r.beta), 1e-5);
}

TEST(SweepPoint, TenPercentDeviation) {
    const SweepRow r = sweep_point(kPi / 2, 0.1, Level::plus, 2000);
    // pi (1 + sin(atan(0.1))) = pi (1 + 0.1 / sqrt(1.01))
    EXPECT_NEAR(r.beta / kPi, 1.0 + 0.1 / std::sqrt(1.01), 1e-9);
    EXPECT_NEAR(r.beta / kPi, 1.0995, 1e-3);
    EXPECT_NEAR(r.theta0, std::atan(0.1), 1e-15);
    EXPECT_NEAR(r.e_plus + r.e_minus, -0.1, 1e-14);
}

TEST(Sweep, EtaGrid) {
    SweepConfig c;
    c.eta_min = 1e-2;
    c.eta_max = 1e2;
    c.n_points = 5;
    const std::vector<double> log = c.etas();
    EXPECT_EQ(log.front(), 1e-2);
    EXPECT_EQ(log.back(), 1e2);
    EXPECT_NEAR(log[2], 1.0, 1e-14);
    c.spacing = Spacing::linear;
    EXPECT_NEAR(c.etas()[1], 1e-2 + 0.25 * (1e2 - 1e-2), 1e-12);
}

TEST(Sweep, ConfigValidation) {
    SweepConfig c;
    c.eta_min = 2.0;
    c.eta_max = 1.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = SweepConfig{};
    c.eta_min = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = SweepConfig{};
    c.n_points = 1;
    EXPECT_THROW(c.validate(), ConfigError);
    c = SweepConfig{};
    c.theta = 4.0;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Sweep, CsvSchemaAndRoundTrip) {
    SweepConfig c;
    c.n_points = 6;
    c.output_path = scratch("sweep_schema.csv");
    const RunReport rep = cmd_sweep(c);
    EXPECT_TRUE(rep.all_passed());
    std::ifstream in(c.output_path);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, kSweepCsvHeader);
    const std::vector<SweepRow> rows = compute_sweep(c);
    std::size_t i = 0;
    while (std::getline(in, line)) {
        const auto cells = split(line, ',');
        ASSERT_EQ(cells.size(), 10u);
        // 17 significant digits round-trip exactly
        EXPECT_EQ(std::strtod(cells[0].c_str(), nullptr), rows[i].eta);
        EXPECT_EQ(std::strtod(cells[2].c_str(), nullptr), rows[i].beta);
        EXPECT_EQ(std::strtod(cells[9].c_str(), nullptr), rows[i].e_minus);
        ++i;
    }
    EXPECT_EQ(i, 6u);
}

TEST(Sweep, DeterministicAcrossThreadCounts) {
    SweepConfig c;
    c.n_points = 12;
    c.threads = 1;
    c.output_path = scratch("sweep_t1.csv");
    cmd_sweep(c);
    c.threads = 4;
    c.output_path = scratch("sweep_t4.csv");
    cmd_sweep(c);
    const std::string a = slurp(scratch("sweep_t1.csv"));
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, slurp(scratch("sweep_t4.csv")));
}

TEST(Sweep, UnwritablePathThrowsIoError) {
    SweepConfig c;
    c.n_points = 2;
    c.output_path = "/nonexistent-dir/sub/sweep.csv";
    EXPECT_THROW(cmd_sweep(c), IoError);
}

TEST(Sweep, UnwrappedColumnIsContinuousAtOffAxisAngle) {
    SweepConfig c;
    c.theta = kPi / 3;
    const std::vector<SweepRow> rows = compute_sweep(c);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_LT(std::abs(rows[i].beta_unwrapped - rows[i - 1].beta_unwrapped), 0.2);
    }
}

TEST(Sweep, MinusLevelColumns) {
    SweepConfig c;
    c.n_points = 4;
    c.level = Level::minus;
    for (const SweepRow& r : compute_sweep(c)) {
        const RotatingFieldParams p{1.0, c.theta, r.eta};
        EXPECT_LE(circular_distance(r.beta, geometric_phase_exact(p, Level::minus)), 1e-6);
        EXPECT_EQ(r.berry_adiabatic, berry_phase_adiabatic(c.theta, Level::minus));
    }
}

TEST(Validate, DefaultCasePasses) {
    const RunReport r = cmd_validate({1.0, kPi / 3, 0.7}, 4000);
    for (const auto& rec : r.records) EXPECT_TRUE(rec.pass) << rec.name << " = " << rec.value;
    EXPECT_TRUE(r.flags.empty());
}

TEST(Validate, DegenerateFieldIsFlaggedAndChecked) {
    const RunReport r = cmd_validate({0.0, kPi / 2, 1.0}, 1000);
    ASSERT_EQ(r.flags.size(), 1u);
    EXPECT_NE(r.flags[0].find("degenerate"), std::string::npos);
    EXPECT_GE(r.records.size(), 7u);
}

TEST(Validate, LabFrameConvergesAtSecondOrder) {
    double u = 0, h = 0;
    const auto coarse = detail::oracle_deviations({1.0, kPi / 3, 0.7}, 400, u, h);
    const auto fine = detail::oracle_deviations({1.0, kPi / 3, 0.7}, 800, u, h);
    EXPECT_GE(coarse.lab_frame / fine.lab_frame, 3.5);
    EXPECT_GE(coarse.rk4 / fine.rk4, 3.5);
}

TEST(Validate, RejectsBadArguments) {
    EXPECT_THROW(cmd_validate({1.0, 1.0, 1.0}, 50), ConfigError);
    EXPECT_THROW(cmd_validate({1.0, 1.0, 0.0}, 1000), ConfigError);
    EXPECT_THROW(cmd_validate({-1.0, 1.0, 1.0}, 1000), ConfigError);
}

TEST(GaugeFuzzCommand, ZeroBoundGivesExactZeros) {
    GaugeFuzzConfig c;
    c.n_trials = 3;
    c.amplitude_bound = 0.0;
    const RunReport r = cmd_gauge_fuzz(c);
    for (const auto& rec : r.records) EXPECT_EQ(rec.value, 0.0) << rec.name;
}

TEST(GaugeFuzzCommand, FiftyTrialsPassAndRerunIsIdentical) {
    GaugeFuzzConfig c;
    const RunReport a = cmd_gauge_fuzz(c);
    EXPECT_TRUE(a.all_passed());
    EXPECT_EQ(a.records.size(), 55u);
    const RunReport b = cmd_gauge_fuzz(c);
    EXPECT_EQ(a.to_text(), b.to_text());
    c.seed = 2;
    EXPECT_NE(cmd_gauge_fuzz(c).to_text(), a.to_text());
}

TEST(GaugeFuzzCommand, RejectsBadArguments) {
    GaugeFuzzConfig c;
    c.n_trials = 0;
    EXPECT_THROW(cmd_gauge_fuzz(c), ConfigError);
    c = GaugeFuzzConfig{};
    c.n_modes = 0;
    EXPECT_THROW(cmd_gauge_fuzz(c), ConfigError);
}

TEST(PhaseCommand, ReportsConsistentValues) {
    PhasePointConfig c;
    const RunReport r = cmd_phase(c);
    EXPECT_TRUE(r.all_passed());
    auto get = [&](const std::string& k) -> double {
        for (const auto& [name, v] : r.values)
            if (name == k) return v;
        ADD_FAILURE() << "missing value " << k;
        return NAN;
    };
    EXPECT_NEAR(get("theta0"), kPi / 4, 1e-15);
    EXPECT_NEAR(get("beta_closed_form"), kPi * (1 + std::sqrt(0.5)), 1e-14);
    EXPECT_NEAR(get("noncyclic_phase"), kPi + 0.5 * kPi * (1 + std::sqrt(0.5)), 1e-9);
    EXPECT_NEAR(get("holonomy_modulus"), 1.0, 1e-12);
}

TEST(RunReport, NanNeverPasses) {
    RunReport r;
    r.check("x", NAN, 1.0);
    r.check("y", NAN, 1.0, Comparison::at_least);
    EXPECT_FALSE(r.all_passed());
    EXPECT_EQ(r.failures(), 2u);
}

TEST(RunReport, JsonCarriesRecordsAndWallTime) {
    RunReport r;
    r.command = "phase";
    r.value("a", 1.5);
    r.check("ok", 0.5, 1.0);
    r.check("bad", 2.0, 1.0);
    r.wall_time_s = 0.25;
    const auto j = r.to_json();
    EXPECT_EQ(j["command"], "phase");
    EXPECT_EQ(j["values"]["a"], 1.5);
    EXPECT_EQ(j["records"].size(), 2u);
    EXPECT_EQ(j["records"][1]["pass"], false);
    EXPECT_EQ(j["passed"], false);
    EXPECT_EQ(j["wall_time_s"], 0.25);
    EXPECT_EQ(r.to_text().find("0.25"), std::string::npos);
}
