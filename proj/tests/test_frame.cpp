#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hgphase/frame.hpp"
#include "hgphase/rotating_model.hpp"
#include "test_util.hpp"

using namespace hgphase;

namespace {

const RotatingFieldParams kParams{1.0, kPi / 3, 0.7};

double max_frame_difference(const BasisFrame& a, const BasisFrame& b, const TimeGrid& g) {
    double worst = 0.0;
    for (std::size_t k = 0; k < g.n_points(); ++k) worst = std::max(worst, max_abs(a.evaluate(g.time(k)) - b.evaluate(g.time(k))));
    return worst;
}

} // namespace

TEST(BasisFrame, OrthonormalOnGrid) {
    const TimeGrid g(0.0, kParams.period(), 500);
    EXPECT_LE(max_gram_defect(rotating_frame(kParams), g), 1e-10);
    testutil::Gen gen(21);
    for (Index d : {2, 3, 5}) EXPECT_LE(max_gram_defect(testutil::smooth_random_frame(gen, d), g), 1e-10);
}

TEST(BasisFrame, WrongShapeFromRuleThrows) {
    const BasisFrame bad = BasisFrame::analytic(
        3, [](double) -> Eigen::MatrixXcd { return Eigen::MatrixXcd::Identity(2, 2); },
        [](double) -> Eigen::MatrixXcd { return Eigen::MatrixXcd::Zero(2, 2); });
    EXPECT_THROW(bad.evaluate(0.0), DimensionError);
    EXPECT_THROW(rotating_frame(kParams).vector(2, 0.0), DimensionError);
}

TEST(BasisFrame, CentralDifferenceMatchesDefinition) {
    const BasisFrame w = rotating_frame(kParams);
    const double h = 1e-3;
    const BasisFrame cd = w.with_central_difference(h);
    EXPECT_EQ(cd.mode(), DerivativeMode::central_difference);
    EXPECT_DOUBLE_EQ(cd.step(), h);
    const double t = 0.37;
    const Eigen::MatrixXcd expected = (w.evaluate(t + h) - w.evaluate(t - h)) / (2 * h);
    EXPECT_LE(max_abs(cd.derivative(t) - expected), 1e-15);
    EXPECT_THROW(w.with_central_difference(0.0), NumericalError);
}

TEST(BasisFrame, CentralDifferenceIsSecondOrder) {
    testutil::Gen gen(8);
    for (const BasisFrame& analytic : std::vector<BasisFrame>{rotating_frame(kParams), testutil::smooth_random_frame(gen, 3)}) {
        auto max_err = [&](double h) {
            const BasisFrame cd = analytic.with_central_difference(h);
            double worst = 0.0;
            for (double t = 0.0; t < 6.0; t += 0.25) worst = std::max(worst, max_abs(cd.derivative(t) - analytic.derivative(t)));
            return worst;
        };
        EXPECT_GE(max_err(1e-2) / max_err(5e-3), 3.5);
    }
}

TEST(BasisFrame, NormalizationKillsRealPartOfConnection) {
    testutil::Gen gen(9);
    const TimeGrid g(0.0, 6.0, 400);
    const BasisFrame frames[] = {rotating_frame(kParams), testutil::smooth_random_frame(gen, 4),
                                 testutil::smooth_random_frame(gen, 2).with_central_difference(1e-4)};
    for (const BasisFrame& f : frames) {
        for (std::size_t k = 0; k < g.n_points(); ++k) {
            const double t = g.time(k);
            for (Index n = 0; n < f.dim(); ++n) {
                EXPECT_LE(std::abs(inner(f.vector(n, t), f.derivative_vector(n, t)).real()), 1e-8);
            }
        }
    }
}

TEST(ApplyGauge, IdentityLeavesFrameUnchanged) {
    const BasisFrame w = rotating_frame(kParams);
    const BasisFrame g = apply_gauge(w, GaugeTransform::identity(2));
    const TimeGrid grid(0.0, 9.0, 90);
    EXPECT_EQ(max_frame_difference(w, g, grid), 0.0);
}

TEST(ApplyGauge, ConstantPhaseDropsOutOfDerivativeCoupling) {
    const BasisFrame w = rotating_frame(kParams);
    const double c = 1.234;
    const BasisFrame g = apply_gauge(w, GaugeTransform::constant(2, c));
    for (double t : {0.0, 0.5, 3.3}) {
        EXPECT_LE(max_abs(g.evaluate(t) - std::polar(1.0, c) * w.evaluate(t)), 1e-15);
        for (Index n = 0; n < 2; ++n) {
            const complex before = inner(w.vector(n, t), w.derivative_vector(n, t));
            const complex after = inner(g.vector(n, t), g.derivative_vector(n, t));
            EXPECT_NEAR(std::abs(before - after), 0.0, 1e-14);
        }
    }
}

TEST(ApplyGauge, InverseRestoresFrame) {
    const BasisFrame w = rotating_frame(kParams);
    const GaugeTransform g = gauge_fuzz_sample(77, 2, 3, kPi, kParams.period());
    const BasisFrame back = apply_gauge(apply_gauge(w, g), g.inverse());
    const TimeGrid grid(0.0, kParams.period(), 200);
    EXPECT_LE(max_frame_difference(w, back, grid), 1e-12);
    for (std::size_t k = 0; k < grid.n_points(); k += 10) {
        EXPECT_LE(max_abs(w.derivative(grid.time(k)) - back.derivative(grid.time(k))), 1e-12);
    }
}

TEST(ApplyGauge, ProductRuleDerivative) {
    const BasisFrame w = rotating_frame(kParams);
    const BasisFrame g = apply_gauge(w, gauge_fuzz_sample(4, 2, 2, 1.0, kParams.period()));
    // analytic rule vs a fine central difference of the gauged values
    const BasisFrame numeric = g.with_central_difference(1e-5);
    for (double t : {0.1, 2.0, 7.5}) EXPECT_LE(max_abs(g.derivative(t) - numeric.derivative(t)), 1e-8);
}

TEST(ApplyGauge, PreservesGramMatrixAndMode) {
    testutil::Gen gen(12);
    const BasisFrame f = testutil::smooth_random_frame(gen, 3);
    const GaugeTransform g = gauge_fuzz_sample(5, 3, 3, kPi, 4.0);
    const BasisFrame fg = apply_gauge(f, g);
    for (double t : {0.0, 0.9, 2.2, 3.9}) {
        const Eigen::MatrixXcd a = f.evaluate(t), b = fg.evaluate(t);
        EXPECT_LE(max_abs(a.adjoint() * a - b.adjoint() * b), 1e-12);
    }
    EXPECT_EQ(apply_gauge(f.with_central_difference(1e-4), g).mode(), DerivativeMode::central_difference);
}

TEST(ApplyGauge, DimensionMismatchThrows) {
    EXPECT_THROW(apply_gauge(rotating_frame(kParams), GaugeTransform::identity(3)), DimensionError);
}

TEST(GaugeFuzz, ZeroBoundGivesZeroPhases) {
    const GaugeTransform g = gauge_fuzz_sample(3, 2, 4, 0.0);
    for (double t : {0.0, 1.0, 5.0}) {
        EXPECT_EQ(g.values(t).cwiseAbs().maxCoeff(), 0.0);
        EXPECT_EQ(g.derivatives(t).cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(GaugeFuzz, DeterministicForEqualSeeds) {
    const auto a = gauge_fuzz_coefficients(42, 3, 5, 2.0, 7.0);
    const auto b = gauge_fuzz_coefficients(42, 3, 5, 2.0, 7.0);
    const auto c = gauge_fuzz_coefficients(43, 3, 5, 2.0, 7.0);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
}

TEST(GaugeFuzz, CoefficientAndAmplitudeBounds) {
    const auto coeffs = gauge_fuzz_coefficients(1, 2, 3, kPi);
    ASSERT_EQ(coeffs.size(), 2u);
    for (const FourierPhase& f : coeffs) {
        EXPECT_LE(std::abs(f.a0), kPi);
        ASSERT_EQ(f.cos_coeffs.size(), 3u);
        for (std::size_t k = 0; k < 3; ++k) {
            EXPECT_LE(std::abs(f.cos_coeffs[k]), kPi);
            EXPECT_LE(std::abs(f.sin_coeffs[k]), kPi);
        }
        EXPECT_LE(f.amplitude_bound(), 7 * kPi);
    }
    const GaugeTransform g = gauge_fuzz_sample(1, 2, 3, kPi);
    for (double t = 0.0; t < kTwoPi; t += 1e-3) EXPECT_LE(g.values(t).cwiseAbs().maxCoeff(), 7 * kPi);
}

TEST(GaugeFuzz, SmoothOnGrid) {
    const auto coeffs = gauge_fuzz_coefficients(9, 2, 3, kPi, 5.0);
    const GaugeTransform g = GaugeTransform::from_fourier(coeffs);
    // |alpha''| <= sum_k (2 pi k / t_ref)^2 (|a_k| + |b_k|)
    double bound = 0.0;
    for (const FourierPhase& f : coeffs) {
        double s = 0.0;
        for (std::size_t k = 0; k < f.cos_coeffs.size(); ++k) {
            const double w = kTwoPi * static_cast<double>(k + 1) / f.t_ref;
            s += w * w * (std::abs(f.cos_coeffs[k]) + std::abs(f.sin_coeffs[k]));
        }
        bound = std::max(bound, s);
    }
    const double curvature = g.max_second_difference(TimeGrid(0.0, 5.0, 1000));
    EXPECT_LE(curvature, bound * (1 + 1e-3));
    EXPECT_GT(curvature, 0.0);
}

TEST(GaugeFuzz, NonFinitePhaseIsRejected) {
    const GaugeTransform bad({PhaseFunction{[](double) { return NAN; }, [](double) { return 0.0; }}});
    EXPECT_THROW(bad.max_second_difference(TimeGrid(0.0, 1.0, 10)), NumericalError);
}

TEST(GaugeFuzz, InvalidArgumentsThrow) {
    EXPECT_THROW(gauge_fuzz_sample(1, 2, 0, 1.0), ConfigError);
    EXPECT_THROW(gauge_fuzz_sample(1, 2, 3, -1.0), ConfigError);
}
