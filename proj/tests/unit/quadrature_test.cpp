#include <annmoc/error.hpp>
#include <annmoc/quadrature.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>

namespace annmoc {
namespace {

double monomial_integral(int degree) { return degree % 2 == 1 ? 0.0 : 2.0 / (degree + 1); }

class GaussLegendreExactness : public ::testing::TestWithParam<std::size_t> {};

TEST_P(GaussLegendreExactness, IntegratesMonomialsUpToDegree2NMinus1) {
    const std::size_t n = GetParam();
    const auto rule = gauss_legendre(n);
    ASSERT_EQ(rule.size(), n);
    for (int degree = 0; degree <= static_cast<int>(2 * n - 1); ++degree) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum += rule.weights[i] * std::pow(rule.nodes[i], degree);
        }
        EXPECT_NEAR(sum, monomial_integral(degree), 1e-12) << "degree " << degree;
    }
}

TEST_P(GaussLegendreExactness, WeightsArePositiveAndSumToTwo) {
    const auto rule = gauss_legendre(GetParam());
    EXPECT_NEAR(std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0), 2.0, 1e-12);
    for (const double w : rule.weights) {
        EXPECT_GT(w, 0.0);
    }
}

TEST_P(GaussLegendreExactness, NodesAreAscendingAndSymmetric) {
    const auto rule = gauss_legendre(GetParam());
    const std::size_t n = rule.size();
    for (std::size_t i = 0; i < n; ++i) {
        EXPECT_GT(rule.nodes[i], -1.0);
        EXPECT_LT(rule.nodes[i], 1.0);
        if (i > 0) EXPECT_LT(rule.nodes[i - 1], rule.nodes[i]);
        EXPECT_EQ(rule.nodes[i], -rule.nodes[n - 1 - i]);
        EXPECT_EQ(rule.weights[i], rule.weights[n - 1 - i]);
    }
}

INSTANTIATE_TEST_SUITE_P(Orders, GaussLegendreExactness, ::testing::Values(1, 2, 3, 5, 10, 16, 64, 100));

TEST(GaussLegendre, TwoPointRuleIsKnownInClosedForm) {
    const auto rule = gauss_legendre(2);
    EXPECT_NEAR(rule.nodes[1], 1.0 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(rule.weights[0], 1.0, 1e-15);
}

TEST(GaussLegendre, OddRulesHaveAnExactZeroNode) {
    const auto rule = gauss_legendre(7);
    EXPECT_EQ(rule.nodes[3], 0.0);
}

TEST(GaussLegendre, RejectsEmptyAndZeroNodeRules) {
    EXPECT_THROW(gauss_legendre(0), ConfigError);
    EXPECT_THROW(gauss_legendre(5, ZeroNode::reject), ConfigError);
    EXPECT_NO_THROW(gauss_legendre(6, ZeroNode::reject));
}

TEST(IntegrateAdaptive, SmoothIntegrandIsExactToTolerance) {
    const auto result = integrate_adaptive(
        [](std::span<const double> x, std::span<double> y) {
            for (std::size_t k = 0; k < x.size(); ++k) y[k] = std::exp(-3.0 * x[k]);
        },
        0.0, 2.0, 1e-13);
    EXPECT_NEAR(result.value, (1.0 - std::exp(-6.0)) / 3.0, 1e-13);
    EXPECT_EQ(result.evaluations, 21 * (2 * result.panels - 1));
}

TEST(IntegrateAdaptive, HighDegreePolynomial) {
    const auto result = integrate_adaptive(
        [](std::span<const double> x, std::span<double> y) {
            for (std::size_t k = 0; k < x.size(); ++k) y[k] = std::pow(x[k], 30) + 1.0;
        },
        -1.0, 1.0, 1e-10);
    EXPECT_LE(result.panels, 8u);
    EXPECT_NEAR(result.value, 2.0 / 31.0 + 2.0, 1e-13);
}

TEST(IntegrateAdaptive, RefinesTowardAnEndpointSingularity) {
    const double value = integrate_on_segment([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-9);
    EXPECT_NEAR(value, 2.0, 1e-8);
}

TEST(IntegrateAdaptive, EmptyIntervalIsZeroAndReversedIsRejected) {
    auto f = [](double x) { return std::cos(x); };
    EXPECT_EQ(integrate_on_segment(f, 0.3, 0.3, 1e-12), 0.0);
    EXPECT_THROW(integrate_on_segment(f, std::numbers::pi / 2, 0.0, 1e-12), ConfigError);
}

TEST(IntegrateAdaptive, InitialPanelsSplitTheInterval) {
    IntegrationOptions options;
    options.initial_panels = 8;
    const auto result = integrate_adaptive(
        [](std::span<const double> x, std::span<double> y) {
            for (std::size_t k = 0; k < x.size(); ++k) y[k] = std::sin(x[k]);
        },
        0.0, std::numbers::pi, 1e-12, options);
    EXPECT_GE(result.panels, 8u);
    EXPECT_NEAR(result.value, 2.0, 1e-12);
}

TEST(IntegrateAdaptive, ThrowsWhenThePanelBudgetRunsOut) {
    IntegrationOptions options;
    options.max_panels = 4;
    try {
        integrate_on_segment([](double x) { return std::sin(1.0 / (x + 1e-3)); }, 0.0, 1.0, 1e-14, options);
        FAIL() << "expected IntegrationError";
    } catch (const IntegrationError& e) {
        EXPECT_GT(e.error_estimate(), 1e-14);
        EXPECT_TRUE(std::isfinite(e.estimate()));
    }
}

TEST(IntegrateAdaptive, RejectsNonPositiveTolerance) {
    EXPECT_THROW(integrate_on_segment([](double) { return 1.0; }, 0.0, 1.0, 0.0), ConfigError);
}

}  // namespace
}  // namespace annmoc
