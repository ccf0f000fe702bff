#include <annmoc/error.hpp>
#include <annmoc/estimator.hpp>
#include <annmoc/problems.hpp>
#include <annmoc/quadrature.hpp>
#include <annmoc/transport.hpp>

#include <gtest/gtest.h>

#include <cmath>

namespace annmoc {
namespace {

TransportProblem pure_absorber(double sigma, double inflow) {
    TransportProblem p;
    p.sigma_t = sigma;
    p.inflow_a = inflow;
    p.inflow_b = inflow;
    return p;
}

// mu I' + I = x - x^2 on [0, 1] with no inflow: for mu > 0 the solution is
// P(x) - P(0) e^{-x/mu} with P = p - mu p' + mu^2 p''; mu < 0 follows by
// reflecting x -> 1 - x.
double polynomial_source_intensity(double x, double mu) {
    if (mu < 0.0) return polynomial_source_intensity(1.0 - x, -mu);
    auto particular = [mu](double y) { return (y - y * y) - mu * (1.0 - 2.0 * y) + mu * mu * (-2.0); };
    return particular(x) - particular(0.0) * std::exp(-x / mu);
}

TEST(PathLength, MeasuresFromTheInflowBoundary) {
    TransportProblem p;
    auto forward = path_length(0.3, 0.5, p);
    EXPECT_DOUBLE_EQ(forward.s, 0.6);
    EXPECT_EQ(forward.x, 0.3);
    auto backward = path_length(0.3, -0.5, p);
    EXPECT_DOUBLE_EQ(backward.s, 1.4);
    EXPECT_EQ(path_length(0.0, 0.2, p).s, 0.0);
    EXPECT_EQ(path_length(1.0, -0.2, p).s, 0.0);
    EXPECT_EQ(inflow_boundary(0.1, p), 0.0);
    EXPECT_EQ(inflow_boundary(-0.1, p), 1.0);
}

TEST(PathLength, RejectsGrazingDirectionsAndOutsidePoints) {
    TransportProblem p;
    EXPECT_THROW(path_length(0.5, 0.0, p), ConfigError);
    EXPECT_THROW(path_length(1.5, 0.5, p), ConfigError);
    EXPECT_THROW(path_length(-0.1, 0.5, p), ConfigError);
}

TEST(OpticalDepth, ConstantAndVariableCrossSections) {
    TransportProblem p;
    p.sigma_t = 2.5;
    EXPECT_DOUBLE_EQ(optical_depth(0.2, 1.0, 0.5, p), 2.0);
    p.sigma_t = Coefficient([](double x) { return 1.0 + x; });
    // x = 0.5 s from the left boundary: int_0^1 (1 + s/2) ds.
    EXPECT_NEAR(optical_depth(0.0, 1.0, 0.5, p), 1.25, 1e-12);
    // x = 1 - 0.5 s from the right boundary: int_0^1 (2 - s/2) ds.
    EXPECT_NEAR(optical_depth(0.0, 1.0, -0.5, p), 1.75, 1e-12);
    EXPECT_THROW(optical_depth(0.5, 0.1, 0.5, p), ConfigError);
}

TEST(MocIntensity, PureAbsorberAttenuatesTheInflow) {
    const auto p = pure_absorber(2.0, 3.0);
    const MeshEstimator zero(0.0, 1.0, Interpolation::linear);
    for (const double mu : {0.9, 0.1, -0.3, -1.0}) {
        const auto point = path_length(0.4, mu, p);
        EXPECT_NEAR(moc_intensity(point, zero, p), 3.0 * std::exp(-2.0 * point.s), 1e-14) << "mu " << mu;
    }
}

TEST(MocIntensity, InflowPointReturnsTheBoundaryValue) {
    const auto p = pure_absorber(1.0, 0.7);
    const MeshEstimator zero(0.0, 1.0, Interpolation::linear);
    EXPECT_EQ(moc_intensity(path_length(0.0, 0.5, p), zero, p), 0.7);
}

TEST(MocIntensity, MatchesTheClosedFormForAPolynomialSource) {
    TransportProblem p;
    p.q = [](double x, double) { return x - x * x; };
    const MeshEstimator zero(0.0, 1.0, Interpolation::linear);
    for (const double mu : {0.999, 0.5, 0.05, 0.003, -0.003, -0.2, -0.77}) {
        for (const double x : {0.0, 0.013, 0.25, 0.5, 0.9, 1.0}) {
            const double got = moc_intensity(path_length(x, mu, p), zero, p);
            EXPECT_NEAR(got, polynomial_source_intensity(x, mu), 1e-9) << "x " << x << " mu " << mu;
        }
    }
}

TEST(MocIntensity, VariableCoefficientPathAgreesWithTheConstantOne) {
    TransportProblem constant;
    constant.sigma_t = 1.0;
    constant.q = [](double x, double) { return x - x * x; };
    TransportProblem variable = constant;
    variable.sigma_t = Coefficient([](double) { return 1.0; });
    ASSERT_FALSE(variable.sigma_t.is_constant());
    const MeshEstimator zero(0.0, 1.0, Interpolation::linear);
    for (const double mu : {0.7, -0.4, 0.02}) {
        const double a = moc_intensity(path_length(0.6, mu, constant), zero, constant);
        const double b = moc_intensity(path_length(0.6, mu, variable), zero, variable);
        EXPECT_NEAR(a, b, 1e-9);
    }
}

TEST(MocIntensity, ManufacturedSolutionIsReproducedInEveryDirection) {
    const ManufacturedProblem m;
    const auto p = to_transport(m);
    const ExactEstimator exact(0.0, 1.0, [&](double x) { return exact_average_flux(x, m); });
    for (const double mu : {0.95, 0.3, 0.01, -0.01, -0.6}) {
        for (const double x : {0.0, 0.1, 0.5, 1.0}) {
            EXPECT_NEAR(moc_intensity(path_length(x, mu, p), exact, p), std::exp(-3.0 * x), 1e-10)
                << "x " << x << " mu " << mu;
        }
    }
}

TEST(AverageFlux, IsHalfTheWeightedSum) {
    const auto quad = gauss_legendre(8);
    const std::vector<double> ones(8, 1.0);
    EXPECT_NEAR(average_flux(ones, quad), 1.0, 1e-15);
    std::vector<double> mu_squared(8);
    for (std::size_t i = 0; i < 8; ++i) mu_squared[i] = quad.nodes[i] * quad.nodes[i];
    EXPECT_NEAR(average_flux(mu_squared, quad), 1.0 / 3.0, 1e-15);
    EXPECT_THROW(average_flux(std::vector<double>(3, 1.0), quad), ConfigError);
}

TEST(Validate, RejectsInconsistentProblems) {
    TransportProblem p;
    EXPECT_NO_THROW(validate(p));
    p.sigma_s = 2.0;
    EXPECT_THROW(validate(p), ConfigError);
    p = TransportProblem{};
    p.b = p.a;
    EXPECT_THROW(validate(p), ConfigError);
    p = TransportProblem{};
    p.inflow_a = -1.0;
    EXPECT_THROW(validate(p), ConfigError);
    p = TransportProblem{};
    p.q = [](double x, double) { return x > 0.5 ? std::nan("") : 0.0; };
    EXPECT_THROW(validate(p), ConfigError);
}

}  // namespace
}  // namespace annmoc
