#include <annmoc/error.hpp>
#include <annmoc/estimator.hpp>

#include <gtest/gtest.h>

#include <cmath>

namespace annmoc {
namespace {

TrainingSet sample(const std::function<double(double)>& f, std::vector<double> x) {
    TrainingSet set;
    set.x = std::move(x);
    for (const double v : set.x) set.target.push_back(f(v));
    return set;
}

std::vector<double> uneven_grid() { return {0.0, 0.07, 0.2, 0.31, 0.5, 0.52, 0.8, 0.93, 1.0}; }

TEST(EstimatorKind, NamesRoundTrip) {
    for (const auto k : {EstimatorKind::ann, EstimatorKind::mesh, EstimatorKind::exact}) {
        EXPECT_EQ(parse_estimator_kind(to_string(k)), k);
    }
    EXPECT_THROW(parse_estimator_kind("spline"), ConfigError);
    EXPECT_EQ(parse_interpolation("cubic"), Interpolation::cubic);
    EXPECT_THROW(parse_interpolation("quintic"), ConfigError);
}

TEST(MeshEstimator, StartsAsZero) {
    const MeshEstimator mesh(0.0, 2.0, Interpolation::cubic);
    EXPECT_EQ(mesh(1.3), 0.0);
    EXPECT_EQ(mesh.kind(), EstimatorKind::mesh);
}

TEST(MeshEstimator, LinearOrderReproducesLines) {
    MeshEstimator mesh(0.0, 1.0, Interpolation::linear);
    auto line = [](double x) { return 2.0 - 3.0 * x; };
    EXPECT_EQ(mesh.fit(sample(line, uneven_grid())).loss, 0.0);
    for (double x = 0.0; x <= 1.0; x += 0.01) {
        EXPECT_NEAR(mesh(x), line(x), 1e-14);
    }
}

TEST(MeshEstimator, CubicOrderReproducesCubics) {
    MeshEstimator mesh(0.0, 1.0, Interpolation::cubic);
    auto cubic = [](double x) { return 1.0 - x + 4.0 * x * x - 2.5 * x * x * x; };
    mesh.fit(sample(cubic, uneven_grid()));
    for (double x = 0.0; x <= 1.0; x += 0.005) {
        EXPECT_NEAR(mesh(x), cubic(x), 1e-13) << x;
    }
}

TEST(MeshEstimator, InterpolatesExactlyAtNodes) {
    MeshEstimator mesh(0.0, 1.0, Interpolation::cubic);
    const auto set = sample([](double x) { return std::exp(-3.0 * x); }, uneven_grid());
    mesh.fit(set);
    for (std::size_t k = 0; k < set.size(); ++k) {
        EXPECT_EQ(mesh(set.x[k]), set.target[k]);
    }
}

TEST(MeshEstimator, FitSortsAndPadsMissingEndpoints) {
    MeshEstimator mesh(0.0, 1.0, Interpolation::linear);
    mesh.fit(TrainingSet{{0.75, 0.25}, {3.0, 1.0}});
    EXPECT_EQ(mesh.grid(), (std::vector<double>{0.0, 0.25, 0.75, 1.0}));
    EXPECT_EQ(mesh.values(), (std::vector<double>{1.0, 1.0, 3.0, 3.0}));
    EXPECT_EQ(mesh(0.5), 2.0);
}

TEST(MeshEstimator, RejectsBadSamples) {
    MeshEstimator mesh(0.0, 1.0, Interpolation::cubic);
    EXPECT_THROW(mesh.fit(TrainingSet{{0.2, 0.2}, {1.0, 2.0}}), ConfigError);
    EXPECT_THROW(mesh.fit(TrainingSet{{0.2, 1.5}, {1.0, 2.0}}), ConfigError);
    EXPECT_THROW(mesh.fit(TrainingSet{}), ConfigError);
    EXPECT_THROW(MeshEstimator({0.0, 0.5, 0.4}, {1.0, 1.0, 1.0}, Interpolation::linear), ConfigError);
}

TEST(FluxEstimator, ClampsAndCountsOutOfDomainQueries) {
    const MeshEstimator mesh({0.0, 1.0}, {2.0, 4.0}, Interpolation::linear);
    EXPECT_EQ(mesh(-0.5), 2.0);
    EXPECT_EQ(mesh(1.0 + 1e-12), 4.0);
    EXPECT_EQ(mesh(0.5), 3.0);
    EXPECT_EQ(mesh.clamp_count(), 2u);
    const auto copy = mesh.clone();
    EXPECT_EQ(copy->clamp_count(), 0u);
    EXPECT_EQ((*copy)(0.25), 2.5);
}

TEST(FluxEstimator, BatchedEvaluationBeyondOneChunk) {
    const MeshEstimator mesh({0.0, 1.0}, {0.0, 1.0}, Interpolation::linear);
    std::vector<double> x(200);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = -0.5 + 2.0 * static_cast<double>(k) / 199.0;
    std::vector<double> out(x.size());
    mesh.evaluate(x, out);
    for (std::size_t k = 0; k < x.size(); ++k) {
        EXPECT_EQ(out[k], std::clamp(x[k], 0.0, 1.0));
    }
    EXPECT_THROW(mesh.evaluate(x, std::span<double>(out.data(), 3)), ConfigError);
}

TEST(ExactEstimator, FitReportsMisfitAndChangesNothing) {
    ExactEstimator exact(0.0, 1.0, [](double x) { return x * x; });
    const auto report = exact.fit(TrainingSet{{0.5, 1.0}, {0.25, 2.0}});
    EXPECT_DOUBLE_EQ(report.loss, 0.5);
    EXPECT_EQ(report.epochs, 0u);
    EXPECT_EQ(exact(0.5), 0.25);
    EXPECT_THROW(ExactEstimator(0.0, 1.0, {}), ConfigError);
}

AnnSettings small_settings() {
    AnnSettings s;
    s.widths = {1, 16, 8, 1};
    s.output = Activation::identity;
    s.adam.learning_rate = 1e-2;
    s.schedule.max_epochs = 3000;
    s.schedule.loss_target = 1e-5;
    return s;
}

TEST(AnnEstimator, FitsASmoothProfileOnAShiftedDomain) {
    auto settings = small_settings();
    settings.schedule.loss_target = 1e-6;
    settings.schedule.max_epochs = 20000;
    settings.schedule.patience = 0;
    AnnEstimator ann(2.0, 5.0, settings, 1);
    auto f = [](double x) { return std::exp(-(x - 2.0)); };
    std::vector<double> x;
    for (int k = 0; k <= 30; ++k) x.push_back(2.0 + 0.1 * k);
    const auto report = ann.fit(sample(f, x));
    EXPECT_LE(report.loss, 1e-6);
    EXPECT_GT(report.epochs, 0u);
    for (const double v : {2.0, 3.05, 4.4, 5.0}) {
        EXPECT_NEAR(ann(v), f(v), 5e-3);
    }
    EXPECT_EQ(ann.last_training().final_loss, report.loss);
    EXPECT_EQ(ann.optimizer().step, report.epochs);
}

TEST(AnnEstimator, StandaloneNetworkTakesRawCoordinates) {
    AnnEstimator ann(-1.0, 3.0, small_settings(), 9);
    const Mlp standalone = ann.standalone_network();
    for (const double x : {-1.0, 0.0, 1.7, 3.0}) {
        EXPECT_NEAR(standalone.forward(x), ann(x), 1e-14);
    }
    auto raw = small_settings();
    raw.normalize_input = false;
    AnnEstimator plain(0.0, 1.0, raw, 9);
    EXPECT_EQ(plain.standalone_network().forward(0.3), plain.network().forward(0.3));
}

TEST(AnnEstimator, WarmStartContinuesColdStartRedraws) {
    auto settings = small_settings();
    settings.schedule.max_epochs = 10;
    const auto set = sample([](double x) { return x; }, {0.0, 0.5, 1.0});

    AnnEstimator warm(0.0, 1.0, settings, 4);
    warm.fit(set);
    warm.fit(set);
    EXPECT_EQ(warm.optimizer().step, 20u);

    settings.cold_start = true;
    AnnEstimator cold(0.0, 1.0, settings, 4);
    cold.fit(set);
    cold.fit(set);
    EXPECT_EQ(cold.optimizer().step, 10u);
}

TEST(AnnEstimator, SameSeedSameResult) {
    const auto set = sample([](double x) { return std::cos(x); }, {0.0, 0.3, 0.6, 1.0});
    AnnEstimator a(0.0, 1.0, small_settings(), 21);
    AnnEstimator b(0.0, 1.0, small_settings(), 21);
    a.fit(set);
    b.fit(set);
    EXPECT_EQ(a(0.45), b(0.45));
}

}  // namespace
}  // namespace annmoc
