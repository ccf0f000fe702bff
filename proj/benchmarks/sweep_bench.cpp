#include <annmoc/problems.hpp>
#include <annmoc/quadrature.hpp>
#include <annmoc/solver.hpp>

#include <benchmark/benchmark.h>

namespace {

using namespace annmoc;

void BM_GaussLegendre(benchmark::State& state) {
    for (auto _ : state) {
        const AngularQuadrature rule = gauss_legendre(static_cast<std::size_t>(state.range(0)));
        benchmark::DoNotOptimize(rule.weights.data());
    }
}
BENCHMARK(BM_GaussLegendre)->Arg(10)->Arg(100);

void BM_MocIntensity(benchmark::State& state) {
    const auto problem = to_transport(ManufacturedProblem{});
    const AnnEstimator ann(0.0, 1.0, AnnSettings{}, 1);
    const auto point = path_length(0.7, state.range(0) / 1000.0, problem);
    for (auto _ : state) {
        benchmark::DoNotOptimize(moc_intensity(point, ann, problem));
    }
}
BENCHMARK(BM_MocIntensity)->Arg(900)->Arg(50)->Arg(-3);

template <EstimatorKind Kind>
void BM_Sweep(benchmark::State& state) {
    const auto problem = to_transport(ManufacturedProblem{});
    std::unique_ptr<FluxEstimator> estimator;
    if constexpr (Kind == EstimatorKind::ann) {
        estimator = std::make_unique<AnnEstimator>(0.0, 1.0, AnnSettings{}, 1);
    } else {
        estimator = std::make_unique<MeshEstimator>(0.0, 1.0, Interpolation::cubic);
        const auto x = uniform_samples(101, 0.0, 1.0);
        TrainingSet set{x, std::vector<double>(x.size())};
        for (std::size_t k = 0; k < x.size(); ++k) set.target[k] = std::exp(-3.0 * x[k]);
        estimator->fit(set);
    }
    const auto quad = gauss_legendre(static_cast<std::size_t>(state.range(0)), ZeroNode::reject);
    const auto samples = uniform_samples(101, 0.0, 1.0);
    for (auto _ : state) {
        const FluxSamples out = sweep(problem, quad, *estimator, samples);
        benchmark::DoNotOptimize(out.psi.data());
    }
}
BENCHMARK(BM_Sweep<EstimatorKind::ann>)->Name("BM_SweepAnn")->Arg(16)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sweep<EstimatorKind::mesh>)->Name("BM_SweepMesh")->Arg(16)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
