#include <benchmark/benchmark.h>

#include <random>

#include "splitann/adsgeom.hpp"
#include "splitann/curves.hpp"
#include "splitann/forms.hpp"
#include "splitann/liouville.hpp"

using namespace splitann;

namespace {

const Box kBox{1.0, 2.0, -1.0, 0.0};

ScalarField bump_pair() {
    return ScalarField::bump(1.45, -0.5, 0.3, 0.3, 0.4) + ScalarField::bump(1.6, -0.4, 0.25, 0.3, -0.3);
}

void BM_FieldJet(benchmark::State& state) {
    const ScalarField u = bump_pair();
    double x = 1.4;
    for (auto _ : state) {
        benchmark::DoNotOptimize(eval_field(u, {x, -0.5}));
        x = x < 1.6 ? x + 1e-6 : 1.4;
    }
}
BENCHMARK(BM_FieldJet);

void BM_Action(benchmark::State& state) {
    const SplitMetric g0 = SplitMetric::desitter();
    const SplitMetric h = g0.scaled(bump_pair());
    const QuadratureGrid grid = QuadratureGrid::rectangle(kBox, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(action(g0, h, grid).value);
    state.SetComplexityN(static_cast<int64_t>(grid.nx() * grid.ny()));
}
BENCHMARK(BM_Action)->DenseRange(0, 3)->Unit(benchmark::kMillisecond)->Complexity();

void BM_UniformizingAction(benchmark::State& state) {
    const CircleMap phi = CircleMap::sine(0.3, 2);
    for (auto _ : state) benchmark::DoNotOptimize(uniformizing_action(phi, static_cast<int>(state.range(0))).value);
}
BENCHMARK(BM_UniformizingAction)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_EpsteinLift(benchmark::State& state) {
    const IsotropicSurface s(SplitMetric::desitter(bump_pair()));
    for (auto _ : state) benchmark::DoNotOptimize(epstein_lift(s, 1.5, -0.5));
}
BENCHMARK(BM_EpsteinLift);

void BM_FundamentalEquations(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const auto F = random_point(Manifold::Frames, rng);
    const std::vector<Eigen::VectorXd> fv{random_tangent(Manifold::Frames, F, rng),
                                          random_tangent(Manifold::Frames, F, rng)};
    const auto P = random_point(Manifold::UnitTangent, rng);
    const std::vector<Eigen::VectorXd> uv{random_tangent(Manifold::UnitTangent, P, rng),
                                          random_tangent(Manifold::UnitTangent, P, rng),
                                          random_tangent(Manifold::UnitTangent, P, rng)};
    for (auto _ : state) benchmark::DoNotOptimize(fundamental_equations_residual(F, fv, P, uv, 1e-3));
}
BENCHMARK(BM_FundamentalEquations)->Unit(benchmark::kMicrosecond);

void BM_CrossratioDensity(benchmark::State& state) {
    const Crossratio b = po22_crossratio(CircleMap::sine(0.3, 2));
    for (auto _ : state) benchmark::DoNotOptimize(crossratio_metric_density(b, {0.4, 2.1}));
}
BENCHMARK(BM_CrossratioDensity);

void BM_CurveAction(benchmark::State& state) {
    PositiveCurve c;
    c.phi = CircleMap::sine(0.3, 2);
    for (auto _ : state) benchmark::DoNotOptimize(curve_action(c, static_cast<int>(state.range(0)), {}, false).action.value);
}
BENCHMARK(BM_CurveAction)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
