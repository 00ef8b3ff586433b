#include <benchmark/benchmark.h>

#include "pnt/correlation.hpp"
#include "pnt/distributions.hpp"
#include "pnt/fit_percentile.hpp"
#include "pnt/fit_pwm.hpp"
#include "pnt/sampler.hpp"

namespace {

void BM_NormalPwmMatrix(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(pnt::normal_pwm_matrix(n));
}
BENCHMARK(BM_NormalPwmMatrix)->Arg(6)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_FitPwmBeta(benchmark::State& state) {
    const int degree = static_cast<int>(state.range(0));
    const auto d = pnt::parse_distribution("beta:2,2");
    const auto m = pnt::normal_pwm_matrix(degree + 1);
    for (auto _ : state) {
        const auto target = pnt::pwm_from_distribution(d, degree + 1);
        benchmark::DoNotOptimize(pnt::fit_pwm(target, m));
    }
}
BENCHMARK(BM_FitPwmBeta)->Arg(5)->Arg(11)->Unit(benchmark::kMillisecond);

void BM_FitPercentile(benchmark::State& state) {
    const auto d = pnt::parse_distribution("gumbel:0,1");
    pnt::NodePlan plan;
    plan.alpha = 1e-4;
    for (auto _ : state) benchmark::DoNotOptimize(pnt::fit_percentile(d, static_cast<int>(state.range(0)), plan));
}
BENCHMARK(BM_FitPercentile)->Arg(11)->Arg(19)->Unit(benchmark::kMillisecond);

pnt::PolynomialModel lognormal_model() {
    return pnt::fit_percentile(pnt::parse_distribution("lognormal:0,1"), 11).model;
}

void BM_SolveRhoZ(benchmark::State& state) {
    const auto model = lognormal_model();
    const auto rp = pnt::build_rho_polynomial(model, model);
    for (auto _ : state) benchmark::DoNotOptimize(pnt::solve_rho_z(rp, 0.5));
}
BENCHMARK(BM_SolveRhoZ);

void BM_Generate(benchmark::State& state) {
    const auto model = lognormal_model();
    const pnt::Matrix rx{{1.0, 0.5, 0.3}, {0.5, 1.0, 0.2}, {0.3, 0.2, 1.0}};
    const auto vm = pnt::make_vector_model({model, model, model}, rx);
    const auto count = static_cast<std::size_t>(state.range(0));
    const auto threads = static_cast<unsigned>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(pnt::generate(vm, count, {42, 0}, threads));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * count));
}
BENCHMARK(BM_Generate)->Args({100000, 1})->Args({100000, 0})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
