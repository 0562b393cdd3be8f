#include <cmath>

#include <benchmark/benchmark.h>

#include "pqfi/dist.hpp"
#include "pqfi/optimize.hpp"
#include "pqfi/report.hpp"

using namespace pqfi;

static void BM_SumGeometric(benchmark::State& state) {
  // Mean photon number N = range, mu = 1 / (1 + N).
  const double mu = 1.0 / (1.0 + static_cast<double>(state.range(0)));
  const Pmf pmf = make_pmf(DistributionSpec(family::Geometric{mu}));
  for (auto _ : state) benchmark::DoNotOptimize(moments_by_summation(pmf));
}
BENCHMARK(BM_SumGeometric)->RangeMultiplier(10)->Range(10, 10000);

static void BM_SumSqueezed(benchmark::State& state) {
  const double N = static_cast<double>(state.range(0));
  const Pmf pmf = make_pmf(DistributionSpec(family::SqueezedVacuum{std::asinh(std::sqrt(N))}));
  for (auto _ : state) benchmark::DoNotOptimize(moments_by_summation(pmf));
}
BENCHMARK(BM_SumSqueezed)->RangeMultiplier(10)->Range(1, 1000);

static void BM_SumZetaTail(benchmark::State& state) {
  const Pmf pmf = make_pmf(DistributionSpec(family::Zeta{3.5}));
  for (auto _ : state) benchmark::DoNotOptimize(moments_by_summation(pmf));
}
BENCHMARK(BM_SumZetaTail);

static void BM_SumZetaDivergent(benchmark::State& state) {
  TruncationConfig cfg;
  cfg.use_analytic_flags = false;
  const Pmf pmf = make_pmf(DistributionSpec(family::Zeta{2.5}));
  for (auto _ : state) benchmark::DoNotOptimize(moments_by_summation(pmf, cfg));
}
BENCHMARK(BM_SumZetaDivergent);

static void BM_MaximizeVariance(benchmark::State& state) {
  const auto M = static_cast<std::int64_t>(state.range(0));
  const OptimizationProblem prob{0, M, 0.3 * static_cast<double>(M)};
  for (auto _ : state) benchmark::DoNotOptimize(maximize_variance(prob));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MaximizeVariance)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

static void BM_BruteForce(benchmark::State& state) {
  const OptimizationProblem prob{0, 12, 4.3};
  BruteForceOptions opt;
  opt.random_samples = 200;
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_variance(prob, opt));
}
BENCHMARK(BM_BruteForce)->Unit(benchmark::kMillisecond);

static void BM_Figure1Csv(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(serialize(figure1_dataset(7.46, state.range(0)), Format::Csv));
}
BENCHMARK(BM_Figure1Csv)->Arg(100)->Arg(3500)->Unit(benchmark::kMicrosecond);

static void BM_ScalingFit(benchmark::State& state) {
  const auto sweep = log_spaced(1e2, 1e4, 25);
  const SpecTemplate tmpl = mean_template("logarithmic");
  for (auto _ : state) benchmark::DoNotOptimize(fit_scaling_exponent(tmpl, sweep));
}
BENCHMARK(BM_ScalingFit);
BENCHMARK_MAIN();
