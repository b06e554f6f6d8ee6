#include "gammasum/distribution.hpp"
#include "gammasum/oracle.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

using namespace gammasum;

GammaSumParams bench_params() {
    return {1.5, ScaleVector({1.0, 0.7, 1.8, 0.4, 1.2}), CorrelationMatrix::exponential(5, 0.5)};
}

void BM_SampleParallel(benchmark::State& state) {
    const auto p = bench_params();
    for (auto _ : state) benchmark::DoNotOptimize(oracle::sample(p, static_cast<std::size_t>(state.range(0)), 1));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SampleSerial(benchmark::State& state) {
    const auto p = bench_params();
    for (auto _ : state) benchmark::DoNotOptimize(oracle::sample_serial(p, static_cast<std::size_t>(state.range(0)), 1));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

std::vector<double> grid(const GammaSumDistribution& d, std::size_t n) {
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = d.mean() * 4.0 * static_cast<double>(i + 1) / static_cast<double>(n);
    return ys;
}

void BM_GridParallel(benchmark::State& state) {
    const GammaSumDistribution d(bench_params());
    const auto ys = grid(d, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_grid(d, ys, Quantity::cdf));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_GridSerial(benchmark::State& state) {
    const GammaSumDistribution d(bench_params());
    const auto ys = grid(d, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_grid_serial(d, ys, Quantity::cdf));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_SampleParallel)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleSerial)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridParallel)->Arg(256)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridSerial)->Arg(256)->Arg(2048)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
