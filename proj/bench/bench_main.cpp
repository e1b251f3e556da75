#include "bfgraph/convolution.hpp"
#include "bfgraph/experiments.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

using namespace bfgraph;

namespace {

std::vector<double> geometric_profile(std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = 0.3 * std::exp(-0.01 * static_cast<double>(j)) / (j + 1.0);
    return x;
}

void bm_reference(benchmark::State& state) {
    const auto x = geometric_profile(state.range(0));
    std::vector<double> out(x.size());
    for (auto _ : state) {
        self_convolve_reference(x, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void bm_openmp(benchmark::State& state) {
    const auto x = geometric_profile(state.range(0));
    std::vector<double> out(x.size());
    for (auto _ : state) {
        self_convolve_openmp(x, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void bm_fft(benchmark::State& state) {
    const auto x = geometric_profile(state.range(0));
    std::vector<double> out(x.size());
    FftConvolver conv(x.size());
    for (auto _ : state) {
        conv(x, out);
        benchmark::DoNotOptimize(out.data());
    }
}

EnsembleConfig ensemble_config() {
    EnsembleConfig c;
    c.rule = ProcessRule::bohman_frieze();
    c.n_list = {100000};
    c.replicas = 8;
    c.base_seed = 1;
    c.checkpoints = {0.5, 1.0, 1.3};
    c.campaign = "bench";
    return c;
}

void bm_ensemble_serial(benchmark::State& state) {
    const EnsembleConfig c = ensemble_config();
    for (auto _ : state) benchmark::DoNotOptimize(run_ensemble_serial(c));
}

void bm_ensemble_parallel(benchmark::State& state) {
    EnsembleConfig c = ensemble_config();
    c.threads = 0;
    for (auto _ : state) benchmark::DoNotOptimize(run_ensemble(c));
}

} // namespace

BENCHMARK(bm_reference)->RangeMultiplier(4)->Range(256, 16384)->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_openmp)->RangeMultiplier(4)->Range(256, 16384)->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_fft)->RangeMultiplier(4)->Range(256, 16384)->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_ensemble_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_ensemble_parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
