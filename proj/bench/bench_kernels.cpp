#include <benchmark/benchmark.h>

#include <cmath>

#include "mlchaos/diagnostics.hpp"
#include "mlchaos/flow.hpp"
#include "mlchaos/singular_limit.hpp"

using namespace mlchaos;

namespace {

ModelParams strong_saddle() {
    ModelParams p;
    p.c = 0.6;
    p.e = 0.2;
    p.omega = 0.3;
    p.gamma = 0.01;
    return p;
}

Execution mode(const benchmark::State& state) {
    return state.range(0) ? Execution::Parallel : Execution::Serial;
}

void BM_DensityScan(benchmark::State& state) {
    std::vector<double> grid;
    for (int i = 1; i <= 16; ++i) grid.push_back(1e-6 * std::pow(5e4, i / 16.0));
    ScanOptions o;
    o.iterations = 10000;
    o.burn_in = 500;
    o.zo_length = 1000;
    o.n_c = 16;
    for (auto _ : state) benchmark::DoNotOptimize(density_scan(grid, strong_saddle(), o, mode(state)));
}

void BM_CertifyOffsets(benchmark::State& state) {
    std::vector<double> offs;
    for (int j = 0; j < 16; ++j) offs.push_back(j / 16.0);
    MisiurewiczOptions m;
    m.horizon = 300;
    m.samples = 512;
    for (auto _ : state) benchmark::DoNotOptimize(certify_offsets(strong_saddle(), offs, m, mode(state)));
}

void BM_IntegrateBatch(benchmark::State& state) {
    std::vector<FlowState> starts;
    for (int i = 0; i < 32; ++i) starts.push_back({0.05 + 0.025 * i, 0.3, 0.2, 0.0});
    for (auto _ : state)
        benchmark::DoNotOptimize(integrate_batch(starts, 200, strong_saddle(), {}, mode(state)));
}

}  // namespace

// Argument 0 runs the serial reference loop, 1 the OpenMP kernel.
BENCHMARK(BM_DensityScan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CertifyOffsets)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_IntegrateBatch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
