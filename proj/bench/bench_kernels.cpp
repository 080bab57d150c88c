// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "fracdrift/fields.hpp"
#include "fracdrift/radial_fraclap.hpp"
#include "fracdrift/simulator.hpp"

using namespace fracdrift;

namespace {

void BM_AssembleSerial(benchmark::State& state) {
    const int M = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(assemble_operator_serial(0.5, 10.0, M));
}

void BM_AssembleParallel(benchmark::State& state) {
    const int M = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(assemble_operator(0.5, 10.0, M));
}

void BM_QuadratureSweepSerial(benchmark::State& state) {
    const auto w = RadialProfile::psi_beta(1.5);
    const auto radii = log_grid(0.1, 100.0, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(fraclap_quadrature_sweep_serial(2, 0.5, w, radii));
}

void BM_QuadratureSweepParallel(benchmark::State& state) {
    const auto w = RadialProfile::psi_beta(1.5);
    const auto radii = log_grid(0.1, 100.0, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(fraclap_quadrature_sweep(2, 0.5, w, radii));
}

}  // namespace

BENCHMARK(BM_AssembleSerial)->Arg(401)->Arg(1601)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleParallel)->Arg(401)->Arg(1601)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_QuadratureSweepSerial)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_QuadratureSweepParallel)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
