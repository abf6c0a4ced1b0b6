#include <benchmark/benchmark.h>

#include <cstdint>

#include "ctsid/discretize.hpp"
#include "ctsid/experiment.hpp"
#include "ctsid/hybrid_filter.hpp"
#include "ctsid/rng.hpp"
#include "ctsid/signal.hpp"

using namespace ctsid;

namespace {

SampledSignal white_signal(int n, double h) {
    SampledSignal x;
    x.h = h;
    x.values.reserve(static_cast<size_t>(n));
    const CounterRng rng(derive_seed(42, 0, 0));
    for (int k = 0; k < n; ++k) x.values.push_back(rng.gaussian(static_cast<uint64_t>(k)));
    return x;
}

const CtTransferFunction& plant() {
    static const CtTransferFunction g = preset_scenario("paper-setting2").plant;
    return g;
}

}  // namespace

static void BM_FilterSampled(benchmark::State& state) {
    const SampledSignal x = white_signal(static_cast<int>(state.range(0)), 0.1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(filter_sampled(plant(), x));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FilterSampled)->Arg(1000)->Arg(10000)->Arg(100000);

static void BM_DerivativeBank(benchmark::State& state) {
    const SampledSignal x = white_signal(static_cast<int>(state.range(0)), 0.1);
    const CtPolynomial a({1.0, 0.707, 0.5});
    for (auto _ : state) {
        benchmark::DoNotOptimize(derivative_bank(a, x));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DerivativeBank)->Arg(1000)->Arg(10000)->Arg(100000);

static void BM_DerivativeBankFast(benchmark::State& state) {
    // Fixed slow grid of 2000 samples, fast track m times denser; the bank
    // streams the fast samples and keeps every m-th output.
    const int m = static_cast<int>(state.range(0));
    const SampledSignal x_fast = white_signal(2000 * m, 0.1 / m);
    const CtPolynomial a({1.0, 0.707, 0.5});
    for (auto _ : state) {
        benchmark::DoNotOptimize(derivative_bank_fast(a, x_fast, m));
    }
    state.SetItemsProcessed(state.iterations() * 2000 * m);
}
BENCHMARK(BM_DerivativeBankFast)->Arg(1)->Arg(10)->Arg(100);

static void BM_C2dZoh(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(c2d_zoh(plant(), 0.1));
    }
}
BENCHMARK(BM_C2dZoh);

BENCHMARK_MAIN();
