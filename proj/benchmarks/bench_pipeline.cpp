#include <benchmark/benchmark.h>

#include "ctsid/estimator.hpp"
#include "ctsid/experiment.hpp"
#include "ctsid/loop_sim.hpp"

using namespace ctsid;

namespace {

ScenarioConfig scenario(const char* preset, int n_samples) {
    ScenarioConfig cfg = preset_scenario(preset);
    cfg.n_samples = n_samples;
    return cfg;
}

}  // namespace

static void BM_SimulateDtLoop(benchmark::State& state) {
    const ScenarioConfig cfg = scenario("paper-setting2", static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate(cfg));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateDtLoop)->Arg(10000)->Arg(100000);

static void BM_SimulateCtLoop(benchmark::State& state) {
    // Continuous controller; the fast-track factor multiplies the internal
    // grid density.
    ScenarioConfig cfg = scenario("paper-setting1", 10000);
    cfg.oversample_m = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate(cfg));
    }
    state.SetItemsProcessed(state.iterations() * 10000 * state.range(0));
}
BENCHMARK(BM_SimulateCtLoop)->Arg(1)->Arg(10)->Arg(100);

static void BM_RefinementStep(benchmark::State& state) {
    // One regressor + instrument build and normal-equation solve at the true
    // parameters: the per-iteration cost of the estimators.
    const ScenarioConfig cfg = scenario("paper-setting2", static_cast<int>(state.range(0)));
    const SampledRecord rec = simulate(cfg);
    EstimatorConfig ecfg;
    ecfg.n = 2;
    ecfg.m = 1;
    const ThetaVector theta = ThetaVector::from_tf(cfg.plant, 2, 1);
    for (auto _ : state) {
        const Regressor reg = build_regressor(rec, theta, ecfg);
        const Eigen::MatrixXd phi_hat =
            build_instrument(rec, theta, ecfg, InstrumentKind::reference_dt_sensitivity);
        benchmark::DoNotOptimize(iv_step(phi_hat, reg, ecfg.n, ecfg.m));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RefinementStep)->Arg(10000)->Arg(100000);

static void BM_Estimate(benchmark::State& state) {
    const ScenarioConfig cfg = scenario("paper-setting2", static_cast<int>(state.range(0)));
    const SampledRecord rec = simulate(cfg);
    EstimatorConfig ecfg;
    ecfg.n = 2;
    ecfg.m = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(estimate(rec, ecfg, InstrumentKind::reference_dt_sensitivity));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Estimate)->Arg(2000)->Arg(20000);

BENCHMARK_MAIN();
