#include <benchmark/benchmark.h>

#include "cogfeed/analysis.hpp"
#include "cogfeed/sim.hpp"

namespace {

using namespace cogfeed;

TrialConfig make_config(BeamMode mode, IpcMode ipc) {
    TrialConfig cfg;
    cfg.params.b_cdi = BitBudget(12);
    cfg.params.a_ipc = BitBudget(4);
    cfg.mode = mode;
    cfg.ipc_mode = ipc;
    cfg.n_trials = 1;
    cfg.master_seed = 7;
    return cfg;
}

void BM_TrialOcbPerfectIpc(benchmark::State& state) {
    CodebookCache cache;
    const TrialConfig cfg = make_config(BeamMode::kOcb, IpcMode::kPerfect);
    const CodebookSet set = prepare_codebooks(cfg, cache);
    long idx = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_trial(cfg, set, idx++));
    }
}
BENCHMARK(BM_TrialOcbPerfectIpc);

void BM_TrialNocbQuantizedIpc(benchmark::State& state) {
    CodebookCache cache;
    const TrialConfig cfg = make_config(BeamMode::kNocb, IpcMode::kQuantized);
    const CodebookSet set = prepare_codebooks(cfg, cache);
    long idx = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_trial(cfg, set, idx++));
    }
}
BENCHMARK(BM_TrialNocbQuantizedIpc);

void BM_CdiQuantization(benchmark::State& state) {
    SplitMix64 rng(17);
    const CVec s_x = unit_uniform_sphere(4, rng);
    const CVec s_s = unit_uniform_sphere(4, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(quantize_cdi_statistical(s_x, s_s, BitBudget(12), rng));
    }
}
BENCHMARK(BM_CdiQuantization);

void BM_CodebookBuild(benchmark::State& state) {
    SystemParams p;
    p.b_cdi = BitBudget(12);
    p.a_ipc = BitBudget(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_ipc_codebook(p, IpcQuantity::kEta, 100000, 3));
    }
}
BENCHMARK(BM_CodebookBuild)->Arg(2)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_FirstOrderOutage(benchmark::State& state) {
    SystemParams p;
    for (auto _ : state) {
        benchmark::DoNotOptimize(su_outage_first_order(p, BitBudget(16)));
    }
}
BENCHMARK(BM_FirstOrderOutage);

void BM_Estimate10k(benchmark::State& state) {
    CodebookCache cache;
    TrialConfig cfg = make_config(BeamMode::kOcb, IpcMode::kPerfect);
    cfg.n_trials = 10000;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            estimate_outage(cfg, cache, static_cast<int>(state.range(0))));
    }
}
BENCHMARK(BM_Estimate10k)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
