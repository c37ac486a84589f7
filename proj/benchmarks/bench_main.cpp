#include "sepsikit/chain.hpp"
#include "sepsikit/corpus.hpp"
#include "sepsikit/forecast.hpp"
#include "sepsikit/sofa.hpp"
#include "sepsikit/verbalize.hpp"

#include "support/synthetic.hpp"

#include <benchmark/benchmark.h>

using namespace sepsikit;

namespace {

WorstValues example_worst() {
    WorstValues w;
    w.gcs_eye = 4.0;
    w.gcs_motor = 6.0;
    w.gcs_verbal = 1.0;
    w.map_min = 55.333;
    w.dopamine_max = 0.0;
    w.pao2_min = 100.0;
    w.fio2_min = 0.5;
    w.platelets_min = 310.0;
    w.bilirubin_max = 1.0;
    w.creatinine_max = 0.4;
    w.urine_total = 1095.0;
    w.weight_kg = 62.8;
    return w;
}

std::vector<StayWindow> bench_windows(std::size_t n) {
    Rng rng(1);
    return synth::make_windows(rng, n, 2, 2);
}

} // namespace

static void BM_ScoreSofa(benchmark::State& state) {
    const WorstValues w = example_worst();
    for (auto _ : state) {
        SofaSnapshot s = score_sofa(w);
        benchmark::DoNotOptimize(s.total);
    }
}
BENCHMARK(BM_ScoreSofa);

static void BM_WorstValues(benchmark::State& state) {
    const auto windows = bench_windows(8);
    Demographics demo = windows.front().demographics;
    for (auto _ : state) {
        for (const auto& window : windows) {
            WorstValues w = worst_values(window.observation, demo);
            benchmark::DoNotOptimize(w.map_min);
        }
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(windows.size()));
}
BENCHMARK(BM_WorstValues);

static void BM_LabelWindow(benchmark::State& state) {
    const auto windows = bench_windows(8);
    for (auto _ : state) {
        for (const auto& window : windows) {
            WindowLabel label = label_window(window);
            benchmark::DoNotOptimize(label.verdict.septic);
        }
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(windows.size()));
}
BENCHMARK(BM_LabelWindow);

static void BM_VerbalizeChain(benchmark::State& state) {
    const auto windows = bench_windows(4);
    std::vector<WindowLabel> labels;
    for (const auto& window : windows) labels.push_back(label_window(window));
    for (auto _ : state) {
        for (const auto& label : labels) {
            std::string text = verbalize_chain(label.current, label.future, label.verdict);
            benchmark::DoNotOptimize(text.data());
        }
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(labels.size()));
}
BENCHMARK(BM_VerbalizeChain);

static void BM_ParseChain(benchmark::State& state) {
    const auto windows = bench_windows(1);
    const WindowLabel label = label_window(windows.front());
    const std::string text = verbalize_chain(label.current, label.future, label.verdict);
    for (auto _ : state) {
        InferenceChain chain = parse_chain(text);
        benchmark::DoNotOptimize(chain.complete);
    }
    state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(text.size()));
}
BENCHMARK(BM_ParseChain);

static void BM_CheckDerivation(benchmark::State& state) {
    const auto windows = bench_windows(1);
    const WindowLabel label = label_window(windows.front());
    const InferenceChain chain =
        parse_chain(verbalize_chain(label.current, label.future, label.verdict));
    ChainContext ctx;
    ctx.suspected_infection = label.verdict.suspected_infection;
    for (auto _ : state) {
        auto result = check_derivation(chain, ctx);
        benchmark::DoNotOptimize(result.size());
    }
}
BENCHMARK(BM_CheckDerivation);

static void BM_PersistenceForecast(benchmark::State& state) {
    const auto windows = bench_windows(4);
    for (auto _ : state) {
        for (const auto& window : windows) {
            ForecastGrid grid = persistence_forecast(window.observation);
            benchmark::DoNotOptimize(grid.values.data());
        }
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(windows.size()));
}
BENCHMARK(BM_PersistenceForecast);

BENCHMARK_MAIN();
