#include <benchmark/benchmark.h>

#include <chrono>
#include <vector>

#include "logrisk/eventize.hpp"
#include "logrisk/extrapolate.hpp"
#include "logrisk/ingest.hpp"
#include "logrisk/riskcurve.hpp"
#include "logrisk/synth.hpp"
#include "logrisk/tailfit.hpp"

namespace {

std::vector<double> pareto_costs(std::size_t n, std::uint64_t seed) {
    return logrisk::sample({logrisk::ParetoParams{1.0, 1.0}, n, seed});
}

void BM_HillAndAlec(benchmark::State& state) {
    const auto costs = pareto_costs(static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(logrisk::hill_alpha(costs, 1.0));
        benchmark::DoNotOptimize(logrisk::alec(costs));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_HillAndAlec)->Range(1 << 8, 1 << 16);

void BM_ThresholdAndSelect(benchmark::State& state) {
    const logrisk::CostDataset ds(pareto_costs(static_cast<std::size_t>(state.range(0)), 2), 10.0);
    for (auto _ : state) {
        const auto sel = logrisk::select_large(ds, logrisk::threshold_for_quantile(ds, 0.1));
        benchmark::DoNotOptimize(logrisk::fit_tail(sel));
    }
}
BENCHMARK(BM_ThresholdAndSelect)->Range(1 << 10, 1 << 16);

void BM_ClausetCmin(benchmark::State& state) {
    const logrisk::CostDataset ds(pareto_costs(static_cast<std::size_t>(state.range(0)), 3), 10.0);
    for (auto _ : state) benchmark::DoNotOptimize(logrisk::clauset_cmin(ds));
}
BENCHMARK(BM_ClausetCmin)->RangeMultiplier(4)->Range(1 << 8, 1 << 14)->Unit(benchmark::kMillisecond);

void BM_BoundedParetoMoments(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(logrisk::bounded_pareto_moments(0.75, 2.4, 240312.0, 384));
}
BENCHMARK(BM_BoundedParetoMoments);

void BM_FitTruncatedLognormal(benchmark::State& state) {
    const auto costs =
        logrisk::sample({logrisk::TruncLognormalParams{1.0, 1.5, 2.4, 240312.0},
                         static_cast<std::size_t>(state.range(0)), 4});
    for (auto _ : state) benchmark::DoNotOptimize(logrisk::fit_truncated_lognormal(costs, 2.4, 240312.0));
}
BENCHMARK(BM_FitTruncatedLognormal)->Range(1 << 8, 1 << 14);

void BM_GroupEvents(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto durations = pareto_costs(n, 5);
    const auto origin = *logrisk::parse_timestamp("2015-01-01T00:00");
    std::vector<logrisk::OutageRecord> records(n);
    for (std::size_t i = 0; i < n; ++i) {
        records[i].start = origin + std::chrono::minutes{static_cast<long long>(i) * 60};
        records[i].end = records[i].start + std::chrono::minutes{static_cast<long long>(durations[i] * 30.0) + 1};
        records[i].customers = 10 + static_cast<long long>(i % 500);
    }
    for (auto _ : state) benchmark::DoNotOptimize(logrisk::group_events(records));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GroupEvents)->Range(1 << 10, 1 << 16);

}  // namespace

BENCHMARK_MAIN();
