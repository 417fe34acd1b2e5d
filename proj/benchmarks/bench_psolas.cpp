// Copyright 2026 The psolas-sim Authors.
// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "psolas/montecarlo.hpp"
#include "psolas/sorter.hpp"

namespace {

using namespace psolas;

void BM_BestMatch(benchmark::State& st)
{
    const auto side = st.range(0);
    auto geo = LatticeGeometry::square(side);
    RngStream rng(1);
    auto state = sample_initial_filling(geo, geo.bounds(), 0.6, rng);
    auto target = TargetPattern::centered_square(geo, side * 31 / 100);
    std::vector<SiteVector> atoms;
    for (const auto& a : state.atoms())
        if (!target.contains(a.true_site))
            atoms.push_back(a.true_site);
    auto holes = defects(state, target);
    for (auto _ : st)
        benchmark::DoNotOptimize(best_match_translation(atoms, holes));
    st.counters["atoms"] = static_cast<double>(atoms.size());
    st.counters["defects"] = static_cast<double>(holes.size());
}
BENCHMARK(BM_BestMatch)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Iteration(benchmark::State& st)
{
    auto sc = Scenario::preset_b();
    auto geo = sc.geometry();
    auto target = sc.target();
    std::uint64_t seed = 0;
    for (auto _ : st)
    {
        st.PauseTiming();
        RngStream rng(seed++);
        auto state = sample_initial_filling(geo, geo.bounds(), sc.alpha, rng);
        RegisterOps ops(sc.errors, sc.timing, rng);
        st.ResumeTiming();
        benchmark::DoNotOptimize(psolas_iteration(state, target, ops));
    }
}
BENCHMARK(BM_Iteration)->Unit(benchmark::kMillisecond);

void BM_Ensemble(benchmark::State& st)
{
    auto sc = Scenario::preset_b();
    for (auto _ : st)
        benchmark::DoNotOptimize(run_ensemble(sc, static_cast<std::size_t>(st.range(0)), 1, 1));
}
BENCHMARK(BM_Ensemble)->Arg(20)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
