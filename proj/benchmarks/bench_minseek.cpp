// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "minseek/controller/controller.hpp"

using namespace minseek;

namespace {

ModelConfig bench_config() {
    ModelConfig cfg;
    cfg.max_context_length = 4096;
    return cfg;
}

void BM_ForwardStep(benchmark::State& state) {
    const ModelConfig cfg = bench_config();
    const Model model(cfg, 7);
    const auto rows = static_cast<std::size_t>(state.range(0));
    DualKvCache cache(CacheShape::from_model(cfg));
    cache.materialize_all();
    for (std::size_t i = 0; i < rows; ++i) {
        model.forward_step(static_cast<TokenId>(i % 200), cache);
    }
    for (auto _ : state) {
        state.PauseTiming();
        DualKvCache copy = cache;
        state.ResumeTiming();
        benchmark::DoNotOptimize(model.forward_step(5, copy));
    }
    state.counters["rows"] = static_cast<double>(rows);
}
BENCHMARK(BM_ForwardStep)->Arg(32)->Arg(96)->Arg(512)->Arg(2048);

void BM_MaterializeAll(benchmark::State& state) {
    const ModelConfig cfg = bench_config();
    const Model model(cfg, 7);
    DualKvCache cache(CacheShape::from_model(cfg));
    cache.materialize_all();
    for (std::int64_t i = 0; i < state.range(0); ++i) {
        model.forward_step(static_cast<TokenId>(i % 200), cache);
    }
    for (auto _ : state) {
        cache.discard_materialized();
        cache.materialize_all();
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MaterializeAll)->Arg(32)->Arg(96);

void BM_Generate(benchmark::State& state, Method method) {
    const ModelConfig cfg = bench_config();
    const Model model(cfg, 7);
    ScalingPolicy p;
    p.method = method;
    p.max_rc = static_cast<std::size_t>(state.range(0));
    const Script script = Script::from_lengths(std::vector<std::size_t>(p.max_rc.value() + 1, 16));
    const std::vector<TokenId> prompt{1, 2, 3, 4};
    RunOptions o;
    o.trace_tokens = false;
    o.record_costs = false;
    std::size_t tokens = 0;
    for (auto _ : state) {
        DualKvCache cache(CacheShape::from_model(cfg));
        ScriptedSource source(script, cfg);
        tokens += run_generation(model, cache, prompt, p, source, o).stats.tokens_generated;
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(tokens));
}
BENCHMARK_CAPTURE(BM_Generate, minseek, Method::kMinSeek)->Arg(10)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Generate, budget, Method::kBudgetForcing)->Arg(10)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
