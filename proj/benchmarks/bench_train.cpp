#include <benchmark/benchmark.h>

#include "m3s/model.hpp"
#include "m3s/synth.hpp"

using namespace m3s;

namespace {

Dataset bench_dataset(std::size_t per_class) {
    SynthConfig config = default_synth_config();
    for (auto& cls : config.classes) cls.count = per_class;
    return synth_generate(config, 1);
}

}  // namespace

// One epoch of per-sample SGD at the default 32+64 scales.
static void BM_TrainEpoch(benchmark::State& state) {
    const Dataset data = bench_dataset(static_cast<std::size_t>(state.range(0)));
    TrainConfig config;
    config.epochs = 1;
    config.seed = 1;
    for (auto _ : state) {
        auto result = train(data, config);
        benchmark::DoNotOptimize(result);
    }
    state.SetItemsProcessed(state.iterations() * data.size());
}
BENCHMARK(BM_TrainEpoch)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_Predict(benchmark::State& state) {
    const Dataset data = bench_dataset(2);
    TrainConfig config;
    config.epochs = 1;
    config.seed = 1;
    const TrainResult result = train(data, config);
    for (auto _ : state) {
        auto pred = predict(result.model, data.samples[0]);
        benchmark::DoNotOptimize(pred);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Predict)->Unit(benchmark::kMillisecond);
