#include <benchmark/benchmark.h>

#include "m3s/gaf.hpp"
#include "m3s/preprocess.hpp"
#include "m3s/synth.hpp"

using namespace m3s;

namespace {

const Dataset& bench_dataset() {
    static const Dataset data = [] {
        SynthConfig config = default_synth_config();
        for (auto& cls : config.classes) cls.count = 4;
        return synth_generate(config, 1);
    }();
    return data;
}

}  // namespace

static void BM_Rescale(benchmark::State& state) {
    const auto& values = bench_dataset().samples[0].values;
    for (auto _ : state) {
        auto out = rescale(values);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_Rescale);

static void BM_Paa(benchmark::State& state) {
    const auto scaled = rescale(bench_dataset().samples[0].values);
    for (auto _ : state) {
        auto out = paa(scaled, static_cast<std::size_t>(state.range(0)));
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_Paa)->Arg(32)->Arg(64)->Arg(128);

static void BM_Encode(benchmark::State& state) {
    const auto& spec = bench_dataset().samples[0];
    const auto scale = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        auto image = encode(spec, scale);
        benchmark::DoNotOptimize(image);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Encode)->Arg(32)->Arg(64)->Arg(128);

static void BM_SynthGenerate(benchmark::State& state) {
    SynthConfig config = default_synth_config();
    for (auto& cls : config.classes) {
        cls.count = static_cast<std::size_t>(state.range(0));
    }
    for (auto _ : state) {
        auto data = synth_generate(config, 1);
        benchmark::DoNotOptimize(data);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * kNumSubtypes);
}
BENCHMARK(BM_SynthGenerate)->Arg(10)->Arg(50);
