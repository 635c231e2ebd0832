#include <benchmark/benchmark.h>

#include "m3s/layers.hpp"
#include "m3s/rng.hpp"

using namespace m3s;

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, std::uint64_t seed) {
    Tensor t(std::move(shape));
    Rng rng(seed);
    for (double& v : t.data) v = rng.uniform(-1.0, 1.0);
    return t;
}

}  // namespace

// The second conv of the 64-scale branch dominates the per-sample cost.
static void BM_Conv2dForward(benchmark::State& state) {
    const auto size = static_cast<std::size_t>(state.range(0));
    const Tensor input = random_tensor({8, size, size}, 1);
    const Tensor weights = random_tensor({16, 8, 5, 5}, 2);
    const Tensor bias = random_tensor({16}, 3);
    for (auto _ : state) {
        auto out = conv2d_forward(input, weights, bias, 1, 2);
        benchmark::DoNotOptimize(out);
    }
    const std::size_t macs = 16 * size * size * 8 * 25;
    state.counters["GMAC/s"] = benchmark::Counter(
        static_cast<double>(macs * state.iterations()) * 1e-9,
        benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Conv2dForward)->Arg(16)->Arg(32)->Arg(64);

static void BM_Conv2dBackward(benchmark::State& state) {
    const auto size = static_cast<std::size_t>(state.range(0));
    const Tensor input = random_tensor({8, size, size}, 1);
    const Tensor weights = random_tensor({16, 8, 5, 5}, 2);
    const Tensor bias = random_tensor({16}, 3);
    const Tensor upstream = random_tensor({16, size, size}, 4);
    std::vector<double> gw(weights.numel()), gb(bias.numel());
    for (auto _ : state) {
        std::fill(gw.begin(), gw.end(), 0.0);
        std::fill(gb.begin(), gb.end(), 0.0);
        auto gin = conv2d_backward(input, weights, upstream, 1, 2, gw, gb);
        benchmark::DoNotOptimize(gin);
    }
    const std::size_t macs = 2 * 16 * size * size * 8 * 25;
    state.counters["GMAC/s"] = benchmark::Counter(
        static_cast<double>(macs * state.iterations()) * 1e-9,
        benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Conv2dBackward)->Arg(16)->Arg(32)->Arg(64);

static void BM_MaxPool(benchmark::State& state) {
    const Tensor input = random_tensor({16, 32, 32}, 5);
    for (auto _ : state) {
        auto out = maxpool2d_forward(input, 2, 2);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_MaxPool);

static void BM_Dense(benchmark::State& state) {
    const Tensor input = random_tensor({1280}, 6);
    const Tensor weights = random_tensor({4, 1280}, 7);
    const Tensor bias = random_tensor({4}, 8);
    for (auto _ : state) {
        auto out = dense_forward(input, weights, bias);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_Dense);
