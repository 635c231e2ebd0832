#include <doctest.h>

#include <cmath>
#include <vector>

#include "m3s/errors.hpp"
#include "m3s/layers.hpp"
#include "m3s/loss.hpp"
#include "m3s/optimizer.hpp"
#include "m3s/rng.hpp"
#include "m3s/tensor.hpp"

using namespace m3s;

namespace {

// Naive quadruple-loop cross-correlation used as the reference; bounds are
// checked per tap instead of hoisted, so it shares no structure with the
// production kernel.
Tensor naive_conv2d(const Tensor& input, const Tensor& weights, const Tensor& bias,
                    std::size_t stride, std::size_t padding) {
    const std::size_t c_in = input.shape[0];
    const std::size_t h = input.shape[1];
    const std::size_t w = input.shape[2];
    const std::size_t c_out = weights.shape[0];
    const std::size_t f = weights.shape[2];
    const std::size_t oh = (h + 2 * padding - f) / stride + 1;
    const std::size_t ow = (w + 2 * padding - f) / stride + 1;

    Tensor out({c_out, oh, ow});
    for (std::size_t co = 0; co < c_out; ++co) {
        for (std::size_t oy = 0; oy < oh; ++oy) {
            for (std::size_t ox = 0; ox < ow; ++ox) {
                double acc = bias.data[co];
                for (std::size_t ci = 0; ci < c_in; ++ci) {
                    for (std::size_t ky = 0; ky < f; ++ky) {
                        for (std::size_t kx = 0; kx < f; ++kx) {
                            const std::ptrdiff_t iy =
                                static_cast<std::ptrdiff_t>(oy * stride + ky) -
                                static_cast<std::ptrdiff_t>(padding);
                            const std::ptrdiff_t ix =
                                static_cast<std::ptrdiff_t>(ox * stride + kx) -
                                static_cast<std::ptrdiff_t>(padding);
                            if (iy < 0 || ix < 0 ||
                                iy >= static_cast<std::ptrdiff_t>(h) ||
                                ix >= static_cast<std::ptrdiff_t>(w)) {
                                continue;  // zero padding
                            }
                            acc += input.data[(ci * h + iy) * w + ix] *
                                   weights.data[((co * c_in + ci) * f + ky) * f + kx];
                        }
                    }
                }
                out.data[(co * oh + oy) * ow + ox] = acc;
            }
        }
    }
    return out;
}

// Naive windowed max.
Tensor naive_maxpool(const Tensor& input, std::size_t f, std::size_t s) {
    const std::size_t c = input.shape[0];
    const std::size_t h = input.shape[1];
    const std::size_t w = input.shape[2];
    const std::size_t oh = (h - f) / s + 1;
    const std::size_t ow = (w - f) / s + 1;
    Tensor out({c, oh, ow});
    for (std::size_t ch = 0; ch < c; ++ch) {
        for (std::size_t oy = 0; oy < oh; ++oy) {
            for (std::size_t ox = 0; ox < ow; ++ox) {
                double best = -1e300;
                for (std::size_t ky = 0; ky < f; ++ky) {
                    for (std::size_t kx = 0; kx < f; ++kx) {
                        best = std::max(
                            best, input.data[(ch * h + oy * s + ky) * w + ox * s + kx]);
                    }
                }
                out.data[(ch * oh + oy) * ow + ox] = best;
            }
        }
    }
    return out;
}

Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng, double lo = -1.0,
                     double hi = 1.0) {
    Tensor t(std::move(shape));
    for (double& v : t.data) v = rng.uniform(lo, hi);
    return t;
}

}  // namespace

TEST_CASE("conv output size follows floor((H+2p-f)/s)+1") {
    CHECK(conv_output_size(32, 3, 1, 1) == 32);
    CHECK(conv_output_size(16, 2, 2, 0) == 8);
    CHECK(conv_output_size(64, 5, 1, 2) == 64);
    CHECK(conv_output_size(7, 3, 2, 0) == 3);
    CHECK_THROWS_AS(conv_output_size(2, 5, 1, 0), ShapeError);
}

TEST_CASE("conv of all-ones with an all-ones 3x3 kernel sums the window") {
    Tensor input({1, 3, 3});
    std::fill(input.data.begin(), input.data.end(), 1.0);
    Tensor weights({1, 1, 3, 3});
    std::fill(weights.data.begin(), weights.data.end(), 1.0);
    Tensor bias({1});

    const Tensor out = conv2d_forward(input, weights, bias, 1, 0);
    REQUIRE(out.shape == std::vector<std::size_t>{1, 1, 1});
    CHECK(out.data[0] == doctest::Approx(9.0));
}

TEST_CASE("identity kernel reproduces the input") {
    Rng rng(31);
    const Tensor input = random_tensor({1, 5, 5}, rng);
    Tensor weights({1, 1, 3, 3});
    weights.data[4] = 1.0;  // center tap
    Tensor bias({1});

    const Tensor out = conv2d_forward(input, weights, bias, 1, 1);
    REQUIRE(out.shape == input.shape);
    for (std::size_t k = 0; k < input.numel(); ++k) {
        CHECK(out.data[k] == doctest::Approx(input.data[k]));
    }
}

TEST_CASE("conv forward matches the naive oracle") {
    Rng rng(32);
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t stride = (trial % 2) + 1;
        const std::size_t padding = trial % 3;
        const Tensor input = random_tensor({2, 8, 8}, rng);
        const Tensor weights = random_tensor({4, 2, 3, 3}, rng);
        const Tensor bias = random_tensor({4}, rng);

        const Tensor fast = conv2d_forward(input, weights, bias, stride, padding);
        const Tensor slow = naive_conv2d(input, weights, bias, stride, padding);
        REQUIRE(fast.shape == slow.shape);
        for (std::size_t k = 0; k < fast.numel(); ++k) {
            CHECK(std::fabs(fast.data[k] - slow.data[k]) < 1e-12);
        }
    }
}

TEST_CASE("conv rejects mismatched shapes") {
    Tensor input({2, 8, 8});
    Tensor weights({4, 3, 3, 3});  // expects 3 input channels
    Tensor bias({4});
    CHECK_THROWS_AS(conv2d_forward(input, weights, bias, 1, 0), ShapeError);
}

TEST_CASE("conv backward: zero upstream gives zero gradients") {
    Rng rng(33);
    const Tensor input = random_tensor({2, 6, 6}, rng);
    const Tensor weights = random_tensor({3, 2, 3, 3}, rng);
    const Tensor bias = random_tensor({3}, rng);
    const Tensor out = conv2d_forward(input, weights, bias, 1, 1);

    Tensor upstream(out.shape);  // zeros
    std::vector<double> gw(weights.numel(), 0.0), gb(bias.numel(), 0.0);
    const Tensor gin = conv2d_backward(input, weights, upstream, 1, 1, gw, gb);
    for (double v : gw) CHECK(v == 0.0);
    for (double v : gb) CHECK(v == 0.0);
    for (double v : gin.data) CHECK(v == 0.0);
}

TEST_CASE("conv backward: single-pixel upstream selects the input patch") {
    Rng rng(34);
    const Tensor input = random_tensor({1, 5, 5}, rng);
    const Tensor weights = random_tensor({1, 1, 3, 3}, rng);
    Tensor bias({1});
    const Tensor out = conv2d_forward(input, weights, bias, 1, 0);

    Tensor upstream(out.shape);
    upstream.data[1 * out.shape[2] + 2] = 1.0;  // output pixel (1,2)
    std::vector<double> gw(weights.numel(), 0.0), gb(bias.numel(), 0.0);
    conv2d_backward(input, weights, upstream, 1, 0, gw, gb);

    // dL/dw[ky][kx] = input[1+ky][2+kx]
    for (std::size_t ky = 0; ky < 3; ++ky) {
        for (std::size_t kx = 0; kx < 3; ++kx) {
            CHECK(gw[ky * 3 + kx] ==
                  doctest::Approx(input.data[(1 + ky) * 5 + (2 + kx)]));
        }
    }
    CHECK(gb[0] == doctest::Approx(1.0));
}

TEST_CASE("maxpool 2x2 of [[1,2],[3,4]] is [[4]]") {
    Tensor input({1, 2, 2});
    input.data = {1.0, 2.0, 3.0, 4.0};
    const auto pooled = maxpool2d_forward(input, 2, 2);
    REQUIRE(pooled.output.shape == std::vector<std::size_t>{1, 1, 1});
    CHECK(pooled.output.data[0] == doctest::Approx(4.0));
    CHECK(pooled.argmax[0] == 3);
}

TEST_CASE("maxpool on constant input routes gradient to the first window slot") {
    Tensor input({1, 4, 4});
    std::fill(input.data.begin(), input.data.end(), 2.5);
    const auto pooled = maxpool2d_forward(input, 2, 2);
    for (double v : pooled.output.data) CHECK(v == doctest::Approx(2.5));

    Tensor upstream(pooled.output.shape);
    std::fill(upstream.data.begin(), upstream.data.end(), 1.0);
    const Tensor gin = maxpool2d_backward(upstream, pooled.argmax, input.shape);
    // Ties break to the first index in row-major scan: the top-left of each window.
    for (std::size_t oy = 0; oy < 2; ++oy) {
        for (std::size_t ox = 0; ox < 2; ++ox) {
            for (std::size_t ky = 0; ky < 2; ++ky) {
                for (std::size_t kx = 0; kx < 2; ++kx) {
                    const double expected = (ky == 0 && kx == 0) ? 1.0 : 0.0;
                    CHECK(gin.data[(oy * 2 + ky) * 4 + ox * 2 + kx] ==
                          doctest::Approx(expected));
                }
            }
        }
    }
}

TEST_CASE("maxpool matches the naive oracle") {
    Rng rng(35);
    for (int trial = 0; trial < 6; ++trial) {
        const Tensor input = random_tensor({3, 9, 9}, rng);
        const std::size_t f = (trial % 2) + 2;
        const std::size_t s = (trial % 3) + 1;
        const auto pooled = maxpool2d_forward(input, f, s);
        const Tensor slow = naive_maxpool(input, f, s);
        REQUIRE(pooled.output.shape == slow.shape);
        for (std::size_t k = 0; k < slow.numel(); ++k) {
            CHECK(pooled.output.data[k] == slow.data[k]);
        }
    }
}

TEST_CASE("dense with identity weights is the identity; zero weights give bias") {
    Tensor input({3});
    input.data = {0.3, -0.7, 2.0};
    Tensor eye({3, 3});
    eye.data = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    Tensor zero_bias({3});
    const Tensor same = dense_forward(input, eye, zero_bias);
    for (std::size_t k = 0; k < 3; ++k) CHECK(same.data[k] == input.data[k]);

    Tensor zeros({2, 3});
    Tensor bias({2});
    bias.data = {4.0, -1.0};
    const Tensor only_bias = dense_forward(input, zeros, bias);
    CHECK(only_bias.data[0] == doctest::Approx(4.0));
    CHECK(only_bias.data[1] == doctest::Approx(-1.0));
}

TEST_CASE("softmax cross entropy of uniform logits is ln K") {
    const auto result = softmax_cross_entropy(std::vector<double>{0, 0, 0, 0}, 2);
    CHECK(result.loss == doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("softmax cross entropy survives huge logits") {
    const auto result =
        softmax_cross_entropy(std::vector<double>{1000.0, 0.0, 0.0, 0.0}, 0);
    CHECK(std::isfinite(result.loss));
    CHECK(result.loss == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("softmax cross entropy gradient sums to zero") {
    Rng rng(36);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> logits(4);
        for (double& v : logits) v = rng.uniform(-5.0, 5.0);
        const auto result = softmax_cross_entropy(logits, trial % 4);
        double sum = 0.0;
        for (double g : result.grad) sum += g;
        CHECK(std::fabs(sum) < 1e-12);
    }
}

TEST_CASE("softmax output sums to one and stays positive") {
    Rng rng(37);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> logits(5);
        for (double& v : logits) v = rng.uniform(-30.0, 30.0);
        const auto probs = softmax(logits);
        double sum = 0.0;
        for (double p : probs) {
            CHECK(p > 0.0);
            sum += p;
        }
        CHECK(std::fabs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("softmax cross entropy rejects bad input") {
    CHECK_THROWS_AS(softmax_cross_entropy(std::vector<double>{1.0}, 0), ShapeError);
    CHECK_THROWS_AS(softmax_cross_entropy(std::vector<double>{1.0, 2.0}, 5), ShapeError);
    CHECK_THROWS_AS(
        softmax_cross_entropy(std::vector<double>{1.0, std::nan("")}, 0), NonFinite);
}

TEST_CASE("sgd step moves against the gradient") {
    std::vector<double> p = {1.0};
    std::vector<double> g = {1.0};
    sgd_step(p, g, 0.001);
    CHECK(p[0] == doctest::Approx(0.999).epsilon(1e-15));
}

TEST_CASE("sgd with zero gradient leaves parameters unchanged") {
    std::vector<double> p = {0.5, -2.0, 3.25};
    const std::vector<double> g = {0.0, 0.0, 0.0};
    sgd_step(p, g, 0.1);
    CHECK(p == std::vector<double>{0.5, -2.0, 3.25});
}

TEST_CASE("two half-lr steps equal one full step on a fixed gradient") {
    std::vector<double> twice = {1.0};
    const std::vector<double> g = {0.4};
    sgd_step(twice, g, 0.0005);
    sgd_step(twice, g, 0.0005);
    std::vector<double> once = {1.0};
    sgd_step(once, g, 0.001);
    CHECK(twice[0] == doctest::Approx(once[0]).epsilon(1e-14));
}

TEST_CASE("sgd validates inputs") {
    std::vector<double> p = {1.0};
    std::vector<double> g = {1.0, 2.0};
    CHECK_THROWS_AS(sgd_step(p, g, 0.1), ShapeError);
    std::vector<double> g1 = {1.0};
    CHECK_THROWS_AS(sgd_step(p, g1, 0.0), InvalidConfig);
}
