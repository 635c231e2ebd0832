#include "m3s/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "m3s/errors.hpp"

namespace m3s {

std::vector<double> softmax(std::span<const double> logits) {
    const double peak = *std::max_element(logits.begin(), logits.end());
    std::vector<double> out(logits.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < logits.size(); ++k) {
        out[k] = std::exp(logits[k] - peak);
        sum += out[k];
    }
    for (double& v : out) v /= sum;
    return out;
}

SoftmaxCrossEntropy softmax_cross_entropy(std::span<const double> logits,
                                          std::size_t target) {
    if (logits.size() < 2) {
        throw ShapeError("softmax_cross_entropy needs at least 2 classes");
    }
    if (target >= logits.size()) {
        throw ShapeError("target " + std::to_string(target) + " out of range");
    }
    for (double v : logits) {
        if (!std::isfinite(v)) throw NonFinite("non-finite logit");
    }

    const double peak = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double v : logits) sum += std::exp(v - peak);
    const double log_sum = std::log(sum);

    SoftmaxCrossEntropy result;
    result.loss = log_sum - (logits[target] - peak);
    result.grad.resize(logits.size());
    for (std::size_t k = 0; k < logits.size(); ++k) {
        result.grad[k] = std::exp(logits[k] - peak) / sum;
    }
    result.grad[target] -= 1.0;
    return result;
}

std::vector<double> softmax_backward(std::span<const double> softmax_out,
                                     std::span<const double> upstream) {
    double weighted = 0.0;
    for (std::size_t c = 0; c < softmax_out.size(); ++c) {
        weighted += upstream[c] * softmax_out[c];
    }
    std::vector<double> grad(softmax_out.size());
    for (std::size_t j = 0; j < softmax_out.size(); ++j) {
        grad[j] = softmax_out[j] * (upstream[j] - weighted);
    }
    return grad;
}

}  // namespace m3s
