#pragma once

#include <span>
#include <vector>

namespace m3s {

/// Numerically stable softmax (max-subtraction). Output is strictly positive
/// and sums to 1 for finite input.
std::vector<double> softmax(std::span<const double> logits);

struct SoftmaxCrossEntropy {
    double loss = 0.0;
    std::vector<double> grad;  // softmax(logits) - onehot(target)
};

/// loss = -log softmax(logits)[target]. Throws NonFinite on NaN/Inf logits
/// and ShapeError when target is out of range or fewer than 2 classes.
SoftmaxCrossEntropy softmax_cross_entropy(std::span<const double> logits,
                                          std::size_t target);

/// Jacobian-vector product of softmax: given y = softmax(z) and dL/dy,
/// returns dL/dz[j] = y[j] * (dL/dy[j] - sum_c dL/dy[c] * y[c]).
std::vector<double> softmax_backward(std::span<const double> softmax_out,
                                     std::span<const double> upstream);

}  // namespace m3s
