#pragma once

#include <span>

#include "m3s/tensor.hpp"

namespace m3s {

/// Plain SGD without momentum: p <- p - lr * g, elementwise.
/// Throws InvalidConfig for lr <= 0 and ShapeError on size mismatch.
void sgd_step(std::span<double> params, std::span<const double> grads, double lr);

/// Applies sgd_step to a tensor's own gradient buffer.
void sgd_step(Tensor& tensor, double lr);

}  // namespace m3s
