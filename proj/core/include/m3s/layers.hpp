#pragma once

#include <cstddef>
#include <vector>

#include "m3s/tensor.hpp"

namespace m3s {

/// Spatial size after a windowed op: floor((size + 2 pad - kernel) / stride) + 1.
/// Throws ShapeError when the result would be < 1.
std::size_t conv_output_size(std::size_t size, std::size_t kernel,
                             std::size_t stride, std::size_t padding);

/// Cross-correlation with zero padding.
///   input  [C_in, H, W], weights [C_out, C_in, f, f], bias [C_out]
///   output [C_out, H', W']
Tensor conv2d_forward(const Tensor& input, const Tensor& weights, const Tensor& bias,
                      std::size_t stride, std::size_t padding);

/// Reverse-mode gradients of conv2d_forward. Accumulates into grad_weights /
/// grad_bias (callers zero them between samples) and returns grad wrt input.
Tensor conv2d_backward(const Tensor& input, const Tensor& weights,
                       const Tensor& upstream, std::size_t stride,
                       std::size_t padding, std::vector<double>& grad_weights,
                       std::vector<double>& grad_bias);

struct MaxPoolResult {
    Tensor output;
    std::vector<std::size_t> argmax;  // winning input index per output cell
};

/// Windowed max, no padding. Ties go to the first index in row-major scan of
/// the window so gradient routing is reproducible.
MaxPoolResult maxpool2d_forward(const Tensor& input, std::size_t kernel,
                                std::size_t stride);

Tensor maxpool2d_backward(const Tensor& upstream,
                          const std::vector<std::size_t>& argmax,
                          const std::vector<std::size_t>& input_shape);

Tensor relu_forward(const Tensor& input);
Tensor relu_backward(const Tensor& input, const Tensor& upstream);

/// output[m] = bias[m] + sum_n weights[m,n] * input[n]
Tensor dense_forward(const Tensor& input, const Tensor& weights, const Tensor& bias);

Tensor dense_backward(const Tensor& input, const Tensor& weights,
                      const Tensor& upstream, std::vector<double>& grad_weights,
                      std::vector<double>& grad_bias);

}  // namespace m3s
