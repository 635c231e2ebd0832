#include "m3s/layers.hpp"

#include <algorithm>
#include <cstddef>

namespace m3s {

namespace {

using index_t = std::ptrdiff_t;

struct Range {
    index_t lo;
    index_t hi;  // exclusive
};

// Output rows oy for which iy = oy*stride + k - pad lands inside [0, size).
Range valid_range(index_t size, index_t out_size, index_t stride, index_t k,
                  index_t pad) {
    const index_t offset = k - pad;
    index_t lo = 0;
    if (offset < 0) lo = (-offset + stride - 1) / stride;
    index_t hi = out_size;
    const index_t limit = size - offset;  // need oy*stride < limit
    if (limit <= 0) return {0, 0};
    hi = std::min<index_t>(hi, (limit - 1) / stride + 1);
    return {lo, std::max(lo, hi)};
}

void check_conv_shapes(const Tensor& input, const Tensor& weights,
                       const Tensor& bias) {
    if (input.shape.size() != 3) {
        throw ShapeError("conv2d input must be [C,H,W], got " +
                         Tensor::shape_string(input.shape));
    }
    if (weights.shape.size() != 4 || weights.shape[2] != weights.shape[3]) {
        throw ShapeError("conv2d weights must be [C_out,C_in,f,f], got " +
                         Tensor::shape_string(weights.shape));
    }
    if (weights.shape[1] != input.shape[0]) {
        throw ShapeError("conv2d channel mismatch: input has " +
                         std::to_string(input.shape[0]) + ", weights expect " +
                         std::to_string(weights.shape[1]));
    }
    if (bias.shape != std::vector<std::size_t>{weights.shape[0]}) {
        throw ShapeError("conv2d bias must be [C_out]");
    }
}

}  // namespace

std::size_t conv_output_size(std::size_t size, std::size_t kernel,
                             std::size_t stride, std::size_t padding) {
    if (kernel < 1 || stride < 1) {
        throw ShapeError("kernel and stride must be >= 1");
    }
    if (size + 2 * padding < kernel) {
        throw ShapeError("window of size " + std::to_string(kernel) +
                         " does not fit input of size " + std::to_string(size) +
                         " with padding " + std::to_string(padding));
    }
    return (size + 2 * padding - kernel) / stride + 1;
}

Tensor conv2d_forward(const Tensor& input, const Tensor& weights, const Tensor& bias,
                      std::size_t stride, std::size_t padding) {
    check_conv_shapes(input, weights, bias);
    const index_t c_in = static_cast<index_t>(input.shape[0]);
    const index_t h = static_cast<index_t>(input.shape[1]);
    const index_t w = static_cast<index_t>(input.shape[2]);
    const index_t c_out = static_cast<index_t>(weights.shape[0]);
    const index_t f = static_cast<index_t>(weights.shape[2]);
    const index_t s = static_cast<index_t>(stride);
    const index_t p = static_cast<index_t>(padding);
    const index_t oh = static_cast<index_t>(conv_output_size(h, f, stride, padding));
    const index_t ow = static_cast<index_t>(conv_output_size(w, f, stride, padding));

    Tensor output({static_cast<std::size_t>(c_out), static_cast<std::size_t>(oh),
                   static_cast<std::size_t>(ow)});

    const double* __restrict in = input.data.data();
    const double* __restrict wt = weights.data.data();
    double* __restrict out = output.data.data();

    for (index_t co = 0; co < c_out; ++co) {
        std::fill(out + co * oh * ow, out + (co + 1) * oh * ow, bias.data[co]);
    }
    for (index_t co = 0; co < c_out; ++co) {
        for (index_t ci = 0; ci < c_in; ++ci) {
            for (index_t ky = 0; ky < f; ++ky) {
                const Range ry = valid_range(h, oh, s, ky, p);
                for (index_t kx = 0; kx < f; ++kx) {
                    const Range rx = valid_range(w, ow, s, kx, p);
                    const double wv = wt[((co * c_in + ci) * f + ky) * f + kx];
                    const index_t shift = kx - p;
                    for (index_t oy = ry.lo; oy < ry.hi; ++oy) {
                        const index_t iy = oy * s + ky - p;
                        const double* __restrict in_row = in + (ci * h + iy) * w;
                        double* __restrict out_row = out + (co * oh + oy) * ow;
                        if (s == 1) {
                            for (index_t ox = rx.lo; ox < rx.hi; ++ox) {
                                out_row[ox] += wv * in_row[ox + shift];
                            }
                        } else {
                            for (index_t ox = rx.lo; ox < rx.hi; ++ox) {
                                out_row[ox] += wv * in_row[ox * s + shift];
                            }
                        }
                    }
                }
            }
        }
    }
    return output;
}

Tensor conv2d_backward(const Tensor& input, const Tensor& weights,
                       const Tensor& upstream, std::size_t stride,
                       std::size_t padding, std::vector<double>& grad_weights,
                       std::vector<double>& grad_bias) {
    const index_t c_in = static_cast<index_t>(input.shape[0]);
    const index_t h = static_cast<index_t>(input.shape[1]);
    const index_t w = static_cast<index_t>(input.shape[2]);
    const index_t c_out = static_cast<index_t>(weights.shape[0]);
    const index_t f = static_cast<index_t>(weights.shape[2]);
    const index_t s = static_cast<index_t>(stride);
    const index_t p = static_cast<index_t>(padding);
    const index_t oh = static_cast<index_t>(conv_output_size(h, f, stride, padding));
    const index_t ow = static_cast<index_t>(conv_output_size(w, f, stride, padding));

    upstream.require_shape({static_cast<std::size_t>(c_out),
                            static_cast<std::size_t>(oh),
                            static_cast<std::size_t>(ow)},
                           "conv2d upstream gradient");
    if (grad_weights.size() != weights.data.size() ||
        grad_bias.size() != static_cast<std::size_t>(c_out)) {
        throw ShapeError("conv2d gradient buffers have wrong size");
    }

    Tensor grad_input(input.shape);
    const double* __restrict in = input.data.data();
    const double* __restrict wt = weights.data.data();
    const double* __restrict up = upstream.data.data();
    double* __restrict gin = grad_input.data.data();
    double* __restrict gw = grad_weights.data();

    for (index_t co = 0; co < c_out; ++co) {
        double acc = 0.0;
        const double* plane = up + co * oh * ow;
        for (index_t k = 0; k < oh * ow; ++k) acc += plane[k];
        grad_bias[co] += acc;
    }

    for (index_t co = 0; co < c_out; ++co) {
        for (index_t ci = 0; ci < c_in; ++ci) {
            for (index_t ky = 0; ky < f; ++ky) {
                const Range ry = valid_range(h, oh, s, ky, p);
                for (index_t kx = 0; kx < f; ++kx) {
                    const Range rx = valid_range(w, ow, s, kx, p);
                    const double wv = wt[((co * c_in + ci) * f + ky) * f + kx];
                    const index_t shift = kx - p;
                    double w_acc = 0.0;
                    for (index_t oy = ry.lo; oy < ry.hi; ++oy) {
                        const index_t iy = oy * s + ky - p;
                        const double* __restrict in_row = in + (ci * h + iy) * w;
                        const double* __restrict up_row = up + (co * oh + oy) * ow;
                        double* __restrict gin_row = gin + (ci * h + iy) * w;
                        if (s == 1) {
                            for (index_t ox = rx.lo; ox < rx.hi; ++ox) {
                                const double u = up_row[ox];
                                w_acc += u * in_row[ox + shift];
                                gin_row[ox + shift] += wv * u;
                            }
                        } else {
                            for (index_t ox = rx.lo; ox < rx.hi; ++ox) {
                                const double u = up_row[ox];
                                w_acc += u * in_row[ox * s + shift];
                                gin_row[ox * s + shift] += wv * u;
                            }
                        }
                    }
                    gw[((co * c_in + ci) * f + ky) * f + kx] += w_acc;
                }
            }
        }
    }
    return grad_input;
}

MaxPoolResult maxpool2d_forward(const Tensor& input, std::size_t kernel,
                                std::size_t stride) {
    if (input.shape.size() != 3) {
        throw ShapeError("maxpool input must be [C,H,W], got " +
                         Tensor::shape_string(input.shape));
    }
    const std::size_t c = input.shape[0];
    const std::size_t h = input.shape[1];
    const std::size_t w = input.shape[2];
    const std::size_t oh = conv_output_size(h, kernel, stride, 0);
    const std::size_t ow = conv_output_size(w, kernel, stride, 0);

    MaxPoolResult result;
    result.output = Tensor({c, oh, ow});
    result.argmax.resize(c * oh * ow);

    for (std::size_t ch = 0; ch < c; ++ch) {
        const double* plane = input.data.data() + ch * h * w;
        for (std::size_t oy = 0; oy < oh; ++oy) {
            for (std::size_t ox = 0; ox < ow; ++ox) {
                std::size_t best_index = (oy * stride) * w + ox * stride;
                double best = plane[best_index];
                for (std::size_t ky = 0; ky < kernel; ++ky) {
                    for (std::size_t kx = 0; kx < kernel; ++kx) {
                        const std::size_t idx = (oy * stride + ky) * w + ox * stride + kx;
                        if (plane[idx] > best) {  // strict: first max wins ties
                            best = plane[idx];
                            best_index = idx;
                        }
                    }
                }
                const std::size_t out_idx = (ch * oh + oy) * ow + ox;
                result.output.data[out_idx] = best;
                result.argmax[out_idx] = ch * h * w + best_index;
            }
        }
    }
    return result;
}

Tensor maxpool2d_backward(const Tensor& upstream,
                          const std::vector<std::size_t>& argmax,
                          const std::vector<std::size_t>& input_shape) {
    if (upstream.numel() != argmax.size()) {
        throw ShapeError("maxpool upstream/argmax size mismatch");
    }
    Tensor grad_input(input_shape);
    for (std::size_t k = 0; k < argmax.size(); ++k) {
        grad_input.data[argmax[k]] += upstream.data[k];
    }
    return grad_input;
}

Tensor relu_forward(const Tensor& input) {
    Tensor output(input.shape);
    for (std::size_t k = 0; k < input.numel(); ++k) {
        output.data[k] = input.data[k] > 0.0 ? input.data[k] : 0.0;
    }
    return output;
}

Tensor relu_backward(const Tensor& input, const Tensor& upstream) {
    if (!input.same_shape(upstream)) {
        throw ShapeError("relu upstream shape mismatch");
    }
    Tensor grad_input(input.shape);
    for (std::size_t k = 0; k < input.numel(); ++k) {
        grad_input.data[k] = input.data[k] > 0.0 ? upstream.data[k] : 0.0;
    }
    return grad_input;
}

Tensor dense_forward(const Tensor& input, const Tensor& weights, const Tensor& bias) {
    if (weights.shape.size() != 2) {
        throw ShapeError("dense weights must be [m,n]");
    }
    const std::size_t m = weights.shape[0];
    const std::size_t n = weights.shape[1];
    if (input.numel() != n) {
        throw ShapeError("dense input has " + std::to_string(input.numel()) +
                         " values, weights expect " + std::to_string(n));
    }
    if (bias.numel() != m) throw ShapeError("dense bias must be [m]");

    Tensor output({m});
    for (std::size_t row = 0; row < m; ++row) {
        double acc = bias.data[row];
        const double* wrow = weights.data.data() + row * n;
        for (std::size_t col = 0; col < n; ++col) acc += wrow[col] * input.data[col];
        output.data[row] = acc;
    }
    return output;
}

Tensor dense_backward(const Tensor& input, const Tensor& weights,
                      const Tensor& upstream, std::vector<double>& grad_weights,
                      std::vector<double>& grad_bias) {
    const std::size_t m = weights.shape[0];
    const std::size_t n = weights.shape[1];
    if (upstream.numel() != m) throw ShapeError("dense upstream must be [m]");
    if (grad_weights.size() != m * n || grad_bias.size() != m) {
        throw ShapeError("dense gradient buffers have wrong size");
    }

    Tensor grad_input({n});
    for (std::size_t row = 0; row < m; ++row) {
        const double u = upstream.data[row];
        grad_bias[row] += u;
        const double* wrow = weights.data.data() + row * n;
        double* gwrow = grad_weights.data() + row * n;
        for (std::size_t col = 0; col < n; ++col) {
            gwrow[col] += u * input.data[col];
            grad_input.data[col] += u * wrow[col];
        }
    }
    return grad_input;
}

}  // namespace m3s
