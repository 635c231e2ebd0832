#include "m3s/net.hpp"

#include <cmath>

#include "m3s/layers.hpp"

namespace m3s {

const char* to_string(LayerKind kind) {
    switch (kind) {
        case LayerKind::Conv2d: return "conv2d";
        case LayerKind::MaxPool2d: return "maxpool2d";
        case LayerKind::Relu: return "relu";
        case LayerKind::Dense: return "dense";
        case LayerKind::Flatten: return "flatten";
    }
    return "?";
}

LayerSpec LayerSpec::conv2d(std::size_t in_ch, std::size_t out_ch, std::size_t kernel,
                            std::size_t stride, std::size_t padding) {
    LayerSpec spec;
    spec.kind = LayerKind::Conv2d;
    spec.in_channels = in_ch;
    spec.out_channels = out_ch;
    spec.kernel = kernel;
    spec.stride = stride;
    spec.padding = padding;
    spec.validate();
    return spec;
}

LayerSpec LayerSpec::maxpool2d(std::size_t kernel, std::size_t stride) {
    LayerSpec spec;
    spec.kind = LayerKind::MaxPool2d;
    spec.kernel = kernel;
    spec.stride = stride;
    spec.validate();
    return spec;
}

LayerSpec LayerSpec::relu() {
    LayerSpec spec;
    spec.kind = LayerKind::Relu;
    return spec;
}

LayerSpec LayerSpec::dense(std::size_t in_features, std::size_t units) {
    LayerSpec spec;
    spec.kind = LayerKind::Dense;
    spec.in_features = in_features;
    spec.units = units;
    spec.validate();
    return spec;
}

LayerSpec LayerSpec::flatten() {
    LayerSpec spec;
    spec.kind = LayerKind::Flatten;
    return spec;
}

void LayerSpec::validate() const {
    switch (kind) {
        case LayerKind::Conv2d:
            if (kernel < 1 || stride < 1) throw ShapeError("conv2d needs kernel, stride >= 1");
            if (in_channels < 1 || out_channels < 1) throw ShapeError("conv2d needs channels >= 1");
            break;
        case LayerKind::MaxPool2d:
            if (kernel < 1 || stride < 1) throw ShapeError("maxpool2d needs kernel, stride >= 1");
            break;
        case LayerKind::Dense:
            if (in_features < 1 || units < 1) throw ShapeError("dense needs sizes >= 1");
            break;
        case LayerKind::Relu:
        case LayerKind::Flatten:
            break;
    }
}

LayerStack::LayerStack(std::vector<LayerSpec> specs) : specs_(std::move(specs)) {
    weights_.resize(specs_.size());
    biases_.resize(specs_.size());
    for (std::size_t i = 0; i < specs_.size(); ++i) {
        const LayerSpec& spec = specs_[i];
        spec.validate();
        if (spec.kind == LayerKind::Conv2d) {
            weights_[i] = Tensor({spec.out_channels, spec.in_channels, spec.kernel,
                                  spec.kernel});
            biases_[i] = Tensor({spec.out_channels});
        } else if (spec.kind == LayerKind::Dense) {
            weights_[i] = Tensor({spec.units, spec.in_features});
            biases_[i] = Tensor({spec.units});
        }
    }
}

void LayerStack::init_params(Rng& rng) {
    for (std::size_t i = 0; i < specs_.size(); ++i) {
        const LayerSpec& spec = specs_[i];
        if (spec.kind == LayerKind::Conv2d) {
            const double fan_in =
                static_cast<double>(spec.in_channels * spec.kernel * spec.kernel);
            const double bound = std::sqrt(6.0 / fan_in);
            for (double& v : weights_[i].data) v = rng.uniform(-bound, bound);
            std::fill(biases_[i].data.begin(), biases_[i].data.end(), 0.0);
        } else if (spec.kind == LayerKind::Dense) {
            const double bound = std::sqrt(6.0 / static_cast<double>(spec.in_features));
            for (double& v : weights_[i].data) v = rng.uniform(-bound, bound);
            std::fill(biases_[i].data.begin(), biases_[i].data.end(), 0.0);
        }
    }
}

Tensor LayerStack::forward(const Tensor& input) const {
    Tensor current = input;
    for (std::size_t i = 0; i < specs_.size(); ++i) {
        const LayerSpec& spec = specs_[i];
        switch (spec.kind) {
            case LayerKind::Conv2d:
                current = conv2d_forward(current, weights_[i], biases_[i], spec.stride,
                                         spec.padding);
                break;
            case LayerKind::MaxPool2d:
                current = maxpool2d_forward(current, spec.kernel, spec.stride).output;
                break;
            case LayerKind::Relu:
                current = relu_forward(current);
                break;
            case LayerKind::Dense:
                current = dense_forward(current, weights_[i], biases_[i]);
                break;
            case LayerKind::Flatten:
                current.shape = {current.numel()};
                break;
        }
    }
    return current;
}

LayerStack::Cache LayerStack::forward_cached(const Tensor& input) const {
    Cache cache;
    cache.inputs.reserve(specs_.size());
    Tensor current = input;
    for (std::size_t i = 0; i < specs_.size(); ++i) {
        const LayerSpec& spec = specs_[i];
        cache.inputs.push_back(current);
        switch (spec.kind) {
            case LayerKind::Conv2d:
                current = conv2d_forward(current, weights_[i], biases_[i], spec.stride,
                                         spec.padding);
                break;
            case LayerKind::MaxPool2d: {
                auto pooled = maxpool2d_forward(current, spec.kernel, spec.stride);
                current = std::move(pooled.output);
                cache.argmax.push_back(std::move(pooled.argmax));
                break;
            }
            case LayerKind::Relu:
                current = relu_forward(current);
                break;
            case LayerKind::Dense:
                current = dense_forward(current, weights_[i], biases_[i]);
                break;
            case LayerKind::Flatten:
                current.shape = {current.numel()};
                break;
        }
    }
    cache.output = std::move(current);
    return cache;
}

Tensor LayerStack::backward(const Cache& cache, const Tensor& upstream) {
    ensure_grad();
    Tensor grad = upstream;
    std::size_t pool_index = cache.argmax.size();
    for (std::size_t i = specs_.size(); i-- > 0;) {
        const LayerSpec& spec = specs_[i];
        const Tensor& layer_input = cache.inputs[i];
        switch (spec.kind) {
            case LayerKind::Conv2d:
                grad = conv2d_backward(layer_input, weights_[i], grad, spec.stride,
                                       spec.padding, weights_[i].grad, biases_[i].grad);
                break;
            case LayerKind::MaxPool2d:
                --pool_index;
                grad = maxpool2d_backward(grad, cache.argmax[pool_index],
                                          layer_input.shape);
                break;
            case LayerKind::Relu:
                grad = relu_backward(layer_input, grad);
                break;
            case LayerKind::Dense:
                grad = dense_backward(layer_input, weights_[i], grad, weights_[i].grad,
                                      biases_[i].grad);
                break;
            case LayerKind::Flatten:
                grad.shape = layer_input.shape;
                break;
        }
    }
    return grad;
}

std::vector<Tensor*> LayerStack::parameters() {
    std::vector<Tensor*> params;
    for (std::size_t i = 0; i < specs_.size(); ++i) {
        if (weights_[i].numel() > 0) {
            params.push_back(&weights_[i]);
            params.push_back(&biases_[i]);
        }
    }
    return params;
}

std::vector<const Tensor*> LayerStack::parameters() const {
    std::vector<const Tensor*> params;
    for (std::size_t i = 0; i < specs_.size(); ++i) {
        if (weights_[i].numel() > 0) {
            params.push_back(&weights_[i]);
            params.push_back(&biases_[i]);
        }
    }
    return params;
}

std::vector<std::string> LayerStack::parameter_names() const {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < specs_.size(); ++i) {
        if (weights_[i].numel() > 0) {
            const std::string base =
                std::string(to_string(specs_[i].kind)) + std::to_string(i);
            names.push_back(base + ".weight");
            names.push_back(base + ".bias");
        }
    }
    return names;
}

void LayerStack::zero_grad() {
    for (Tensor* t : parameters()) t->zero_grad();
}

void LayerStack::ensure_grad() {
    for (Tensor* t : parameters()) t->ensure_grad();
}

std::size_t LayerStack::param_count() const {
    std::size_t count = 0;
    for (const Tensor* t : parameters()) count += t->numel();
    return count;
}

std::vector<std::size_t> LayerStack::output_shape(std::vector<std::size_t> shape) const {
    for (const LayerSpec& spec : specs_) {
        switch (spec.kind) {
            case LayerKind::Conv2d:
                shape = {spec.out_channels,
                         conv_output_size(shape[1], spec.kernel, spec.stride, spec.padding),
                         conv_output_size(shape[2], spec.kernel, spec.stride, spec.padding)};
                break;
            case LayerKind::MaxPool2d:
                shape = {shape[0], conv_output_size(shape[1], spec.kernel, spec.stride, 0),
                         conv_output_size(shape[2], spec.kernel, spec.stride, 0)};
                break;
            case LayerKind::Flatten:
                shape = {Tensor::numel_of(shape)};
                break;
            case LayerKind::Dense:
                shape = {spec.units};
                break;
            case LayerKind::Relu:
                break;
        }
    }
    return shape;
}

std::size_t LayerStack::forward_macs(const std::vector<std::size_t>& input_shape) const {
    std::size_t macs = 0;
    std::vector<std::size_t> shape = input_shape;
    for (const LayerSpec& spec : specs_) {
        switch (spec.kind) {
            case LayerKind::Conv2d: {
                const std::size_t oh =
                    conv_output_size(shape[1], spec.kernel, spec.stride, spec.padding);
                const std::size_t ow =
                    conv_output_size(shape[2], spec.kernel, spec.stride, spec.padding);
                macs += spec.out_channels * oh * ow * spec.in_channels * spec.kernel *
                        spec.kernel;
                shape = {spec.out_channels, oh, ow};
                break;
            }
            case LayerKind::MaxPool2d:
                shape = {shape[0], conv_output_size(shape[1], spec.kernel, spec.stride, 0),
                         conv_output_size(shape[2], spec.kernel, spec.stride, 0)};
                break;
            case LayerKind::Flatten:
                shape = {Tensor::numel_of(shape)};
                break;
            case LayerKind::Dense:
                macs += spec.units * spec.in_features;
                shape = {spec.units};
                break;
            case LayerKind::Relu:
                break;
        }
    }
    return macs;
}

}  // namespace m3s
