#pragma once

#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "m3s/errors.hpp"

namespace m3s {

/// Dense row-major tensor of doubles with an optional same-shape gradient
/// buffer. This is the only parameter/activation container in the engine.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;
    std::vector<double> grad;  // empty until ensure_grad()

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> dims)
        : shape(std::move(dims)), data(numel_of(shape), 0.0) {}

    static std::size_t numel_of(const std::vector<std::size_t>& dims) {
        return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                               std::multiplies<>());
    }

    std::size_t numel() const { return data.size(); }

    void ensure_grad() {
        if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
    }

    void zero_grad() {
        if (!grad.empty()) std::fill(grad.begin(), grad.end(), 0.0);
    }

    bool same_shape(const Tensor& other) const { return shape == other.shape; }

    void require_shape(const std::vector<std::size_t>& dims, const char* what) const {
        if (shape != dims) {
            throw ShapeError(std::string(what) + ": got " + shape_string(shape) +
                             ", expected " + shape_string(dims));
        }
    }

    static std::string shape_string(const std::vector<std::size_t>& dims) {
        std::string s = "[";
        for (std::size_t i = 0; i < dims.size(); ++i) {
            if (i) s += "x";
            s += std::to_string(dims[i]);
        }
        return s + "]";
    }
};

}  // namespace m3s
