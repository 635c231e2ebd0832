#include "m3s/optimizer.hpp"

#include <string>

#include "m3s/errors.hpp"

namespace m3s {

void sgd_step(std::span<double> params, std::span<const double> grads, double lr) {
    if (!(lr > 0.0)) {
        throw InvalidConfig("learning rate must be > 0, got " + std::to_string(lr));
    }
    if (params.size() != grads.size()) {
        throw ShapeError("sgd_step size mismatch: " + std::to_string(params.size()) +
                         " params vs " + std::to_string(grads.size()) + " grads");
    }
    for (std::size_t k = 0; k < params.size(); ++k) {
        params[k] -= lr * grads[k];
    }
}

void sgd_step(Tensor& tensor, double lr) {
    if (tensor.grad.size() != tensor.data.size()) {
        throw ShapeError("tensor has no gradient buffer");
    }
    sgd_step(tensor.data, tensor.grad, lr);
}

}  // namespace m3s
