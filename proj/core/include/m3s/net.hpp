#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "m3s/rng.hpp"
#include "m3s/tensor.hpp"

namespace m3s {

enum class LayerKind { Conv2d, MaxPool2d, Relu, Dense, Flatten };

const char* to_string(LayerKind kind);

/// Declarative description of one layer. Only the fields relevant to `kind`
/// are read; the rest stay zero.
struct LayerSpec {
    LayerKind kind = LayerKind::Relu;
    std::size_t kernel = 0;
    std::size_t stride = 1;
    std::size_t padding = 0;
    std::size_t in_channels = 0;   // conv2d
    std::size_t out_channels = 0;  // conv2d
    std::size_t in_features = 0;   // dense
    std::size_t units = 0;         // dense

    static LayerSpec conv2d(std::size_t in_ch, std::size_t out_ch, std::size_t kernel,
                            std::size_t stride, std::size_t padding);
    static LayerSpec maxpool2d(std::size_t kernel, std::size_t stride);
    static LayerSpec relu();
    static LayerSpec dense(std::size_t in_features, std::size_t units);
    static LayerSpec flatten();

    void validate() const;
    bool operator==(const LayerSpec&) const = default;
};

/// A plain sequential network: specs plus one weight/bias tensor pair per
/// parametric layer. Forward/backward are single-threaded and deterministic;
/// a const LayerStack is safe to share across threads.
class LayerStack {
public:
    LayerStack() = default;
    explicit LayerStack(std::vector<LayerSpec> specs);

    /// Uniform fan-in initialization, U(-b, b) with b = sqrt(6 / fan_in);
    /// biases start at zero.
    void init_params(Rng& rng);

    /// Inference-only forward.
    Tensor forward(const Tensor& input) const;

    /// Forward pass that records everything backward() needs.
    struct Cache {
        std::vector<Tensor> inputs;                    // input of each layer
        std::vector<std::vector<std::size_t>> argmax;  // per maxpool layer
        Tensor output;
    };
    Cache forward_cached(const Tensor& input) const;

    /// Accumulates parameter gradients (into each tensor's grad buffer) and
    /// returns the gradient wrt the stack input.
    Tensor backward(const Cache& cache, const Tensor& upstream);

    const std::vector<LayerSpec>& specs() const { return specs_; }
    std::vector<Tensor*> parameters();
    std::vector<const Tensor*> parameters() const;
    /// Human-readable name per parameter tensor, aligned with parameters().
    std::vector<std::string> parameter_names() const;

    void zero_grad();
    void ensure_grad();

    std::size_t param_count() const;
    /// Multiply-accumulate count of one forward pass (conv and dense layers
    /// only) for the given input shape.
    std::size_t forward_macs(const std::vector<std::size_t>& input_shape) const;
    std::vector<std::size_t> output_shape(std::vector<std::size_t> shape) const;

    // Direct access for (de)serialization. weights()/biases() are aligned
    // with specs(); non-parametric layers hold empty tensors.
    std::vector<Tensor>& weights() { return weights_; }
    std::vector<Tensor>& biases() { return biases_; }
    const std::vector<Tensor>& weights() const { return weights_; }
    const std::vector<Tensor>& biases() const { return biases_; }

private:
    std::vector<LayerSpec> specs_;
    std::vector<Tensor> weights_;
    std::vector<Tensor> biases_;
};

}  // namespace m3s
