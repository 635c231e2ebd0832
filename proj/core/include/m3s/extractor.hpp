#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "m3s/gaf.hpp"
#include "m3s/net.hpp"
#include "m3s/types.hpp"

namespace m3s {

/// Architecture knobs of the multi-scale extractor. One convolutional branch
/// per scale; kernel sizes default to 3/5/7 for scales 32/64/128 so the
/// receptive fields stay roughly balanced across resolutions.
struct ExtractorConfig {
    std::vector<std::size_t> scales = {32, 64};
    std::vector<std::size_t> kernels;  // empty: derived from scales
    std::size_t channels1 = 8;
    std::size_t channels2 = 16;

    std::size_t kernel_for(std::size_t index) const;
    void validate() const;
};

/// Two (or more) convolutional branches, one per image scale, whose pooled
/// embeddings are concatenated and mapped by a dense head to 4 class scores.
/// The spectral prediction e_R is the softmax of those scores.
class MultiScaleExtractor {
public:
    MultiScaleExtractor() = default;
    explicit MultiScaleExtractor(const ExtractorConfig& config);

    void init_params(Rng& rng);

    /// Inference path: e_R from one image per configured scale (same order).
    std::array<double, kNumSubtypes> extract(const std::vector<GafImage>& images) const;

    struct Cache {
        std::vector<LayerStack::Cache> branches;
        Tensor concat;
        LayerStack::Cache head;
        std::array<double, kNumSubtypes> logits;
        std::array<double, kNumSubtypes> e_raman;
    };
    Cache forward_cached(const std::vector<GafImage>& images) const;

    /// Backpropagates dL/de_R through the softmax, head and branches,
    /// accumulating parameter gradients.
    void backward(const Cache& cache, const std::array<double, kNumSubtypes>& grad_e_raman);
    /// Same entry point when the gradient is already wrt the head logits
    /// (spectral-only training path).
    void backward_from_logits(const Cache& cache,
                              const std::array<double, kNumSubtypes>& grad_logits);

    std::vector<Tensor*> parameters();
    std::vector<std::pair<std::string, Tensor*>> named_parameters();
    void zero_grad();

    const std::vector<std::size_t>& scales() const { return config_.scales; }
    const ExtractorConfig& config() const { return config_; }
    std::vector<LayerStack>& branches() { return branches_; }
    const std::vector<LayerStack>& branches() const { return branches_; }
    LayerStack& head() { return head_; }
    const LayerStack& head() const { return head_; }

    std::size_t param_count() const;
    std::size_t forward_macs() const;

    /// Branch layout for one scale/kernel pair; exposed for complexity
    /// reporting and tests.
    static std::vector<LayerSpec> branch_specs(std::size_t kernel,
                                               std::size_t channels1,
                                               std::size_t channels2);

private:
    Tensor image_tensor(const GafImage& image, std::size_t branch) const;

    ExtractorConfig config_;
    std::vector<LayerStack> branches_;
    LayerStack head_;
};

}  // namespace m3s
