#include "m3s/extractor.hpp"

#include <string>

#include "m3s/loss.hpp"

namespace m3s {

std::size_t ExtractorConfig::kernel_for(std::size_t index) const {
    if (index < kernels.size()) return kernels[index];
    const std::size_t scale = scales[index];
    if (scale <= 32) return 3;
    if (scale <= 64) return 5;
    return 7;
}

void ExtractorConfig::validate() const {
    if (scales.empty()) throw InvalidConfig("extractor needs at least one scale");
    if (!kernels.empty() && kernels.size() != scales.size()) {
        throw InvalidConfig("kernels must be empty or match scales in length");
    }
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (scales[i] < 8) {
            throw InvalidConfig("scale " + std::to_string(scales[i]) +
                                " too small for the branch layout (min 8)");
        }
        if (kernel_for(i) % 2 == 0) {
            throw InvalidConfig("branch kernels must be odd to preserve size");
        }
    }
    if (channels1 < 1 || channels2 < 1) throw InvalidConfig("channels must be >= 1");
}

std::vector<LayerSpec> MultiScaleExtractor::branch_specs(std::size_t kernel,
                                                         std::size_t channels1,
                                                         std::size_t channels2) {
    const std::size_t pad = (kernel - 1) / 2;
    return {
        LayerSpec::conv2d(1, channels1, kernel, 1, pad),
        LayerSpec::relu(),
        LayerSpec::maxpool2d(2, 2),
        LayerSpec::conv2d(channels1, channels2, kernel, 1, pad),
        LayerSpec::relu(),
        LayerSpec::conv2d(channels2, channels2, 2, 2, 0),  // f=2, s=2, p=0
        LayerSpec::maxpool2d(2, 2),
        LayerSpec::flatten(),
    };
}

MultiScaleExtractor::MultiScaleExtractor(const ExtractorConfig& config)
    : config_(config) {
    config_.validate();
    std::size_t concat_len = 0;
    for (std::size_t i = 0; i < config_.scales.size(); ++i) {
        LayerStack branch(branch_specs(config_.kernel_for(i), config_.channels1,
                                       config_.channels2));
        const auto out = branch.output_shape({1, config_.scales[i], config_.scales[i]});
        concat_len += Tensor::numel_of(out);
        branches_.push_back(std::move(branch));
    }
    head_ = LayerStack({LayerSpec::dense(concat_len, kNumSubtypes)});
}

void MultiScaleExtractor::init_params(Rng& rng) {
    for (auto& branch : branches_) branch.init_params(rng);
    head_.init_params(rng);
}

Tensor MultiScaleExtractor::image_tensor(const GafImage& image,
                                         std::size_t branch) const {
    const std::size_t scale = config_.scales[branch];
    if (image.scale != scale) {
        throw ShapeError("branch " + std::to_string(branch) + " expects a " +
                         std::to_string(scale) + "x" + std::to_string(scale) +
                         " image, got " + std::to_string(image.scale));
    }
    Tensor t({1, scale, scale});
    t.data = image.pixels;
    return t;
}

std::array<double, kNumSubtypes> MultiScaleExtractor::extract(
    const std::vector<GafImage>& images) const {
    if (images.size() != branches_.size()) {
        throw ShapeError("expected " + std::to_string(branches_.size()) +
                         " images, got " + std::to_string(images.size()));
    }
    Tensor concat({Tensor::numel_of({head_.specs()[0].in_features})});
    std::size_t offset = 0;
    for (std::size_t b = 0; b < branches_.size(); ++b) {
        const Tensor embedding = branches_[b].forward(image_tensor(images[b], b));
        std::copy(embedding.data.begin(), embedding.data.end(),
                  concat.data.begin() + offset);
        offset += embedding.numel();
    }
    const Tensor logits = head_.forward(concat);
    const auto probs = softmax(logits.data);
    std::array<double, kNumSubtypes> e_raman{};
    std::copy(probs.begin(), probs.end(), e_raman.begin());
    return e_raman;
}

MultiScaleExtractor::Cache MultiScaleExtractor::forward_cached(
    const std::vector<GafImage>& images) const {
    if (images.size() != branches_.size()) {
        throw ShapeError("expected " + std::to_string(branches_.size()) +
                         " images, got " + std::to_string(images.size()));
    }
    Cache cache;
    cache.concat = Tensor({head_.specs()[0].in_features});
    std::size_t offset = 0;
    for (std::size_t b = 0; b < branches_.size(); ++b) {
        auto branch_cache = branches_[b].forward_cached(image_tensor(images[b], b));
        std::copy(branch_cache.output.data.begin(), branch_cache.output.data.end(),
                  cache.concat.data.begin() + offset);
        offset += branch_cache.output.numel();
        cache.branches.push_back(std::move(branch_cache));
    }
    cache.head = head_.forward_cached(cache.concat);
    std::copy(cache.head.output.data.begin(), cache.head.output.data.end(),
              cache.logits.begin());
    const auto probs = softmax(cache.head.output.data);
    std::copy(probs.begin(), probs.end(), cache.e_raman.begin());
    return cache;
}

void MultiScaleExtractor::backward(const Cache& cache,
                                   const std::array<double, kNumSubtypes>& grad_e_raman) {
    const auto grad_logits = softmax_backward(cache.e_raman, grad_e_raman);
    std::array<double, kNumSubtypes> g{};
    std::copy(grad_logits.begin(), grad_logits.end(), g.begin());
    backward_from_logits(cache, g);
}

void MultiScaleExtractor::backward_from_logits(
    const Cache& cache, const std::array<double, kNumSubtypes>& grad_logits) {
    Tensor upstream({kNumSubtypes});
    std::copy(grad_logits.begin(), grad_logits.end(), upstream.data.begin());
    const Tensor grad_concat = head_.backward(cache.head, upstream);

    std::size_t offset = 0;
    for (std::size_t b = 0; b < branches_.size(); ++b) {
        const std::size_t len = cache.branches[b].output.numel();
        Tensor grad_branch({len});
        std::copy(grad_concat.data.begin() + offset,
                  grad_concat.data.begin() + offset + len, grad_branch.data.begin());
        branches_[b].backward(cache.branches[b], grad_branch);
        offset += len;
    }
}

std::vector<Tensor*> MultiScaleExtractor::parameters() {
    std::vector<Tensor*> params;
    for (auto& branch : branches_) {
        for (Tensor* t : branch.parameters()) params.push_back(t);
    }
    for (Tensor* t : head_.parameters()) params.push_back(t);
    return params;
}

std::vector<std::pair<std::string, Tensor*>> MultiScaleExtractor::named_parameters() {
    std::vector<std::pair<std::string, Tensor*>> named;
    for (std::size_t b = 0; b < branches_.size(); ++b) {
        const auto params = branches_[b].parameters();
        const auto names = branches_[b].parameter_names();
        for (std::size_t k = 0; k < params.size(); ++k) {
            named.emplace_back("branch" + std::to_string(config_.scales[b]) + "." +
                                   names[k],
                               params[k]);
        }
    }
    const auto params = head_.parameters();
    const auto names = head_.parameter_names();
    for (std::size_t k = 0; k < params.size(); ++k) {
        named.emplace_back("head." + names[k], params[k]);
    }
    return named;
}

void MultiScaleExtractor::zero_grad() {
    for (auto& branch : branches_) branch.zero_grad();
    head_.zero_grad();
}

std::size_t MultiScaleExtractor::param_count() const {
    std::size_t count = head_.param_count();
    for (const auto& branch : branches_) count += branch.param_count();
    return count;
}

std::size_t MultiScaleExtractor::forward_macs() const {
    std::size_t macs = head_.forward_macs({head_.specs()[0].in_features});
    for (std::size_t b = 0; b < branches_.size(); ++b) {
        macs += branches_[b].forward_macs({1, config_.scales[b], config_.scales[b]});
    }
    return macs;
}

}  // namespace m3s
