#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "m3s/types.hpp"

namespace m3s {

/// One Gaussian component amplitude * exp(-(x - center)^2 / (2 width^2))
/// evaluated on the integer grid x = 0..L-1.
struct PeakTemplate {
    double center = 0.0;
    double width = 1.0;
    double amplitude = 1.0;
};

struct ClassTemplate {
    std::size_t count = 100;
    std::vector<PeakTemplate> peaks;
    std::array<double, kNumHistories> history_prob{};  // P(flag | class)
};

/// Configuration of the synthetic spectrum generator, the desk-scale stand-in
/// for clinical data. One entry per subtype, indexed by SubtypeLabel order.
struct SynthConfig {
    std::size_t sequence_length = kSequenceLength;
    double noise_sigma = 0.05;
    std::array<ClassTemplate, kNumSubtypes> classes;

    /// Throws InvalidConfig on sigma < 0, count < 1, probability outside [0,1].
    void validate() const;
};

/// Draws `count` samples per class: summed Gaussian peaks plus iid
/// N(0, sigma^2) per-point noise, history flags Bernoulli per the configured
/// conditionals. Bitwise-reproducible for a fixed (config, seed).
Dataset synth_generate(const SynthConfig& config, std::uint64_t seed);

/// Four classes with well-separated peak positions and mildly informative
/// history flags; 100 samples per class.
SynthConfig default_synth_config();

/// AMI and CAD share identical peak templates (spectrally indistinguishable)
/// but carry disjoint history flags; AF and CON stay separable. Exercises the
/// history-fusion path.
SynthConfig twin_class_synth_config();

SynthConfig load_synth_config(const std::filesystem::path& path);
void save_synth_config(const SynthConfig& config, const std::filesystem::path& path);

}  // namespace m3s
