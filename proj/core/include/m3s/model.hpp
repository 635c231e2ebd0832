#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "m3s/extractor.hpp"
#include "m3s/fusion.hpp"
#include "m3s/types.hpp"

namespace m3s {

/// How the 6x4 weight matrix behaves during training and prediction:
///   Adaptive  - starts at all-ones, learns with the extractor (default)
///   Fixed     - frozen at the expert ratio (0.9 spectral / 0.02 per history)
///   RamanOnly - no fusion at all; predictions come from e_R alone
enum class WeightMode { Adaptive, Fixed, RamanOnly };

const char* to_string(WeightMode mode);
const char* to_string_policy(FusionPolicy policy);

struct TrainConfig {
    ExtractorConfig extractor;
    std::size_t epochs = 500;
    double learning_rate = 0.001;
    std::size_t batch_size = 1;
    std::uint64_t seed = 1;
    FusionPolicy policy = FusionPolicy::Masked;
    WeightMode weight_mode = WeightMode::Adaptive;
    double fixed_ratio = 0.9;

    void validate() const;
};

TrainConfig load_train_config(const std::filesystem::path& path);
void save_train_config(const TrainConfig& config, const std::filesystem::path& path);
/// Canonical-form hash of a config; embedded in checkpoints and manifests.
std::string config_hash(const TrainConfig& config);

/// The complete trainable system: extractor branches + head, the trainable
/// weight matrix and the probability matrix estimated from the training
/// split. Immutable once training finishes; safe for concurrent prediction.
struct M3sModel {
    TrainConfig config;
    MultiScaleExtractor extractor;
    WeightMatrix weight_matrix;
    ProbabilityMatrix probability_matrix;
};

/// Untrained model: initialized extractor parameters, all-ones (or fixed)
/// weight matrix, probability matrix built from `train_set`.
M3sModel build_model(const Dataset& train_set, const TrainConfig& config);

struct EpochStats {
    std::size_t epoch = 0;   // 1-based
    double mean_loss = 0.0;  // cross-entropy averaged over samples
};

/// Invoked after every epoch; return false to stop training early.
using EpochCallback = std::function<bool(const M3sModel&, const EpochStats&)>;

struct TrainResult {
    M3sModel model;
    std::vector<EpochStats> log;
    bool stopped_early = false;
};

/// End-to-end training: GAF-encode every sample at the configured scales
/// (precomputed once; the encoder is pure), then per-sample SGD through the
/// fused graph. The test split is never an argument here; the probability
/// matrix can only see training data. Throws DivergedLoss when the epoch
/// loss turns non-finite.
TrainResult train(const Dataset& train_set, const TrainConfig& config,
                  const EpochCallback& callback = {});

struct Prediction {
    std::array<double, kNumSubtypes> probabilities;
    SubtypeLabel label;  // argmax; ties -> lowest class index
};

Prediction predict(const M3sModel& model, const RamanSpectrum& spec);

/// The extractor-only prediction e_R (no history fusion), regardless of the
/// model's weight mode.
std::array<double, kNumSubtypes> spectral_prediction(const M3sModel& model,
                                                     const RamanSpectrum& spec);

/// Batch prediction; encoding runs on `threads` workers (0 = auto).
std::vector<Prediction> predict_dataset(const M3sModel& model, const Dataset& dataset,
                                        unsigned threads = 0);

/// Per-sample GAF images at the given scales, encoded in parallel.
/// Results are independent of the thread count.
std::vector<std::vector<GafImage>> encode_dataset(const Dataset& dataset,
                                                  const std::vector<std::size_t>& scales,
                                                  unsigned threads = 0);

/// Thread budget for encoding: the M3S_THREADS environment variable when set
/// (clamped to >= 1), otherwise the hardware concurrency.
unsigned encoder_threads();

}  // namespace m3s
