#include "m3s/model.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "m3s/digest.hpp"
#include "m3s/loss.hpp"
#include "m3s/optimizer.hpp"

namespace m3s {

using nlohmann::json;

const char* to_string(WeightMode mode) {
    switch (mode) {
        case WeightMode::Adaptive: return "adaptive";
        case WeightMode::Fixed: return "fixed";
        case WeightMode::RamanOnly: return "raman";
    }
    return "?";
}

const char* to_string_policy(FusionPolicy policy) { return to_string(policy); }

namespace {

WeightMode weight_mode_from(const std::string& text) {
    if (text == "adaptive") return WeightMode::Adaptive;
    if (text == "fixed") return WeightMode::Fixed;
    if (text == "raman") return WeightMode::RamanOnly;
    throw InvalidConfig("unknown weight mode '" + text + "'");
}

FusionPolicy policy_from(const std::string& text) {
    if (text == "global") return FusionPolicy::Global;
    if (text == "masked") return FusionPolicy::Masked;
    throw InvalidConfig("unknown fusion policy '" + text + "'");
}

}  // namespace

void TrainConfig::validate() const {
    extractor.validate();
    if (!(learning_rate > 0.0)) throw InvalidConfig("learning_rate must be > 0");
    if (batch_size < 1) throw InvalidConfig("batch_size must be >= 1");
    if (weight_mode == WeightMode::Fixed &&
        !(fixed_ratio > 0.0 && fixed_ratio < 1.0)) {
        throw InvalidConfig("fixed_ratio must lie in (0, 1)");
    }
}

json train_config_to_json(const TrainConfig& config) {
    json doc;
    doc["scales"] = config.extractor.scales;
    doc["kernels"] = config.extractor.kernels;
    doc["channels"] = {config.extractor.channels1, config.extractor.channels2};
    doc["epochs"] = config.epochs;
    doc["learning_rate"] = config.learning_rate;
    doc["batch_size"] = config.batch_size;
    doc["seed"] = config.seed;
    doc["policy"] = to_string(config.policy);
    doc["weight_mode"] = to_string(config.weight_mode);
    doc["fixed_ratio"] = config.fixed_ratio;
    return doc;
}

TrainConfig train_config_from_json(const json& doc) {
    TrainConfig config;
    if (doc.contains("scales")) {
        config.extractor.scales = doc["scales"].get<std::vector<std::size_t>>();
    }
    if (doc.contains("kernels")) {
        config.extractor.kernels = doc["kernels"].get<std::vector<std::size_t>>();
    }
    if (doc.contains("channels")) {
        const auto channels = doc["channels"].get<std::vector<std::size_t>>();
        if (channels.size() != 2) throw InvalidConfig("channels must hold 2 entries");
        config.extractor.channels1 = channels[0];
        config.extractor.channels2 = channels[1];
    }
    config.epochs = doc.value("epochs", config.epochs);
    config.learning_rate = doc.value("learning_rate", config.learning_rate);
    config.batch_size = doc.value("batch_size", config.batch_size);
    config.seed = doc.value("seed", config.seed);
    if (doc.contains("policy")) config.policy = policy_from(doc["policy"]);
    if (doc.contains("weight_mode")) {
        config.weight_mode = weight_mode_from(doc["weight_mode"]);
    }
    config.fixed_ratio = doc.value("fixed_ratio", config.fixed_ratio);
    config.validate();
    return config;
}

TrainConfig load_train_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidConfig("cannot open '" + path.string() + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw InvalidConfig(std::string("invalid JSON: ") + e.what());
    }
    return train_config_from_json(doc);
}

void save_train_config(const TrainConfig& config, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InvalidConfig("cannot write '" + path.string() + "'");
    out << train_config_to_json(config).dump(2) << '\n';
}

std::string config_hash(const TrainConfig& config) {
    return to_hex(fnv1a64(train_config_to_json(config).dump()));
}

unsigned encoder_threads() {
    if (const char* env = std::getenv("M3S_THREADS")) {
        const long parsed = std::strtol(env, nullptr, 10);
        if (parsed >= 1) return static_cast<unsigned>(parsed);
        return 1;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

std::vector<std::vector<GafImage>> encode_dataset(const Dataset& dataset,
                                                  const std::vector<std::size_t>& scales,
                                                  unsigned threads) {
    if (threads == 0) threads = encoder_threads();
    const std::size_t n = dataset.size();
    std::vector<std::vector<GafImage>> images(n);

    auto encode_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            images[k].reserve(scales.size());
            for (std::size_t scale : scales) {
                images[k].push_back(encode(dataset.samples[k], scale));
            }
        }
    };

    if (threads <= 1 || n < 2) {
        encode_range(0, n);
        return images;
    }
    const std::size_t workers = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * n / workers;
        const std::size_t end = (w + 1) * n / workers;
        pool.emplace_back(encode_range, begin, end);
    }
    for (auto& t : pool) t.join();
    return images;
}

M3sModel build_model(const Dataset& train_set, const TrainConfig& config) {
    config.validate();
    M3sModel model;
    model.config = config;
    model.extractor = MultiScaleExtractor(config.extractor);
    Rng rng(config.seed);
    model.extractor.init_params(rng);
    model.weight_matrix = config.weight_mode == WeightMode::Fixed
                              ? WeightMatrix::fixed_ratio(config.fixed_ratio)
                              : WeightMatrix::ones();
    model.probability_matrix = build_probability_matrix(train_set);
    return model;
}

TrainResult train(const Dataset& train_set, const TrainConfig& config,
                  const EpochCallback& callback) {
    config.validate();
    if (train_set.empty()) throw InvalidConfig("training set is empty");
    for (const auto& sample : train_set.samples) {
        if (!sample.label) {
            throw UnlabeledSample("sample '" + sample.id + "' has no label");
        }
    }

    TrainResult result;
    result.model = build_model(train_set, config);
    M3sModel& model = result.model;

    const auto images = encode_dataset(train_set, config.extractor.scales);

    const std::size_t n = train_set.size();
    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < n; ++k) order[k] = k;

    const bool train_weights = config.weight_mode == WeightMode::Adaptive;
    const bool fused = config.weight_mode != WeightMode::RamanOnly;
    model.weight_matrix.values.ensure_grad();

    // The init consumed part of the seed stream; continue it for shuffles.
    Rng rng(config.seed + 0x9e3779b97f4a7c15ULL);

    const auto run_epoch = [&]() {
        double total_loss = 0.0;
        std::size_t cursor = 0;
        while (cursor < n) {
            const std::size_t batch_end = std::min(cursor + config.batch_size, n);
            const double batch_count = static_cast<double>(batch_end - cursor);
            model.extractor.zero_grad();
            model.weight_matrix.values.zero_grad();

            for (std::size_t b = cursor; b < batch_end; ++b) {
                const std::size_t idx = order[b];
                const auto& sample = train_set.samples[idx];
                const auto target = static_cast<std::size_t>(*sample.label);

                auto cache = model.extractor.forward_cached(images[idx]);
                if (fused) {
                    const FusionOutput fusion =
                        fuse(cache.e_raman, model.probability_matrix, sample.history,
                             model.weight_matrix, config.policy);
                    const auto sce = softmax_cross_entropy(fusion.class_scores, target);
                    total_loss += sce.loss;

                    std::array<double, kNumSubtypes> grad_scores{};
                    std::copy(sce.grad.begin(), sce.grad.end(), grad_scores.begin());
                    const FusionGradients grads =
                        fuse_backward(cache.e_raman, model.probability_matrix,
                                      sample.history, model.weight_matrix,
                                      config.policy, grad_scores);
                    if (train_weights) {
                        for (std::size_t k = 0; k < grads.weight_matrix.size(); ++k) {
                            model.weight_matrix.values.grad[k] += grads.weight_matrix[k];
                        }
                    }
                    model.extractor.backward(cache, grads.e_raman);
                } else {
                    const auto sce = softmax_cross_entropy(cache.logits, target);
                    total_loss += sce.loss;
                    std::array<double, kNumSubtypes> grad_logits{};
                    std::copy(sce.grad.begin(), sce.grad.end(), grad_logits.begin());
                    model.extractor.backward_from_logits(cache, grad_logits);
                }
            }

            // Mean gradient over the batch.
            const double lr = config.learning_rate / batch_count;
            for (Tensor* t : model.extractor.parameters()) sgd_step(*t, lr);
            if (train_weights) sgd_step(model.weight_matrix.values, lr);
            cursor = batch_end;
        }
        return total_loss;
    };

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        rng.shuffle(order);
        double total_loss = 0.0;
        try {
            total_loss = run_epoch();
        } catch (const NonFinite&) {
            // Inputs were validated up front, so NaN/Inf mid-epoch means the
            // parameters blew up.
            throw DivergedLoss("loss became non-finite at epoch " +
                               std::to_string(epoch));
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.mean_loss = total_loss / static_cast<double>(n);
        if (!std::isfinite(stats.mean_loss)) {
            throw DivergedLoss("loss became non-finite at epoch " +
                               std::to_string(epoch));
        }
        result.log.push_back(stats);
        if (callback && !callback(model, stats)) {
            result.stopped_early = true;
            break;
        }
    }
    return result;
}

namespace {

Prediction to_prediction(const std::array<double, kNumSubtypes>& probabilities) {
    Prediction pred;
    pred.probabilities = probabilities;
    std::size_t best = 0;
    for (std::size_t c = 1; c < kNumSubtypes; ++c) {
        if (probabilities[c] > probabilities[best]) best = c;  // ties keep lowest
    }
    pred.label = kAllSubtypes[best];
    return pred;
}

std::vector<GafImage> encode_for_model(const M3sModel& model,
                                       const RamanSpectrum& spec) {
    std::vector<GafImage> images;
    images.reserve(model.extractor.scales().size());
    for (std::size_t scale : model.extractor.scales()) {
        images.push_back(encode(spec, scale));
    }
    return images;
}

}  // namespace

Prediction predict(const M3sModel& model, const RamanSpectrum& spec) {
    const auto images = encode_for_model(model, spec);
    const auto e_raman = model.extractor.extract(images);
    if (model.config.weight_mode == WeightMode::RamanOnly) {
        return to_prediction(e_raman);
    }
    const FusionOutput fusion = fuse(e_raman, model.probability_matrix, spec.history,
                                     model.weight_matrix, model.config.policy);
    return to_prediction(fusion.probabilities);
}

std::array<double, kNumSubtypes> spectral_prediction(const M3sModel& model,
                                                     const RamanSpectrum& spec) {
    return model.extractor.extract(encode_for_model(model, spec));
}

std::vector<Prediction> predict_dataset(const M3sModel& model, const Dataset& dataset,
                                        unsigned threads) {
    const auto images = encode_dataset(dataset, model.extractor.scales(), threads);
    std::vector<Prediction> predictions;
    predictions.reserve(dataset.size());
    for (std::size_t k = 0; k < dataset.size(); ++k) {
        const auto e_raman = model.extractor.extract(images[k]);
        if (model.config.weight_mode == WeightMode::RamanOnly) {
            predictions.push_back(to_prediction(e_raman));
        } else {
            const FusionOutput fusion =
                fuse(e_raman, model.probability_matrix, dataset.samples[k].history,
                     model.weight_matrix, model.config.policy);
            predictions.push_back(to_prediction(fusion.probabilities));
        }
    }
    return predictions;
}

}  // namespace m3s
