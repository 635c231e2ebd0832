#include "m3s/synth.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "m3s/rng.hpp"

namespace m3s {

using nlohmann::json;

void SynthConfig::validate() const {
    if (sequence_length < 2) {
        throw InvalidConfig("sequence_length must be >= 2");
    }
    if (!(noise_sigma >= 0.0)) {
        throw InvalidConfig("noise_sigma must be >= 0, got " +
                            std::to_string(noise_sigma));
    }
    for (int c = 0; c < kNumSubtypes; ++c) {
        const auto& cls = classes[c];
        const std::string name = to_string(kAllSubtypes[c]);
        if (cls.count < 1) {
            throw InvalidConfig("count for class " + name + " must be >= 1");
        }
        if (cls.peaks.empty()) {
            throw InvalidConfig("class " + name + " needs at least one peak");
        }
        for (const auto& peak : cls.peaks) {
            if (!(peak.width > 0.0)) {
                throw InvalidConfig("peak width must be > 0 in class " + name);
            }
        }
        for (int h = 0; h < kNumHistories; ++h) {
            const double p = cls.history_prob[h];
            if (!(p >= 0.0 && p <= 1.0)) {
                throw InvalidConfig("history_prob." + std::string(kHistoryNames[h]) +
                                    " for class " + name + " outside [0,1]");
            }
        }
    }
}

Dataset synth_generate(const SynthConfig& config, std::uint64_t seed) {
    config.validate();
    const std::size_t length = config.sequence_length;

    // Evaluate each class template once; noise is the only per-sample term.
    std::array<std::vector<double>, kNumSubtypes> templates;
    for (int c = 0; c < kNumSubtypes; ++c) {
        auto& base = templates[c];
        base.assign(length, 0.0);
        for (const auto& peak : config.classes[c].peaks) {
            const double inv_two_w2 = 1.0 / (2.0 * peak.width * peak.width);
            for (std::size_t k = 0; k < length; ++k) {
                const double d = static_cast<double>(k) - peak.center;
                base[k] += peak.amplitude * std::exp(-d * d * inv_two_w2);
            }
        }
    }

    Rng rng(seed);
    Dataset dataset;
    dataset.source = "synthetic";
    dataset.seed = seed;

    std::size_t serial = 0;
    for (int c = 0; c < kNumSubtypes; ++c) {
        const auto& cls = config.classes[c];
        for (std::size_t s = 0; s < cls.count; ++s) {
            RamanSpectrum spec;
            char id[16];
            std::snprintf(id, sizeof(id), "rec%05zu", serial++);
            spec.id = id;
            spec.label = kAllSubtypes[c];
            spec.values.resize(length);
            for (std::size_t k = 0; k < length; ++k) {
                spec.values[k] = templates[c][k] +
                                 (config.noise_sigma > 0.0
                                      ? rng.normal(0.0, config.noise_sigma)
                                      : 0.0);
            }
            for (int h = 0; h < kNumHistories; ++h) {
                spec.history[h] = rng.bernoulli(cls.history_prob[h]);
            }
            dataset.samples.push_back(std::move(spec));
        }
    }
    return dataset;
}

SynthConfig default_synth_config() {
    SynthConfig config;
    config.noise_sigma = 0.05;
    // Distinct dominant peak positions per class; a shared broad hump keeps
    // the sequences looking like one family of spectra.
    const PeakTemplate hump{512.0, 300.0, 0.30};
    config.classes[0] = {100,
                         {hump, {200.0, 15.0, 1.00}, {620.0, 22.0, 0.55}},
                         {0.60, 0.50, 0.30, 0.15, 0.55}};
    config.classes[1] = {100,
                         {hump, {350.0, 15.0, 1.00}, {760.0, 22.0, 0.55}},
                         {0.50, 0.60, 0.40, 0.10, 0.45}};
    config.classes[2] = {100,
                         {hump, {500.0, 15.0, 1.00}, {150.0, 22.0, 0.50}},
                         {0.20, 0.50, 0.25, 0.20, 0.30}};
    config.classes[3] = {100,
                         {hump, {820.0, 25.0, 0.85}, {300.0, 10.0, 0.40}},
                         {0.05, 0.20, 0.10, 0.02, 0.25}};
    return config;
}

SynthConfig twin_class_synth_config() {
    SynthConfig config;
    config.noise_sigma = 0.05;
    const PeakTemplate hump{512.0, 300.0, 0.30};
    // AMI and CAD: identical spectral templates, disjoint flags.
    const std::vector<PeakTemplate> twin = {hump, {260.0, 15.0, 1.00}, {700.0, 22.0, 0.55}};
    config.classes[0] = {100, twin, {1.00, 0.00, 0.30, 0.00, 0.30}};
    config.classes[1] = {100, twin, {0.00, 1.00, 0.30, 0.00, 0.30}};
    config.classes[2] = {100,
                         {hump, {480.0, 15.0, 1.00}, {150.0, 22.0, 0.50}},
                         {0.00, 0.00, 0.30, 0.50, 0.30}};
    config.classes[3] = {100,
                         {hump, {840.0, 25.0, 0.85}, {330.0, 10.0, 0.40}},
                         {0.00, 0.00, 0.30, 0.00, 0.30}};
    return config;
}

SynthConfig load_synth_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidConfig("cannot open '" + path.string() + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw InvalidConfig(std::string("invalid JSON: ") + e.what());
    }

    SynthConfig config;
    config.sequence_length = doc.value("sequence_length", kSequenceLength);
    config.noise_sigma = doc.value("noise_sigma", 0.05);
    const std::size_t default_count = doc.value("samples_per_class", std::size_t{100});

    if (!doc.contains("classes") || !doc["classes"].is_object()) {
        throw InvalidConfig("config needs a 'classes' object");
    }
    for (int c = 0; c < kNumSubtypes; ++c) {
        const std::string name = to_string(kAllSubtypes[c]);
        if (!doc["classes"].contains(name)) {
            throw InvalidConfig("missing class '" + name + "'");
        }
        const json& cls = doc["classes"][name];
        auto& out = config.classes[c];
        out.count = cls.value("count", default_count);
        out.peaks.clear();
        for (const json& peak : cls.at("peaks")) {
            out.peaks.push_back({peak.at("center").get<double>(),
                                 peak.at("width").get<double>(),
                                 peak.at("amplitude").get<double>()});
        }
        const json& history = cls.at("history");
        for (int h = 0; h < kNumHistories; ++h) {
            out.history_prob[h] = history.at(kHistoryNames[h]).get<double>();
        }
    }
    config.validate();
    return config;
}

void save_synth_config(const SynthConfig& config, const std::filesystem::path& path) {
    json doc;
    doc["sequence_length"] = config.sequence_length;
    doc["noise_sigma"] = config.noise_sigma;
    json classes;
    for (int c = 0; c < kNumSubtypes; ++c) {
        const auto& cls = config.classes[c];
        json entry;
        entry["count"] = cls.count;
        json peaks = json::array();
        for (const auto& peak : cls.peaks) {
            peaks.push_back({{"center", peak.center},
                             {"width", peak.width},
                             {"amplitude", peak.amplitude}});
        }
        entry["peaks"] = std::move(peaks);
        json history;
        for (int h = 0; h < kNumHistories; ++h) {
            history[kHistoryNames[h]] = cls.history_prob[h];
        }
        entry["history"] = std::move(history);
        classes[to_string(kAllSubtypes[c])] = std::move(entry);
    }
    doc["classes"] = std::move(classes);
    std::ofstream out(path);
    if (!out) throw InvalidConfig("cannot write '" + path.string() + "'");
    out << doc.dump(2) << '\n';
}

}  // namespace m3s
