#include "m3s/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "m3s/digest.hpp"

namespace m3s {

using nlohmann::json;

// Defined in model.cpp.
json train_config_to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const json& doc);

namespace {

json spec_to_json(const LayerSpec& spec) {
    json doc;
    doc["kind"] = to_string(spec.kind);
    switch (spec.kind) {
        case LayerKind::Conv2d:
            doc["kernel"] = spec.kernel;
            doc["stride"] = spec.stride;
            doc["padding"] = spec.padding;
            doc["in_channels"] = spec.in_channels;
            doc["out_channels"] = spec.out_channels;
            break;
        case LayerKind::MaxPool2d:
            doc["kernel"] = spec.kernel;
            doc["stride"] = spec.stride;
            break;
        case LayerKind::Dense:
            doc["in_features"] = spec.in_features;
            doc["units"] = spec.units;
            break;
        case LayerKind::Relu:
        case LayerKind::Flatten:
            break;
    }
    return doc;
}

json stack_to_json(const LayerStack& stack) {
    json doc;
    json specs = json::array();
    for (const auto& spec : stack.specs()) specs.push_back(spec_to_json(spec));
    doc["specs"] = std::move(specs);

    json params = json::object();
    const auto tensors = stack.parameters();
    const auto names = stack.parameter_names();
    for (std::size_t k = 0; k < tensors.size(); ++k) {
        params[names[k]] = {{"shape", tensors[k]->shape},
                            {"data", tensors[k]->data}};
    }
    doc["params"] = std::move(params);
    return doc;
}

void load_stack_params(LayerStack& stack, const json& doc) {
    const auto names = stack.parameter_names();
    const auto tensors = stack.parameters();
    const json& params = doc.at("params");
    for (std::size_t k = 0; k < tensors.size(); ++k) {
        if (!params.contains(names[k])) {
            throw CheckpointError("missing parameter tensor '" + names[k] + "'");
        }
        const json& entry = params[names[k]];
        const auto shape = entry.at("shape").get<std::vector<std::size_t>>();
        if (shape != tensors[k]->shape) {
            throw CheckpointError("tensor '" + names[k] + "' has shape " +
                                  Tensor::shape_string(shape) + ", expected " +
                                  Tensor::shape_string(tensors[k]->shape));
        }
        const auto data = entry.at("data").get<std::vector<double>>();
        if (data.size() != tensors[k]->data.size()) {
            throw CheckpointError("tensor '" + names[k] + "' has wrong length");
        }
        tensors[k]->data = data;
    }
}

}  // namespace

void save_checkpoint(const M3sModel& model, const std::filesystem::path& path) {
    json doc;
    doc["format"] = kCheckpointFormat;
    doc["config"] = train_config_to_json(model.config);
    doc["config_hash"] = config_hash(model.config);

    json branches = json::array();
    for (const auto& branch : model.extractor.branches()) {
        branches.push_back(stack_to_json(branch));
    }
    doc["extractor"] = {{"branches", std::move(branches)},
                        {"head", stack_to_json(model.extractor.head())}};
    doc["weight_matrix"] = model.weight_matrix.values.data;

    json prob;
    json rows = json::array();
    for (const auto& row : model.probability_matrix.rows) {
        rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    prob["rows"] = std::move(rows);
    prob["support_counts"] = model.probability_matrix.support_counts;
    prob["zero_support"] = model.probability_matrix.zero_support;
    doc["probability_matrix"] = std::move(prob);

    std::ofstream out(path);
    if (!out) throw CheckpointError("cannot write '" + path.string() + "'");
    out << doc.dump(2) << '\n';
}

M3sModel load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw CheckpointError("cannot open '" + path.string() + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw CheckpointError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.contains("format") || doc["format"] != kCheckpointFormat) {
        throw CheckpointError("not a " + std::string(kCheckpointFormat) + " file");
    }

    M3sModel model;
    model.config = train_config_from_json(doc.at("config"));
    if (doc.contains("config_hash") &&
        doc["config_hash"].get<std::string>() != config_hash(model.config)) {
        throw CheckpointError("config hash mismatch; file may be corrupted");
    }

    model.extractor = MultiScaleExtractor(model.config.extractor);
    const json& extractor = doc.at("extractor");
    const json& branches = extractor.at("branches");
    if (branches.size() != model.extractor.branches().size()) {
        throw CheckpointError("branch count mismatch");
    }
    for (std::size_t b = 0; b < branches.size(); ++b) {
        load_stack_params(model.extractor.branches()[b], branches[b]);
    }
    load_stack_params(model.extractor.head(), extractor.at("head"));

    const auto weights = doc.at("weight_matrix").get<std::vector<double>>();
    if (weights.size() != model.weight_matrix.values.data.size()) {
        throw CheckpointError("weight matrix has wrong size");
    }
    model.weight_matrix.values.data = weights;

    const json& prob = doc.at("probability_matrix");
    const json& rows = prob.at("rows");
    if (rows.size() != kNumHistories) throw CheckpointError("probability matrix needs 5 rows");
    for (int h = 0; h < kNumHistories; ++h) {
        const auto row = rows[h].get<std::vector<double>>();
        if (row.size() != kNumSubtypes) {
            throw CheckpointError("probability matrix rows need 4 entries");
        }
        std::copy(row.begin(), row.end(), model.probability_matrix.rows[h].begin());
    }
    const auto support = prob.at("support_counts").get<std::vector<std::size_t>>();
    const auto zero = prob.at("zero_support").get<std::vector<bool>>();
    if (support.size() != kNumHistories || zero.size() != kNumHistories) {
        throw CheckpointError("probability matrix metadata has wrong size");
    }
    for (int h = 0; h < kNumHistories; ++h) {
        model.probability_matrix.support_counts[h] = support[h];
        model.probability_matrix.zero_support[h] = zero[h];
    }
    return model;
}

}  // namespace m3s
