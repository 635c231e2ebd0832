#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "m3s/checkpoint.hpp"
#include "m3s/dataset_io.hpp"
#include "m3s/errors.hpp"
#include "m3s/gaf.hpp"
#include "m3s/metrics.hpp"
#include "m3s/model.hpp"
#include "m3s/split.hpp"
#include "m3s/synth.hpp"

#include "manifest.hpp"

namespace m3s::cli {

namespace fs = std::filesystem;

namespace {

RunManifest start_manifest(const std::string& command, const CommonArgs& common) {
    RunManifest manifest;
    manifest.command = command;
    manifest.argv = common.argv;
    manifest.git_describe = git_describe_string();
    manifest.started_at = utc_timestamp();
    return manifest;
}

SynthConfig resolve_synth_config(const SynthArgs& args) {
    if (!args.config_path.empty()) return load_synth_config(args.config_path);
    if (args.preset == "default") return default_synth_config();
    if (args.preset == "twins") return twin_class_synth_config();
    throw InvalidConfig("unknown preset '" + args.preset + "'");
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path.string() + "'");
    out << text;
}

TrainConfig resolve_train_config(const TrainArgs& args) {
    TrainConfig config;
    if (!args.config_path.empty()) config = load_train_config(args.config_path);
    if (!args.scales.empty()) {
        config.extractor.scales = args.scales;
        config.extractor.kernels.clear();
    }
    if (!args.weights.empty()) {
        if (args.weights == "adaptive") config.weight_mode = WeightMode::Adaptive;
        else if (args.weights == "fixed") config.weight_mode = WeightMode::Fixed;
        else if (args.weights == "raman") config.weight_mode = WeightMode::RamanOnly;
        else throw InvalidConfig("unknown weight mode '" + args.weights + "'");
    }
    if (!args.policy.empty()) {
        if (args.policy == "masked") config.policy = FusionPolicy::Masked;
        else if (args.policy == "global") config.policy = FusionPolicy::Global;
        else throw InvalidConfig("unknown fusion policy '" + args.policy + "'");
    }
    if (args.ratio >= 0.0) config.fixed_ratio = args.ratio;
    if (args.epochs >= 0) config.epochs = static_cast<std::size_t>(args.epochs);
    if (args.lr > 0.0) config.learning_rate = args.lr;
    if (args.batch_size > 0) config.batch_size = static_cast<std::size_t>(args.batch_size);
    if (args.seed >= 0) config.seed = static_cast<std::uint64_t>(args.seed);
    config.validate();
    return config;
}

MetricReport evaluate_on(const M3sModel& model, const Dataset& dataset,
                         ConfusionMatrix& cm_out) {
    std::vector<SubtypeLabel> preds;
    std::vector<SubtypeLabel> truths;
    const auto predictions = predict_dataset(model, dataset);
    preds.reserve(predictions.size());
    for (std::size_t k = 0; k < predictions.size(); ++k) {
        if (!dataset.samples[k].label) {
            throw UnlabeledSample("sample '" + dataset.samples[k].id +
                                  "' has no label; cannot evaluate");
        }
        preds.push_back(predictions[k].label);
        truths.push_back(*dataset.samples[k].label);
    }
    cm_out = confusion(preds, truths);
    MetricReport report = compute_metrics(cm_out);
    report.params = count_params(model);
    report.flops = count_flops(model);
    return report;
}

}  // namespace

void cmd_synth(const SynthArgs& args, const CommonArgs& common) {
    RunManifest manifest = start_manifest("synth", common);
    manifest.seed = args.seed;
    if (!args.config_path.empty()) manifest.add_input(args.config_path);

    const SynthConfig config = resolve_synth_config(args);
    const Dataset dataset = synth_generate(config, args.seed);

    const fs::path out_path(args.out);
    if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
    save_dataset(dataset, out_path);
    manifest.add_output(out_path);
    std::cout << "wrote " << dataset.size() << " samples to " << out_path.string()
              << "\n";

    manifest.finished_at = utc_timestamp();
    manifest.write(out_path.string() + ".manifest.json");
}

void cmd_encode(const EncodeArgs& args, const CommonArgs& common) {
    RunManifest manifest = start_manifest("encode", common);
    manifest.add_input(args.data);

    const Dataset dataset = load_dataset(args.data);
    fs::create_directories(args.out_dir);
    const auto images = encode_dataset(dataset, args.scales);

    if (args.format == "csv") {
        for (std::size_t s = 0; s < args.scales.size(); ++s) {
            const fs::path path =
                fs::path(args.out_dir) / ("gaf_" + std::to_string(args.scales[s]) + ".csv");
            std::ofstream out(path);
            if (!out) throw ParseError("cannot write '" + path.string() + "'");
            out << "id";
            const std::size_t n_px = args.scales[s] * args.scales[s];
            for (std::size_t k = 0; k < n_px; ++k) out << ",v" << k;
            out << "\n";
            for (std::size_t i = 0; i < dataset.size(); ++i) {
                out << dataset.samples[i].id;
                for (double px : images[i][s].pixels) out << ',' << format_double(px);
                out << "\n";
            }
            manifest.add_output(path);
        }
    } else if (args.format == "pgm") {
        for (std::size_t i = 0; i < dataset.size(); ++i) {
            for (std::size_t s = 0; s < args.scales.size(); ++s) {
                const GafImage& image = images[i][s];
                const fs::path path =
                    fs::path(args.out_dir) /
                    (dataset.samples[i].id + "_" + std::to_string(image.scale) + ".pgm");
                std::ofstream out(path, std::ios::binary);
                if (!out) throw ParseError("cannot write '" + path.string() + "'");
                out << "P5\n" << image.scale << " " << image.scale << "\n255\n";
                for (double px : image.pixels) {
                    const double mapped = std::round((px + 1.0) * 0.5 * 255.0);
                    out.put(static_cast<char>(
                        static_cast<unsigned char>(std::clamp(mapped, 0.0, 255.0))));
                }
                manifest.add_output(path);
            }
        }
    } else {
        throw InvalidConfig("unknown encode format '" + args.format + "'");
    }
    std::cout << "encoded " << dataset.size() << " spectra at " << args.scales.size()
              << " scale(s) into " << args.out_dir << "\n";

    manifest.finished_at = utc_timestamp();
    manifest.write(fs::path(args.out_dir) / "encode.manifest.json");
}

void cmd_train(const TrainArgs& args, const CommonArgs& common) {
    RunManifest manifest = start_manifest("train", common);
    manifest.add_input(args.data);
    if (!args.config_path.empty()) manifest.add_input(args.config_path);

    const TrainConfig config = resolve_train_config(args);
    manifest.seed = config.seed;
    manifest.config_hash = config_hash(config);

    const Dataset dataset = load_dataset(args.data);
    SplitOptions split_options;
    split_options.train_fraction = args.train_fraction;
    split_options.seed = config.seed;
    split_options.group_by_patient = args.group_by_patient;
    const auto [train_set, test_set] = split_dataset(dataset, split_options);
    std::cout << "split " << dataset.size() << " samples into " << train_set.size()
              << " train / " << test_set.size() << " test (seed " << config.seed
              << ")\n";

    fs::create_directories(args.out_dir);
    const fs::path loss_path = fs::path(args.out_dir) / "loss_log.csv";
    std::ofstream loss_log(loss_path);
    if (!loss_log) throw ParseError("cannot write '" + loss_path.string() + "'");
    loss_log << "epoch,mean_loss\n";

    const TrainResult result =
        train(train_set, config, [&](const M3sModel&, const EpochStats& stats) {
            loss_log << stats.epoch << ',' << format_double(stats.mean_loss) << "\n";
            if (stats.epoch % 25 == 0 || stats.epoch == config.epochs) {
                std::cout << "epoch " << stats.epoch << " mean loss "
                          << stats.mean_loss << "\n";
            }
            return true;
        });
    loss_log.close();

    const fs::path ckpt_path = fs::path(args.out_dir) / "checkpoint.json";
    save_checkpoint(result.model, ckpt_path);
    manifest.add_output(ckpt_path);
    manifest.add_output(loss_path);
    std::cout << "saved checkpoint to " << ckpt_path.string() << "\n";

    manifest.finished_at = utc_timestamp();
    manifest.write(fs::path(args.out_dir) / "train.manifest.json");
}

void cmd_evaluate(const EvaluateArgs& args, const CommonArgs& common) {
    RunManifest manifest = start_manifest("evaluate", common);
    manifest.add_input(args.checkpoint);
    manifest.add_input(args.data);

    const M3sModel model = load_checkpoint(args.checkpoint);
    manifest.config_hash = config_hash(model.config);
    const Dataset dataset = load_dataset(args.data);

    Dataset target = dataset;
    if (args.split != "all") {
        SplitOptions split_options;
        split_options.train_fraction = args.train_fraction;
        split_options.seed = args.seed >= 0 ? static_cast<std::uint64_t>(args.seed)
                                            : model.config.seed;
        split_options.group_by_patient = args.group_by_patient;
        auto [train_set, test_set] = split_dataset(dataset, split_options);
        if (args.split == "train") target = std::move(train_set);
        else if (args.split == "test") target = std::move(test_set);
        else throw InvalidConfig("unknown split '" + args.split + "'");
    }
    manifest.seed = model.config.seed;

    ConfusionMatrix cm;
    const MetricReport report = evaluate_on(model, target, cm);
    std::cout << to_table(report);

    fs::create_directories(args.out_dir);
    const fs::path metrics_path = fs::path(args.out_dir) / "metrics.json";
    const fs::path cm_path = fs::path(args.out_dir) / "confusion.csv";
    write_text(metrics_path, to_json_string(report));
    write_text(cm_path, to_csv(cm));
    manifest.add_output(metrics_path);
    manifest.add_output(cm_path);

    manifest.finished_at = utc_timestamp();
    manifest.write(fs::path(args.out_dir) / "evaluate.manifest.json");
}

namespace {

std::vector<std::vector<std::size_t>> parse_scale_grid(const std::string& grid) {
    std::vector<std::vector<std::size_t>> sets;
    std::stringstream outer(grid);
    std::string cell;
    while (std::getline(outer, cell, ';')) {
        if (cell.empty()) continue;
        std::vector<std::size_t> scales;
        std::stringstream inner(cell);
        std::string token;
        while (std::getline(inner, token, ',')) {
            scales.push_back(static_cast<std::size_t>(std::stoul(token)));
        }
        sets.push_back(std::move(scales));
    }
    if (sets.empty()) throw InvalidConfig("empty scale grid");
    return sets;
}

std::string scales_string(const std::vector<std::size_t>& scales) {
    std::string out;
    for (std::size_t k = 0; k < scales.size(); ++k) {
        if (k) out += "+";
        out += std::to_string(scales[k]);
    }
    return out;
}

WeightMode weight_mode_from_name(const std::string& name) {
    if (name == "adaptive") return WeightMode::Adaptive;
    if (name == "fixed") return WeightMode::Fixed;
    if (name == "raman") return WeightMode::RamanOnly;
    throw InvalidConfig("unknown weight mode '" + name + "'");
}

FusionPolicy policy_from_name(const std::string& name) {
    if (name == "masked") return FusionPolicy::Masked;
    if (name == "global") return FusionPolicy::Global;
    throw InvalidConfig("unknown fusion policy '" + name + "'");
}

}  // namespace

void cmd_ablate(const AblateArgs& args, const CommonArgs& common) {
    RunManifest manifest = start_manifest("ablate", common);
    manifest.add_input(args.data);
    if (!args.seeds.empty()) manifest.seed = args.seeds.front();

    const Dataset dataset = load_dataset(args.data);
    const auto scale_sets = parse_scale_grid(args.scale_grid);

    fs::create_directories(args.out_dir);
    const fs::path out_path = fs::path(args.out_dir) / "ablation.csv";
    std::ofstream out(out_path);
    if (!out) throw ParseError("cannot write '" + out_path.string() + "'");
    out << "scales,weight_mode,policy,seeds,accuracy,precision,recall,specificity,f1\n";

    for (const auto& scales : scale_sets) {
        for (const auto& weight_name : args.weights) {
            for (const auto& policy_name : args.policies) {
                double acc = 0.0, prec = 0.0, rec = 0.0, spec = 0.0, f1 = 0.0;
                for (const std::uint64_t seed : args.seeds) {
                    TrainConfig config;
                    config.extractor.scales = scales;
                    config.weight_mode = weight_mode_from_name(weight_name);
                    config.policy = policy_from_name(policy_name);
                    config.epochs = args.epochs;
                    config.learning_rate = args.lr;
                    config.seed = seed;

                    const auto [train_set, test_set] =
                        split_dataset(dataset, args.train_fraction, seed);
                    const TrainResult result = train(train_set, config);
                    ConfusionMatrix cm;
                    const MetricReport report = evaluate_on(result.model, test_set, cm);
                    acc += report.accuracy;
                    prec += report.precision;
                    rec += report.recall;
                    spec += report.specificity;
                    f1 += report.f1;
                }
                const double n = static_cast<double>(args.seeds.size());
                out << scales_string(scales) << ',' << weight_name << ',' << policy_name
                    << ',' << args.seeds.size() << ',' << format_double(acc / n) << ','
                    << format_double(prec / n) << ',' << format_double(rec / n) << ','
                    << format_double(spec / n) << ',' << format_double(f1 / n) << "\n";
                std::cout << "ablate " << scales_string(scales) << " " << weight_name
                          << " " << policy_name << ": acc " << acc / n << "\n";
            }
        }
    }
    out.close();
    manifest.add_output(out_path);
    manifest.finished_at = utc_timestamp();
    manifest.write(fs::path(args.out_dir) / "ablate.manifest.json");
}

void cmd_report(const ReportArgs& args, const CommonArgs& common) {
    if (args.metric_files.empty()) throw InvalidConfig("no metric files given");

    std::string text;
    double acc = 0.0, prec = 0.0, rec = 0.0, spec = 0.0, f1 = 0.0;
    char line[160];
    std::snprintf(line, sizeof(line), "%-32s %8s %8s %8s %8s %8s\n", "report",
                  "ACC", "P", "R", "S", "F1");
    text += line;
    for (const auto& file : args.metric_files) {
        const MetricReport report = metric_report_from_json_file(file);
        std::snprintf(line, sizeof(line), "%-32s %8.4f %8.4f %8.4f %8.4f %8.4f\n",
                      fs::path(file).filename().string().c_str(), report.accuracy,
                      report.precision, report.recall, report.specificity, report.f1);
        text += line;
        acc += report.accuracy;
        prec += report.precision;
        rec += report.recall;
        spec += report.specificity;
        f1 += report.f1;
    }
    if (args.metric_files.size() > 1) {
        const double n = static_cast<double>(args.metric_files.size());
        std::snprintf(line, sizeof(line), "%-32s %8.4f %8.4f %8.4f %8.4f %8.4f\n",
                      "average", acc / n, prec / n, rec / n, spec / n, f1 / n);
        text += line;
    }
    std::cout << text;

    if (!args.out.empty()) {
        RunManifest manifest = start_manifest("report", common);
        for (const auto& file : args.metric_files) manifest.add_input(file);
        write_text(args.out, text);
        manifest.add_output(args.out);
        manifest.finished_at = utc_timestamp();
        manifest.write(args.out + ".manifest.json");
    }
}

}  // namespace m3s::cli
