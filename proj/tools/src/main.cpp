#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "m3s/errors.hpp"

#include "commands.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitDiverged = 3;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"M3S: multi-scale GAF encoding of Raman spectra with "
                 "history-aware fusion for 4-class prediction"};
    app.require_subcommand(1);

    m3s::cli::CommonArgs common;
    for (int k = 0; k < argc; ++k) common.argv.emplace_back(argv[k]);

    m3s::cli::SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset");
    synth_cmd->add_option("--config", synth.config_path,
                          "SynthConfig JSON (overrides --preset)");
    synth_cmd->add_option("--preset", synth.preset, "Built-in config: default | twins");
    synth_cmd->add_option("--seed", synth.seed, "Generator seed");
    synth_cmd->add_option("--out", synth.out, "Output dataset (.csv or .json)");

    m3s::cli::EncodeArgs encode;
    auto* encode_cmd = app.add_subcommand("encode", "Write GAF images for a dataset");
    encode_cmd->add_option("--data", encode.data, "Dataset file")->required();
    encode_cmd->add_option("--scales", encode.scales, "Image scales")->delimiter(',');
    encode_cmd->add_option("--format", encode.format, "csv (canonical) or pgm");
    encode_cmd->add_option("--out", encode.out_dir, "Output directory");

    m3s::cli::TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "Split, train and checkpoint");
    train_cmd->add_option("--data", train.data, "Dataset file")->required();
    train_cmd->add_option("--config", train.config_path, "TrainConfig JSON");
    train_cmd->add_option("--out", train.out_dir, "Output directory");
    train_cmd->add_option("--train-fraction", train.train_fraction,
                          "Training share of the split");
    train_cmd->add_flag("--group-by-patient", train.group_by_patient,
                        "Keep records of one patient on one side of the split");
    train_cmd->add_option("--scales", train.scales, "Image scales")->delimiter(',');
    train_cmd->add_option("--weights", train.weights, "adaptive | fixed | raman");
    train_cmd->add_option("--policy", train.policy, "masked | global");
    train_cmd->add_option("--ratio", train.ratio, "Spectral mass of the fixed matrix");
    train_cmd->add_option("--epochs", train.epochs, "Training epochs");
    train_cmd->add_option("--lr", train.lr, "SGD learning rate");
    train_cmd->add_option("--batch-size", train.batch_size, "Samples per update");
    train_cmd->add_option("--seed", train.seed, "Split/init/shuffle seed");

    m3s::cli::EvaluateArgs evaluate;
    auto* eval_cmd = app.add_subcommand("evaluate", "Metric report for a checkpoint");
    eval_cmd->add_option("--checkpoint", evaluate.checkpoint, "Checkpoint JSON")
        ->required();
    eval_cmd->add_option("--data", evaluate.data, "Dataset file")->required();
    eval_cmd->add_option("--split", evaluate.split,
                         "all | train | test (re-derives the training split)");
    eval_cmd->add_option("--train-fraction", evaluate.train_fraction,
                         "Training share used when re-deriving the split");
    eval_cmd->add_option("--seed", evaluate.seed,
                         "Split seed (default: the checkpoint's seed)");
    eval_cmd->add_flag("--group-by-patient", evaluate.group_by_patient,
                       "Patient-grouped split");
    eval_cmd->add_option("--out", evaluate.out_dir, "Output directory");

    m3s::cli::AblateArgs ablate;
    auto* ablate_cmd =
        app.add_subcommand("ablate", "Grid of scale sets x weight modes x policies");
    ablate_cmd->add_option("--data", ablate.data, "Dataset file")->required();
    ablate_cmd->add_option("--scales-grid", ablate.scale_grid,
                           "Semicolon-separated scale sets, e.g. \"32;64;32,64\"");
    ablate_cmd->add_option("--weights", ablate.weights, "Weight modes")->delimiter(',');
    ablate_cmd->add_option("--policies", ablate.policies, "Fusion policies")
        ->delimiter(',');
    ablate_cmd->add_option("--seeds", ablate.seeds, "Seeds to average over")
        ->delimiter(',');
    ablate_cmd->add_option("--epochs", ablate.epochs, "Epochs per grid cell");
    ablate_cmd->add_option("--lr", ablate.lr, "SGD learning rate");
    ablate_cmd->add_option("--train-fraction", ablate.train_fraction,
                           "Training share of the split");
    ablate_cmd->add_option("--out", ablate.out_dir, "Output directory");

    m3s::cli::ReportArgs report;
    auto* report_cmd =
        app.add_subcommand("report", "Tabulate (and average) metric JSON files");
    report_cmd->add_option("files", report.metric_files, "metrics.json files");
    report_cmd->add_option("--out", report.out, "Write the table to a file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInputError;
    }

    try {
        if (*synth_cmd) m3s::cli::cmd_synth(synth, common);
        if (*encode_cmd) m3s::cli::cmd_encode(encode, common);
        if (*train_cmd) m3s::cli::cmd_train(train, common);
        if (*eval_cmd) m3s::cli::cmd_evaluate(evaluate, common);
        if (*ablate_cmd) m3s::cli::cmd_ablate(ablate, common);
        if (*report_cmd) m3s::cli::cmd_report(report, common);
    } catch (const m3s::DivergedLoss& e) {
        std::cerr << e.what() << "\n";
        return kExitDiverged;
    } catch (const m3s::Error& e) {
        std::cerr << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitOk;
}
