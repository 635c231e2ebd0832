#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace m3s::cli {

struct CommonArgs {
    std::vector<std::string> argv;  // full command line, recorded in manifests
};

struct SynthArgs {
    std::string config_path;       // empty: use preset
    std::string preset = "default";  // default | twins
    std::uint64_t seed = 1;
    std::string out = "dataset.csv";
};
void cmd_synth(const SynthArgs& args, const CommonArgs& common);

struct EncodeArgs {
    std::string data;
    std::vector<std::size_t> scales = {32, 64};
    std::string format = "csv";  // csv | pgm
    std::string out_dir = "encoded";
};
void cmd_encode(const EncodeArgs& args, const CommonArgs& common);

struct TrainArgs {
    std::string data;
    std::string config_path;  // optional TrainConfig JSON
    std::string out_dir = "run";
    double train_fraction = 0.75;
    bool group_by_patient = false;
    // Overrides applied on top of the config file / defaults:
    std::vector<std::size_t> scales;
    std::string weights;  // adaptive | fixed | raman
    std::string policy;   // masked | global
    double ratio = -1.0;
    std::int64_t epochs = -1;
    double lr = -1.0;
    std::int64_t batch_size = -1;
    std::int64_t seed = -1;
};
void cmd_train(const TrainArgs& args, const CommonArgs& common);

struct EvaluateArgs {
    std::string checkpoint;
    std::string data;
    std::string split = "all";  // all | train | test
    double train_fraction = 0.75;
    std::int64_t seed = -1;  // -1: the checkpoint's training seed
    bool group_by_patient = false;
    std::string out_dir = ".";
};
void cmd_evaluate(const EvaluateArgs& args, const CommonArgs& common);

struct AblateArgs {
    std::string data;
    std::string scale_grid = "32;64;128;32,64;32,128;64,128";
    std::vector<std::string> weights = {"fixed", "adaptive"};
    std::vector<std::string> policies = {"masked"};
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    std::uint64_t epochs = 50;
    double lr = 0.001;
    double train_fraction = 0.75;
    std::string out_dir = "ablation";
};
void cmd_ablate(const AblateArgs& args, const CommonArgs& common);

struct ReportArgs {
    std::vector<std::string> metric_files;
    std::string out;  // empty: stdout only
};
void cmd_report(const ReportArgs& args, const CommonArgs& common);

}  // namespace m3s::cli
