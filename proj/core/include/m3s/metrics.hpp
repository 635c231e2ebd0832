#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "m3s/model.hpp"
#include "m3s/types.hpp"

namespace m3s {

/// 4x4 count matrix, rows = ground truth, cols = prediction.
struct ConfusionMatrix {
    std::array<std::array<std::uint64_t, kNumSubtypes>, kNumSubtypes> counts{};

    std::uint64_t total() const;
    std::uint64_t at(SubtypeLabel truth, SubtypeLabel pred) const {
        return counts[static_cast<int>(truth)][static_cast<int>(pred)];
    }
};

ConfusionMatrix confusion(std::span<const SubtypeLabel> preds,
                          std::span<const SubtypeLabel> truths);

struct PerClassMetrics {
    double precision = 0.0;
    double recall = 0.0;       // sensitivity
    double specificity = 0.0;
    double f1 = 0.0;
    std::uint64_t support = 0;  // row sum (true count)
    bool degenerate = false;    // some 0/0 ratio was defined as 0
};

/// One-vs-rest metrics per class plus macro (unweighted) and
/// support-weighted averages. The headline precision/recall/specificity/f1
/// are the macro values; the weighted variants sit alongside them. Any 0/0
/// ratio is defined as 0 and flagged on the class.
struct MetricReport {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double specificity = 0.0;
    double f1 = 0.0;
    double weighted_precision = 0.0;
    double weighted_recall = 0.0;
    double weighted_specificity = 0.0;
    double weighted_f1 = 0.0;
    std::array<PerClassMetrics, kNumSubtypes> per_class{};
    std::uint64_t flops = 0;
    std::uint64_t params = 0;
};

MetricReport compute_metrics(const ConfusionMatrix& cm);

/// Total trainable scalars, including the 6x4 weight matrix.
std::uint64_t count_params(const M3sModel& model);

/// Forward-pass FLOPs at the configured scales, counted as 2 x MACs over
/// conv and dense layers only (pooling/activations/softmax excluded).
std::uint64_t count_flops(const M3sModel& model);

std::string to_json_string(const MetricReport& report);
MetricReport metric_report_from_json_file(const std::filesystem::path& path);

/// Fixed-width human-readable table.
std::string to_table(const MetricReport& report);

/// CSV with a header row and one row per truth class.
std::string to_csv(const ConfusionMatrix& cm);

}  // namespace m3s
