#include "m3s/metrics.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace m3s {

using nlohmann::json;

std::uint64_t ConfusionMatrix::total() const {
    std::uint64_t sum = 0;
    for (const auto& row : counts) {
        for (std::uint64_t v : row) sum += v;
    }
    return sum;
}

ConfusionMatrix confusion(std::span<const SubtypeLabel> preds,
                          std::span<const SubtypeLabel> truths) {
    if (preds.size() != truths.size()) {
        throw LengthMismatch(std::to_string(preds.size()) + " predictions vs " +
                             std::to_string(truths.size()) + " truths");
    }
    if (preds.empty()) throw EmptyMatrix("no samples to tally");
    ConfusionMatrix cm;
    for (std::size_t k = 0; k < preds.size(); ++k) {
        ++cm.counts[static_cast<int>(truths[k])][static_cast<int>(preds[k])];
    }
    return cm;
}

namespace {

// 0/0 -> 0, flagged by the caller.
double ratio(double num, double den, bool& degenerate) {
    if (den == 0.0) {
        degenerate = true;
        return 0.0;
    }
    return num / den;
}

}  // namespace

MetricReport compute_metrics(const ConfusionMatrix& cm) {
    const double total = static_cast<double>(cm.total());
    if (total == 0.0) throw EmptyMatrix("confusion matrix is empty");

    MetricReport report;
    double trace = 0.0;
    double weight_sum = 0.0;
    for (int c = 0; c < kNumSubtypes; ++c) {
        double row_sum = 0.0;
        double col_sum = 0.0;
        for (int k = 0; k < kNumSubtypes; ++k) {
            row_sum += static_cast<double>(cm.counts[c][k]);
            col_sum += static_cast<double>(cm.counts[k][c]);
        }
        const double tp = static_cast<double>(cm.counts[c][c]);
        const double fp = col_sum - tp;
        const double fn = row_sum - tp;
        const double tn = total - tp - fp - fn;
        trace += tp;

        PerClassMetrics& m = report.per_class[c];
        m.support = static_cast<std::uint64_t>(row_sum);
        m.precision = ratio(tp, tp + fp, m.degenerate);
        m.recall = ratio(tp, tp + fn, m.degenerate);
        m.specificity = ratio(tn, tn + fp, m.degenerate);
        const double pr = m.precision + m.recall;
        m.f1 = pr == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / pr;

        report.precision += m.precision / kNumSubtypes;
        report.recall += m.recall / kNumSubtypes;
        report.specificity += m.specificity / kNumSubtypes;
        report.f1 += m.f1 / kNumSubtypes;
        report.weighted_precision += m.precision * row_sum;
        report.weighted_recall += m.recall * row_sum;
        report.weighted_specificity += m.specificity * row_sum;
        report.weighted_f1 += m.f1 * row_sum;
        weight_sum += row_sum;
    }
    report.accuracy = trace / total;
    report.weighted_precision /= weight_sum;
    report.weighted_recall /= weight_sum;
    report.weighted_specificity /= weight_sum;
    report.weighted_f1 /= weight_sum;
    return report;
}

std::uint64_t count_params(const M3sModel& model) {
    std::uint64_t params = model.extractor.param_count();
    if (model.config.weight_mode != WeightMode::RamanOnly) {
        params += model.weight_matrix.values.numel();
    }
    return params;
}

std::uint64_t count_flops(const M3sModel& model) {
    return 2ULL * model.extractor.forward_macs();
}

std::string to_json_string(const MetricReport& report) {
    json doc;
    doc["accuracy"] = report.accuracy;
    doc["precision"] = report.precision;
    doc["recall"] = report.recall;
    doc["specificity"] = report.specificity;
    doc["f1"] = report.f1;
    doc["weighted"] = {{"precision", report.weighted_precision},
                       {"recall", report.weighted_recall},
                       {"specificity", report.weighted_specificity},
                       {"f1", report.weighted_f1}};
    json per_class = json::object();
    for (int c = 0; c < kNumSubtypes; ++c) {
        const auto& m = report.per_class[c];
        per_class[to_string(kAllSubtypes[c])] = {
            {"precision", m.precision},   {"recall", m.recall},
            {"specificity", m.specificity}, {"f1", m.f1},
            {"support", m.support},       {"degenerate", m.degenerate}};
    }
    doc["per_class"] = std::move(per_class);
    doc["flops"] = report.flops;
    doc["params"] = report.params;
    return doc.dump(2) + "\n";
}

MetricReport metric_report_from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    MetricReport report;
    report.accuracy = doc.at("accuracy").get<double>();
    report.precision = doc.at("precision").get<double>();
    report.recall = doc.at("recall").get<double>();
    report.specificity = doc.at("specificity").get<double>();
    report.f1 = doc.at("f1").get<double>();
    if (doc.contains("weighted")) {
        report.weighted_precision = doc["weighted"].value("precision", 0.0);
        report.weighted_recall = doc["weighted"].value("recall", 0.0);
        report.weighted_specificity = doc["weighted"].value("specificity", 0.0);
        report.weighted_f1 = doc["weighted"].value("f1", 0.0);
    }
    if (doc.contains("per_class")) {
        for (int c = 0; c < kNumSubtypes; ++c) {
            const char* name = to_string(kAllSubtypes[c]);
            if (!doc["per_class"].contains(name)) continue;
            const json& entry = doc["per_class"][name];
            auto& m = report.per_class[c];
            m.precision = entry.value("precision", 0.0);
            m.recall = entry.value("recall", 0.0);
            m.specificity = entry.value("specificity", 0.0);
            m.f1 = entry.value("f1", 0.0);
            m.support = entry.value("support", std::uint64_t{0});
            m.degenerate = entry.value("degenerate", false);
        }
    }
    report.flops = doc.value("flops", std::uint64_t{0});
    report.params = doc.value("params", std::uint64_t{0});
    return report;
}

std::string to_table(const MetricReport& report) {
    char line[160];
    std::string out;
    out += "class     precision    recall  specificity        f1   support\n";
    for (int c = 0; c < kNumSubtypes; ++c) {
        const auto& m = report.per_class[c];
        std::snprintf(line, sizeof(line), "%-8s %10.4f %9.4f %12.4f %9.4f %9llu%s\n",
                      to_string(kAllSubtypes[c]), m.precision, m.recall, m.specificity,
                      m.f1, static_cast<unsigned long long>(m.support),
                      m.degenerate ? "  (0/0 -> 0)" : "");
        out += line;
    }
    std::snprintf(line, sizeof(line), "%-8s %10.4f %9.4f %12.4f %9.4f\n", "macro",
                  report.precision, report.recall, report.specificity, report.f1);
    out += line;
    std::snprintf(line, sizeof(line), "%-8s %10.4f %9.4f %12.4f %9.4f\n", "weighted",
                  report.weighted_precision, report.weighted_recall,
                  report.weighted_specificity, report.weighted_f1);
    out += line;
    std::snprintf(line, sizeof(line), "accuracy %10.4f\n", report.accuracy);
    out += line;
    if (report.params > 0) {
        std::snprintf(line, sizeof(line), "params   %10llu\nflops    %10llu\n",
                      static_cast<unsigned long long>(report.params),
                      static_cast<unsigned long long>(report.flops));
        out += line;
    }
    return out;
}

std::string to_csv(const ConfusionMatrix& cm) {
    std::string out = "truth\\pred";
    for (int c = 0; c < kNumSubtypes; ++c) {
        out += ",";
        out += to_string(kAllSubtypes[c]);
    }
    out += "\n";
    for (int r = 0; r < kNumSubtypes; ++r) {
        out += to_string(kAllSubtypes[r]);
        for (int c = 0; c < kNumSubtypes; ++c) {
            out += "," + std::to_string(cm.counts[r][c]);
        }
        out += "\n";
    }
    return out;
}

}  // namespace m3s
