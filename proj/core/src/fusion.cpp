#include "m3s/fusion.hpp"

#include <string>

#include "m3s/loss.hpp"

namespace m3s {

const char* to_string(FusionPolicy policy) {
    return policy == FusionPolicy::Global ? "global" : "masked";
}

ProbabilityMatrix build_probability_matrix(const Dataset& train) {
    if (train.empty()) {
        throw InvalidConfig("cannot build a probability matrix from an empty dataset");
    }
    std::array<std::array<std::size_t, kNumSubtypes>, kNumHistories> counts{};
    for (const auto& sample : train.samples) {
        if (!sample.label) {
            throw UnlabeledSample("sample '" + sample.id + "' has no label");
        }
        const int c = static_cast<int>(*sample.label);
        for (int h = 0; h < kNumHistories; ++h) {
            if (sample.history[h]) ++counts[h][c];
        }
    }

    ProbabilityMatrix matrix;
    for (int h = 0; h < kNumHistories; ++h) {
        std::size_t total = 0;
        for (int c = 0; c < kNumSubtypes; ++c) total += counts[h][c];
        matrix.support_counts[h] = total;
        if (total == 0) {
            matrix.zero_support[h] = true;
            matrix.rows[h].fill(1.0 / kNumSubtypes);
        } else {
            for (int c = 0; c < kNumSubtypes; ++c) {
                matrix.rows[h][c] =
                    static_cast<double>(counts[h][c]) / static_cast<double>(total);
            }
        }
    }
    return matrix;
}

WeightMatrix WeightMatrix::ones() {
    WeightMatrix w;
    std::fill(w.values.data.begin(), w.values.data.end(), 1.0);
    return w;
}

WeightMatrix WeightMatrix::fixed_ratio(double spectral_mass) {
    if (!(spectral_mass > 0.0 && spectral_mass < 1.0)) {
        throw InvalidConfig("fixed ratio must lie in (0, 1), got " +
                            std::to_string(spectral_mass));
    }
    WeightMatrix w;
    const double history_share = (1.0 - spectral_mass) / kNumHistories;
    for (int c = 0; c < kNumSubtypes; ++c) {
        w.values.data[c] = spectral_mass;
        for (int h = 0; h < kNumHistories; ++h) {
            w.values.data[(h + 1) * kNumSubtypes + c] = history_share;
        }
    }
    return w;
}

FusionOutput fuse(const std::array<double, kNumSubtypes>& e_raman,
                  const ProbabilityMatrix& prob, const HistoryVector& history,
                  const WeightMatrix& weights, FusionPolicy policy) {
    weights.values.require_shape({kNumHistories + 1, kNumSubtypes}, "weight matrix");

    FusionOutput out;
    for (int c = 0; c < kNumSubtypes; ++c) {
        out.prediction_matrix[c] = e_raman[c] * weights.at(0, c);
    }
    for (int h = 0; h < kNumHistories; ++h) {
        const bool active = policy == FusionPolicy::Global || history[h];
        for (int c = 0; c < kNumSubtypes; ++c) {
            const double entry = active ? prob.rows[h][c] : 0.0;
            out.prediction_matrix[(h + 1) * kNumSubtypes + c] =
                entry * weights.at(h + 1, c);
        }
    }
    for (int c = 0; c < kNumSubtypes; ++c) {
        double sum = 0.0;
        for (int r = 0; r <= kNumHistories; ++r) {
            sum += out.prediction_matrix[r * kNumSubtypes + c];
        }
        out.class_scores[c] = sum;
    }
    const auto probs = softmax(out.class_scores);
    std::copy(probs.begin(), probs.end(), out.probabilities.begin());
    return out;
}

FusionGradients fuse_backward(const std::array<double, kNumSubtypes>& e_raman,
                              const ProbabilityMatrix& prob,
                              const HistoryVector& history,
                              const WeightMatrix& weights, FusionPolicy policy,
                              const std::array<double, kNumSubtypes>& grad_scores) {
    FusionGradients grads{};
    for (int c = 0; c < kNumSubtypes; ++c) {
        grads.e_raman[c] = grad_scores[c] * weights.at(0, c);
        grads.weight_matrix[c] = grad_scores[c] * e_raman[c];
    }
    for (int h = 0; h < kNumHistories; ++h) {
        const bool active = policy == FusionPolicy::Global || history[h];
        for (int c = 0; c < kNumSubtypes; ++c) {
            const double entry = active ? prob.rows[h][c] : 0.0;
            grads.weight_matrix[(h + 1) * kNumSubtypes + c] = grad_scores[c] * entry;
        }
    }
    return grads;
}

}  // namespace m3s
