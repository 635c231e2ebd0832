#pragma once

#include <array>
#include <cstddef>

#include "m3s/tensor.hpp"
#include "m3s/types.hpp"

namespace m3s {

/// Row-stochastic 5x4 matrix of P(subtype | history flag), estimated by
/// counting on the training split only. Rows whose flag never occurs get a
/// uniform 0.25 fill and are flagged via zero_support.
struct ProbabilityMatrix {
    std::array<std::array<double, kNumSubtypes>, kNumHistories> rows{};
    std::array<std::size_t, kNumHistories> support_counts{};
    std::array<bool, kNumHistories> zero_support{};
};

/// entry[h][c] = #{samples with flag h and label c} / #{samples with flag h}.
/// Throws UnlabeledSample if any sample lacks a label, InvalidConfig on an
/// empty dataset.
ProbabilityMatrix build_probability_matrix(const Dataset& train);

/// 6x4 trainable mixing matrix: row 0 weighs the spectral prediction, rows
/// 1..5 weigh the five history rows of the probability matrix.
struct WeightMatrix {
    Tensor values;  // shape {6, 4}

    WeightMatrix() : values({kNumHistories + 1, kNumSubtypes}) {}

    /// All-ones start, the adaptive-training initial value.
    static WeightMatrix ones();

    /// Fixed expert ratio: row 0 = spectral_mass in every column, each
    /// history row = (1 - spectral_mass) / 5. The default 0.9 gives the
    /// 9:1 spectral:history split.
    static WeightMatrix fixed_ratio(double spectral_mass);

    double at(std::size_t row, std::size_t col) const {
        return values.data[row * kNumSubtypes + col];
    }
};

/// Whether the probability-matrix rows entering the fusion stack are taken
/// wholesale (Global) or zeroed for flags the patient does not carry
/// (Masked, the default).
enum class FusionPolicy { Global, Masked };

const char* to_string(FusionPolicy policy);

struct FusionOutput {
    /// e_F stacked with the weight matrix applied elementwise, 6x4 row-major.
    std::array<double, (kNumHistories + 1) * kNumSubtypes> prediction_matrix{};
    /// Column sums of prediction_matrix.
    std::array<double, kNumSubtypes> class_scores{};
    /// softmax(class_scores).
    std::array<double, kNumSubtypes> probabilities{};
};

/// Stacks [e_R; M_H'] (M_H' per policy), multiplies elementwise with the
/// weight matrix, sums along the history axis and applies softmax.
FusionOutput fuse(const std::array<double, kNumSubtypes>& e_raman,
                  const ProbabilityMatrix& prob, const HistoryVector& history,
                  const WeightMatrix& weights, FusionPolicy policy);

struct FusionGradients {
    std::array<double, kNumSubtypes> e_raman;
    std::array<double, (kNumHistories + 1) * kNumSubtypes> weight_matrix;
};

/// Gradients of the class scores wrt e_R and the weight matrix, given
/// dL/dclass_scores. The probability rows are constants.
FusionGradients fuse_backward(const std::array<double, kNumSubtypes>& e_raman,
                              const ProbabilityMatrix& prob,
                              const HistoryVector& history,
                              const WeightMatrix& weights, FusionPolicy policy,
                              const std::array<double, kNumSubtypes>& grad_scores);

}  // namespace m3s
