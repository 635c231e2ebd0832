#include "m3s/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "m3s/errors.hpp"

namespace m3s {

std::vector<double> rescale(std::span<const double> seq) {
    if (seq.size() < 2) {
        throw ConstantSequence("rescale needs at least 2 points, got " +
                               std::to_string(seq.size()));
    }
    for (double v : seq) {
        if (!std::isfinite(v)) throw NonFinite("rescale input contains NaN/Inf");
    }
    const auto [min_it, max_it] = std::minmax_element(seq.begin(), seq.end());
    const double lo = *min_it;
    const double hi = *max_it;
    if (hi == lo) {
        throw ConstantSequence("all values equal (" + std::to_string(lo) +
                               "), range is zero");
    }
    const double range = hi - lo;
    std::vector<double> out(seq.size());
    for (std::size_t k = 0; k < seq.size(); ++k) {
        out[k] = ((seq[k] - hi) + (seq[k] - lo)) / range;
    }
    return out;
}

std::vector<double> paa(std::span<const double> seq, std::size_t groups) {
    const std::size_t length = seq.size();
    if (groups < 1 || groups > length) {
        throw InvalidGroups("groups=" + std::to_string(groups) +
                            " outside [1, " + std::to_string(length) + "]");
    }
    std::vector<double> out(groups);
    for (std::size_t b = 0; b < groups; ++b) {
        const std::size_t begin = b * length / groups;
        const std::size_t end = (b + 1) * length / groups;
        double sum = 0.0;
        for (std::size_t k = begin; k < end; ++k) sum += seq[k];
        out[b] = sum / static_cast<double>(end - begin);
    }
    return out;
}

}  // namespace m3s
