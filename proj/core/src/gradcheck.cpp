#include "m3s/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "m3s/rng.hpp"

namespace m3s {

double GradCheckReport::worst() const {
    double worst = 0.0;
    for (const auto& block : blocks) worst = std::max(worst, block.max_rel_error);
    return worst;
}

GradCheckReport finite_diff_check(
    const std::function<double()>& loss_fn,
    const std::vector<std::pair<std::string, Tensor*>>& blocks, double epsilon,
    std::size_t max_per_block, std::uint64_t sample_seed) {
    if (!(epsilon > 0.0)) throw InvalidConfig("gradcheck epsilon must be > 0");

    GradCheckReport report;
    Rng rng(sample_seed);
    for (const auto& [name, tensor] : blocks) {
        if (tensor->grad.size() != tensor->data.size()) {
            throw ShapeError("block '" + name + "' carries no analytic gradient");
        }
        std::vector<std::size_t> indices(tensor->numel());
        std::iota(indices.begin(), indices.end(), std::size_t{0});
        if (max_per_block > 0 && indices.size() > max_per_block) {
            rng.shuffle(indices);
            indices.resize(max_per_block);
            std::sort(indices.begin(), indices.end());
        }

        GradCheckBlock result;
        result.name = name;
        for (std::size_t idx : indices) {
            const double saved = tensor->data[idx];
            const auto central = [&](double h) {
                tensor->data[idx] = saved + h;
                const double plus = loss_fn();
                tensor->data[idx] = saved - h;
                const double minus = loss_fn();
                tensor->data[idx] = saved;
                return (plus - minus) / (2.0 * h);
            };
            const double coarse = central(epsilon);
            const double fine = central(epsilon / 8.0);
            const double fd_scale =
                std::max({std::fabs(coarse), std::fabs(fine), 1e-8});
            if (std::fabs(coarse - fine) > 1e-3 * fd_scale) {
                // A kink (relu corner / pool-argmax flip) sits inside the
                // probe interval; no derivative to compare against here.
                ++result.skipped_nonsmooth;
                continue;
            }
            ++result.checked;

            const double analytic = tensor->grad[idx];
            const double denom = std::max({std::fabs(fine), std::fabs(analytic), 1e-8});
            result.max_rel_error =
                std::max(result.max_rel_error, std::fabs(fine - analytic) / denom);
        }
        report.blocks.push_back(std::move(result));
    }
    return report;
}

}  // namespace m3s
