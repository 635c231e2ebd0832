#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "m3s/tensor.hpp"

namespace m3s {

struct GradCheckBlock {
    std::string name;
    double max_rel_error = 0.0;
    std::size_t checked = 0;
    std::size_t skipped_nonsmooth = 0;
};

struct GradCheckReport {
    std::vector<GradCheckBlock> blocks;
    double worst() const;
};

/// Central-difference check (f(p+h) - f(p-h)) / 2h against the analytic
/// gradients already stored in each block tensor's grad buffer. `loss_fn`
/// must recompute the scalar loss from current parameter values; parameters
/// are restored after each probe. Relative error uses
/// |a - n| / max(|a|, |n|, 1e-8).
///
/// The network is only piecewise smooth (relu, maxpool argmax), so each
/// coordinate is probed at two step sizes first; when the two estimates
/// disagree the probe interval contains a kink, the coordinate carries no
/// usable derivative information and is skipped (and counted). On smooth
/// coordinates a wrong analytic gradient still fails against the converged
/// estimate.
///
/// `max_per_block` == 0 checks every entry; a positive value checks a
/// deterministic subsample (seeded by `sample_seed`), which keeps full-model
/// checks affordable.
GradCheckReport finite_diff_check(
    const std::function<double()>& loss_fn,
    const std::vector<std::pair<std::string, Tensor*>>& blocks, double epsilon,
    std::size_t max_per_block = 0, std::uint64_t sample_seed = 0);

}  // namespace m3s
