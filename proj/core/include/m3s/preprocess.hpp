#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace m3s {

/// Min/max rescaling onto [-1, 1]:
///
///   out[k] = ((x[k] - max) + (x[k] - min)) / (max - min)
///
/// The minimum maps to -1 and the maximum to +1; the map is linear and
/// order-preserving. Throws NonFinite on NaN/Inf input and ConstantSequence
/// when max == min (zero denominator).
std::vector<double> rescale(std::span<const double> seq);

/// Piecewise aggregate approximation: partitions the sequence into `groups`
/// contiguous blocks (block b spans [floor(b*L/i), floor((b+1)*L/i))) and
/// returns the per-block arithmetic means. When `groups` divides the length,
/// all blocks have exactly L/i elements. Throws InvalidGroups when
/// groups < 1 or groups > length.
std::vector<double> paa(std::span<const double> seq, std::size_t groups);

}  // namespace m3s
