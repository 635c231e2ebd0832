#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "m3s/types.hpp"

namespace m3s {

/// A rescaled sequence mapped to polar coordinates: the value becomes the
/// angular cosine phi = arccos(x) in [0, pi], the 1-based group timestamp
/// becomes the radius t/B with span constant B = group count, so the radii
/// fill (0, 1]. The radius never enters the GASF pixels; it is kept for
/// inspection and plotting.
struct PolarSequence {
    std::vector<double> phi;
    std::vector<double> radius;
    double span_constant = 0.0;

    std::size_t size() const { return phi.size(); }
};

/// A Gramian Angular Summation Field image: pixel (a,b) = cos(phi_a + phi_b).
/// Symmetric, every pixel in [-1, 1], diagonal equal to 2 x_k^2 - 1.
struct GafImage {
    std::size_t scale = 0;
    std::vector<double> pixels;  // row-major, scale x scale

    double at(std::size_t row, std::size_t col) const {
        return pixels[row * scale + col];
    }
};

/// Values within 1e-12 of the [-1,1] boundary are clamped (floating-point
/// residue of rescale/paa); anything further out throws DomainError.
PolarSequence to_polar(std::span<const double> norm_seq);

GafImage gasf(const PolarSequence& polar);

/// Full encoding chain at the requested scale:
/// rescale -> paa(scale) -> to_polar -> gasf.
GafImage encode(const RamanSpectrum& spec, std::size_t scale);
GafImage encode_sequence(std::span<const double> values, std::size_t scale);

}  // namespace m3s
