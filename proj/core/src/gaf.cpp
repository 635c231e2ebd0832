#include "m3s/gaf.hpp"

#include <cmath>
#include <string>

#include "m3s/errors.hpp"
#include "m3s/preprocess.hpp"

namespace m3s {

namespace {
constexpr double kBoundaryTolerance = 1e-12;
}

PolarSequence to_polar(std::span<const double> norm_seq) {
    const std::size_t n = norm_seq.size();
    PolarSequence polar;
    polar.phi.resize(n);
    polar.radius.resize(n);
    polar.span_constant = static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        double x = norm_seq[k];
        if (x > 1.0 || x < -1.0) {
            if (x > 1.0 + kBoundaryTolerance || x < -1.0 - kBoundaryTolerance) {
                throw DomainError("value " + std::to_string(x) +
                                  " at index " + std::to_string(k) +
                                  " outside [-1, 1]");
            }
            x = x > 1.0 ? 1.0 : -1.0;
        }
        polar.phi[k] = std::acos(x);
        polar.radius[k] = static_cast<double>(k + 1) / polar.span_constant;
    }
    return polar;
}

GafImage gasf(const PolarSequence& polar) {
    const std::size_t n = polar.size();
    GafImage image;
    image.scale = n;
    image.pixels.resize(n * n);
    for (std::size_t a = 0; a < n; ++a) {
        const double phi_a = polar.phi[a];
        // Fill the upper triangle and mirror so symmetry holds bit-for-bit.
        for (std::size_t b = a; b < n; ++b) {
            const double value = std::cos(phi_a + polar.phi[b]);
            image.pixels[a * n + b] = value;
            image.pixels[b * n + a] = value;
        }
    }
    return image;
}

GafImage encode_sequence(std::span<const double> values, std::size_t scale) {
    return gasf(to_polar(paa(rescale(values), scale)));
}

GafImage encode(const RamanSpectrum& spec, std::size_t scale) {
    return encode_sequence(spec.values, scale);
}

}  // namespace m3s
