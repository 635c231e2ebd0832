#include "m3s/types.hpp"

#include <cmath>

namespace m3s {

const char* to_string(SubtypeLabel label) {
    switch (label) {
        case SubtypeLabel::AMI: return "AMI";
        case SubtypeLabel::CAD: return "CAD";
        case SubtypeLabel::AF: return "AF";
        case SubtypeLabel::CON: return "CON";
    }
    return "?";
}

std::optional<SubtypeLabel> parse_subtype(const std::string& text) {
    if (text == "AMI") return SubtypeLabel::AMI;
    if (text == "CAD") return SubtypeLabel::CAD;
    if (text == "AF") return SubtypeLabel::AF;
    if (text == "CON") return SubtypeLabel::CON;
    return std::nullopt;
}

void validate_spectrum(const RamanSpectrum& spec, std::size_t expected_length) {
    if (spec.values.size() != expected_length) {
        throw SchemaError("spectrum '" + spec.id + "' has " +
                          std::to_string(spec.values.size()) + " values, expected " +
                          std::to_string(expected_length));
    }
    for (double v : spec.values) {
        if (!std::isfinite(v)) {
            throw NonFinite("spectrum '" + spec.id + "' contains a non-finite value");
        }
    }
}

}  // namespace m3s
