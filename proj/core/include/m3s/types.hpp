#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "m3s/errors.hpp"

namespace m3s {

/// The four cardiovascular disease subtypes. Ordinal indices are part of the
/// contract: metrics, fusion matrices, and file formats all use this order.
enum class SubtypeLabel : int {
    AMI = 0,  // acute myocardial infarction
    CAD = 1,  // coronary artery disease
    AF = 2,   // atrial fibrillation
    CON = 3,  // healthy control
};

inline constexpr int kNumSubtypes = 4;
inline constexpr std::array<SubtypeLabel, kNumSubtypes> kAllSubtypes = {
    SubtypeLabel::AMI, SubtypeLabel::CAD, SubtypeLabel::AF, SubtypeLabel::CON};

const char* to_string(SubtypeLabel label);

/// Parses "AMI" / "CAD" / "AF" / "CON"; returns nullopt for anything else.
std::optional<SubtypeLabel> parse_subtype(const std::string& text);

/// Five binary medical-history indicators, fixed order: PCI (percutaneous
/// coronary intervention), EH (essential hypertension), DM (diabetes
/// mellitus), ACI (acute cerebral infarct), SM (smoking).
struct HistoryVector {
    std::array<bool, 5> flags{};

    bool operator[](std::size_t i) const { return flags[i]; }
    bool& operator[](std::size_t i) { return flags[i]; }
    bool operator==(const HistoryVector&) const = default;

    bool any() const {
        for (bool f : flags)
            if (f) return true;
        return false;
    }
};

inline constexpr int kNumHistories = 5;
inline constexpr std::array<const char*, kNumHistories> kHistoryNames = {
    "pci", "eh", "dm", "aci", "sm"};

/// One Raman spectrum: a fixed-length real sequence with an optional class
/// label and the per-patient history flags.
struct RamanSpectrum {
    std::string id;
    std::vector<double> values;  // length kSequenceLength, all finite
    std::optional<SubtypeLabel> label;
    HistoryVector history;
};

inline constexpr std::size_t kSequenceLength = 1024;

/// Throws NonFinite / SchemaError if the spectrum violates its invariants.
void validate_spectrum(const RamanSpectrum& spec,
                       std::size_t expected_length = kSequenceLength);

struct Dataset {
    std::vector<RamanSpectrum> samples;
    std::string source;      // free-form provenance description
    std::uint64_t seed = 0;  // seed used to generate or split this set

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
};

}  // namespace m3s
