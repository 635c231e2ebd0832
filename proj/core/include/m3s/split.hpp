#pragma once

#include <cstdint>
#include <utility>

#include "m3s/types.hpp"

namespace m3s {

struct SplitOptions {
    double train_fraction = 0.75;
    std::uint64_t seed = 1;
    /// When set, records sharing a patient key never straddle the split.
    /// The patient key is the id prefix before the last '-' (the whole id
    /// when there is no '-'), so "p012-3" and "p012-7" stay together.
    bool group_by_patient = false;
};

/// Deterministic shuffled partition into (train, test). Record mode yields
/// exactly ceil(train_fraction * N) training samples; patient mode fills the
/// training side with whole patients until it reaches that count. Throws
/// EmptySplit when either side would be empty and InvalidConfig for a
/// train_fraction outside (0, 1).
std::pair<Dataset, Dataset> split_dataset(const Dataset& dataset,
                                          const SplitOptions& options);

std::pair<Dataset, Dataset> split_dataset(const Dataset& dataset,
                                          double train_fraction,
                                          std::uint64_t seed);

/// Patient key used by grouped splitting; exposed for tests.
std::string patient_key(const std::string& id);

}  // namespace m3s
