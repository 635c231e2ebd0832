#include "m3s/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "m3s/rng.hpp"

namespace m3s {

std::string patient_key(const std::string& id) {
    const auto pos = id.rfind('-');
    return pos == std::string::npos ? id : id.substr(0, pos);
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& dataset,
                                          const SplitOptions& options) {
    const double f = options.train_fraction;
    if (!(f > 0.0 && f < 1.0)) {
        throw InvalidConfig("train_fraction must lie in (0, 1), got " +
                            std::to_string(f));
    }
    const std::size_t n = dataset.size();
    if (n == 0) throw EmptySplit("dataset is empty");

    const std::size_t train_target =
        static_cast<std::size_t>(std::ceil(f * static_cast<double>(n)));

    Rng rng(options.seed);
    std::vector<std::size_t> order;

    if (options.group_by_patient) {
        // Shuffle patients, then emit their records in dataset order.
        std::map<std::string, std::vector<std::size_t>> groups;
        for (std::size_t k = 0; k < n; ++k) {
            groups[patient_key(dataset.samples[k].id)].push_back(k);
        }
        std::vector<const std::vector<std::size_t>*> patients;
        patients.reserve(groups.size());
        for (const auto& [key, members] : groups) patients.push_back(&members);
        rng.shuffle(patients);
        for (const auto* members : patients) {
            order.insert(order.end(), members->begin(), members->end());
        }
    } else {
        order.resize(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng.shuffle(order);
    }

    std::size_t cut = std::min(train_target, n);
    if (options.group_by_patient) {
        // Advance the cut to the next patient boundary so groups stay whole.
        while (cut < n &&
               patient_key(dataset.samples[order[cut]].id) ==
                   patient_key(dataset.samples[order[cut - 1]].id)) {
            ++cut;
        }
    }
    if (cut == 0 || cut == n) {
        throw EmptySplit("split of " + std::to_string(n) + " samples at fraction " +
                         std::to_string(f) + " leaves one side empty");
    }

    Dataset train, test;
    train.source = dataset.source + " [train]";
    test.source = dataset.source + " [test]";
    train.seed = test.seed = options.seed;
    train.samples.reserve(cut);
    test.samples.reserve(n - cut);
    for (std::size_t k = 0; k < cut; ++k) train.samples.push_back(dataset.samples[order[k]]);
    for (std::size_t k = cut; k < n; ++k) test.samples.push_back(dataset.samples[order[k]]);
    return {std::move(train), std::move(test)};
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& dataset,
                                          double train_fraction,
                                          std::uint64_t seed) {
    SplitOptions options;
    options.train_fraction = train_fraction;
    options.seed = seed;
    return split_dataset(dataset, options);
}

}  // namespace m3s
