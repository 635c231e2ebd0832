#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "m3s/dataset_io.hpp"
#include "m3s/errors.hpp"
#include "m3s/split.hpp"
#include "m3s/synth.hpp"

using namespace m3s;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("m3s_test_" + name);
}

Dataset tiny_dataset(std::size_t n) {
    SynthConfig config = default_synth_config();
    for (auto& cls : config.classes) cls.count = std::max<std::size_t>(1, n / 4);
    return synth_generate(config, 99);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("csv round-trip preserves every field") {
    const Dataset dataset = tiny_dataset(12);
    const fs::path path = temp_file("roundtrip.csv");
    save_dataset(dataset, path);
    const Dataset loaded = load_dataset(path);

    REQUIRE(loaded.size() == dataset.size());
    for (std::size_t k = 0; k < dataset.size(); ++k) {
        CHECK(loaded.samples[k].id == dataset.samples[k].id);
        CHECK(loaded.samples[k].label == dataset.samples[k].label);
        CHECK(loaded.samples[k].history == dataset.samples[k].history);
        REQUIRE(loaded.samples[k].values.size() == kSequenceLength);
        for (std::size_t v = 0; v < kSequenceLength; ++v) {
            CHECK(loaded.samples[k].values[v] == dataset.samples[k].values[v]);
        }
    }
    fs::remove(path);
}

TEST_CASE("json round-trip preserves every field") {
    const Dataset dataset = tiny_dataset(8);
    const fs::path path = temp_file("roundtrip.json");
    save_dataset(dataset, path);
    const Dataset loaded = load_dataset(path);

    REQUIRE(loaded.size() == dataset.size());
    for (std::size_t k = 0; k < dataset.size(); ++k) {
        CHECK(loaded.samples[k].id == dataset.samples[k].id);
        CHECK(loaded.samples[k].label == dataset.samples[k].label);
        for (std::size_t v = 0; v < kSequenceLength; ++v) {
            CHECK(loaded.samples[k].values[v] == dataset.samples[k].values[v]);
        }
    }
    fs::remove(path);
}

TEST_CASE("csv with a short header is a schema error") {
    const fs::path path = temp_file("short.csv");
    std::ofstream out(path);
    out << "id,label,pci,eh,dm,aci,sm";
    for (int k = 0; k < 1023; ++k) out << ",v" << k;  // one column short
    out << "\n";
    out.close();
    CHECK_THROWS_AS(load_dataset(path), SchemaError);
    fs::remove(path);
}

TEST_CASE("csv row with wrong column count names the row") {
    const fs::path path = temp_file("badrow.csv");
    {
        const Dataset dataset = tiny_dataset(4);
        save_dataset(dataset, path);
        std::ofstream out(path, std::ios::app);
        out << "extra,NA,0,0,0,0,0,1.0\n";  // 1023 intensity columns missing
    }
    try {
        load_dataset(path);
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(std::string(e.what()).find("row") != std::string::npos);
    }
    fs::remove(path);
}

TEST_CASE("unknown label string raises ParseError naming the row") {
    const fs::path path = temp_file("badlabel.json");
    {
        const Dataset dataset = tiny_dataset(4);
        save_dataset(dataset, path);
        std::string text = read_file(path);
        const auto pos = text.find("\"AMI\"");
        REQUIRE(pos != std::string::npos);
        text.replace(pos, 5, "\"BAD\"");
        std::ofstream out(path);
        out << text;
    }
    try {
        load_dataset(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("row") != std::string::npos);
        CHECK(std::string(e.what()).find("BAD") != std::string::npos);
    }
    fs::remove(path);
}

TEST_CASE("split produces ceil(f*N) training samples deterministically") {
    const Dataset dataset = tiny_dataset(100);
    REQUIRE(dataset.size() == 100);
    const auto [train1, test1] = split_dataset(dataset, 0.75, 7);
    CHECK(train1.size() == 75);
    CHECK(test1.size() == 25);

    const auto [train2, test2] = split_dataset(dataset, 0.75, 7);
    REQUIRE(train1.size() == train2.size());
    for (std::size_t k = 0; k < train1.size(); ++k) {
        CHECK(train1.samples[k].id == train2.samples[k].id);
    }
}

TEST_CASE("split sides are disjoint and cover the input for any seed") {
    const Dataset dataset = tiny_dataset(40);
    for (std::uint64_t seed : {1ULL, 2ULL, 42ULL, 977ULL}) {
        const auto [train, test] = split_dataset(dataset, 0.6, seed);
        std::set<std::string> ids;
        for (const auto& s : train.samples) ids.insert(s.id);
        for (const auto& s : test.samples) {
            CHECK(ids.count(s.id) == 0);
            ids.insert(s.id);
        }
        CHECK(ids.size() == dataset.size());
    }
}

TEST_CASE("split that empties one side throws EmptySplit") {
    Dataset dataset = tiny_dataset(4);
    dataset.samples.resize(2);
    CHECK_THROWS_AS(split_dataset(dataset, 0.75, 1), EmptySplit);
}

TEST_CASE("split rejects fractions outside (0,1)") {
    const Dataset dataset = tiny_dataset(8);
    CHECK_THROWS_AS(split_dataset(dataset, 0.0, 1), InvalidConfig);
    CHECK_THROWS_AS(split_dataset(dataset, 1.0, 1), InvalidConfig);
}

TEST_CASE("grouped split keeps patients whole") {
    Dataset dataset = tiny_dataset(40);
    // Tag records with shared patient prefixes p0..p9.
    for (std::size_t k = 0; k < dataset.size(); ++k) {
        dataset.samples[k].id = "p" + std::to_string(k / 4) + "-" + std::to_string(k % 4);
    }
    SplitOptions options;
    options.train_fraction = 0.75;
    options.seed = 5;
    options.group_by_patient = true;
    const auto [train, test] = split_dataset(dataset, options);

    std::set<std::string> train_patients, test_patients;
    for (const auto& s : train.samples) train_patients.insert(patient_key(s.id));
    for (const auto& s : test.samples) test_patients.insert(patient_key(s.id));
    for (const auto& p : test_patients) CHECK(train_patients.count(p) == 0);
    CHECK(train.size() + test.size() == dataset.size());
}

TEST_CASE("synth is bitwise reproducible for a fixed config and seed") {
    const SynthConfig config = default_synth_config();
    const Dataset a = synth_generate(config, 31);
    const Dataset b = synth_generate(config, 31);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a.samples[k].history == b.samples[k].history);
        for (std::size_t v = 0; v < kSequenceLength; ++v) {
            CHECK(a.samples[k].values[v] == b.samples[k].values[v]);
        }
    }
}

TEST_CASE("noise-free single-template classes produce identical values") {
    SynthConfig config = default_synth_config();
    config.noise_sigma = 0.0;
    for (auto& cls : config.classes) {
        cls.count = 5;
        cls.history_prob = {0.0, 0.0, 0.0, 0.0, 0.0};
    }
    const Dataset dataset = synth_generate(config, 3);
    for (std::size_t k = 1; k < 5; ++k) {
        for (std::size_t v = 0; v < kSequenceLength; ++v) {
            CHECK(dataset.samples[k].values[v] == dataset.samples[0].values[v]);
        }
    }
}

TEST_CASE("degenerate history conditionals are honored exactly") {
    SynthConfig config = default_synth_config();
    for (int c = 0; c < kNumSubtypes; ++c) {
        config.classes[c].count = 20;
        config.classes[c].history_prob = {0, 0, 0, 0, 0};
    }
    config.classes[0].history_prob[4] = 1.0;  // P(SM | AMI) = 1, others 0
    const Dataset dataset = synth_generate(config, 8);
    for (const auto& sample : dataset.samples) {
        const bool is_ami = sample.label == SubtypeLabel::AMI;
        CHECK(sample.history[4] == is_ami);
        for (int h = 0; h < 4; ++h) CHECK_FALSE(sample.history[h]);
    }
}

TEST_CASE("empirical flag frequencies sit within 3-sigma binomial bounds") {
    SynthConfig config = default_synth_config();
    for (auto& cls : config.classes) cls.count = 100;
    const Dataset dataset = synth_generate(config, 18);

    for (int c = 0; c < kNumSubtypes; ++c) {
        std::array<std::size_t, kNumHistories> hits{};
        std::size_t n = 0;
        for (const auto& sample : dataset.samples) {
            if (sample.label != kAllSubtypes[c]) continue;
            ++n;
            for (int h = 0; h < kNumHistories; ++h) {
                if (sample.history[h]) ++hits[h];
            }
        }
        REQUIRE(n == 100);
        for (int h = 0; h < kNumHistories; ++h) {
            const double p = config.classes[c].history_prob[h];
            const double observed = static_cast<double>(hits[h]) / static_cast<double>(n);
            const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
            CHECK(std::fabs(observed - p) <= 3.0 * sigma + 1e-12);
        }
    }
}

TEST_CASE("invalid synth configs are rejected") {
    SynthConfig config = default_synth_config();
    config.noise_sigma = -0.1;
    CHECK_THROWS_AS(config.validate(), InvalidConfig);

    config = default_synth_config();
    config.classes[1].count = 0;
    CHECK_THROWS_AS(config.validate(), InvalidConfig);

    config = default_synth_config();
    config.classes[2].history_prob[0] = 1.5;
    CHECK_THROWS_AS(config.validate(), InvalidConfig);
}

TEST_CASE("synth config json round-trips") {
    const SynthConfig config = default_synth_config();
    const fs::path path = temp_file("synth_config.json");
    save_synth_config(config, path);
    const SynthConfig loaded = load_synth_config(path);
    CHECK(loaded.noise_sigma == config.noise_sigma);
    for (int c = 0; c < kNumSubtypes; ++c) {
        CHECK(loaded.classes[c].count == config.classes[c].count);
        CHECK(loaded.classes[c].peaks.size() == config.classes[c].peaks.size());
        CHECK(loaded.classes[c].history_prob == config.classes[c].history_prob);
    }
    fs::remove(path);
}
