#include <doctest.h>

#include <cmath>

#include "m3s/extractor.hpp"
#include "m3s/fusion.hpp"
#include "m3s/loss.hpp"
#include "m3s/rng.hpp"
#include "m3s/synth.hpp"

using namespace m3s;

namespace {

RamanSpectrum labeled_sample(const std::string& id, SubtypeLabel label,
                             std::initializer_list<int> flags) {
    RamanSpectrum spec;
    spec.id = id;
    spec.label = label;
    spec.values.assign(kSequenceLength, 0.0);
    for (int h : flags) spec.history[h] = true;
    return spec;
}

}  // namespace

TEST_CASE("probability matrix rows follow the counting definition") {
    Dataset train;
    // Flag PCI carried by: 2 AMI, 1 CAD, 1 AF, 0 CON.
    train.samples.push_back(labeled_sample("a", SubtypeLabel::AMI, {0}));
    train.samples.push_back(labeled_sample("b", SubtypeLabel::AMI, {0}));
    train.samples.push_back(labeled_sample("c", SubtypeLabel::CAD, {0}));
    train.samples.push_back(labeled_sample("d", SubtypeLabel::AF, {0}));
    train.samples.push_back(labeled_sample("e", SubtypeLabel::CON, {}));

    const ProbabilityMatrix matrix = build_probability_matrix(train);
    CHECK(matrix.support_counts[0] == 4);
    CHECK(matrix.rows[0][0] == doctest::Approx(0.5));
    CHECK(matrix.rows[0][1] == doctest::Approx(0.25));
    CHECK(matrix.rows[0][2] == doctest::Approx(0.25));
    CHECK(matrix.rows[0][3] == doctest::Approx(0.0));
    CHECK_FALSE(matrix.zero_support[0]);
}

TEST_CASE("zero-support rows are uniform and flagged") {
    Dataset train;
    train.samples.push_back(labeled_sample("a", SubtypeLabel::AMI, {0}));
    train.samples.push_back(labeled_sample("b", SubtypeLabel::CON, {1}));

    const ProbabilityMatrix matrix = build_probability_matrix(train);
    // ACI (index 3) never occurs.
    CHECK(matrix.zero_support[3]);
    CHECK(matrix.support_counts[3] == 0);
    for (int c = 0; c < kNumSubtypes; ++c) {
        CHECK(matrix.rows[3][c] == doctest::Approx(0.25));
    }
}

TEST_CASE("supported rows sum to one") {
    const Dataset data = synth_generate(default_synth_config(), 51);
    const ProbabilityMatrix matrix = build_probability_matrix(data);
    for (int h = 0; h < kNumHistories; ++h) {
        if (matrix.zero_support[h]) continue;
        double sum = 0.0;
        for (int c = 0; c < kNumSubtypes; ++c) {
            sum += matrix.rows[h][c];
            CHECK(matrix.rows[h][c] >= 0.0);
            CHECK(matrix.rows[h][c] <= 1.0);
        }
        CHECK(std::fabs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("matrix entries fall within 3-sigma bounds of the Bayes-rule oracle") {
    const SynthConfig config = default_synth_config();
    const Dataset data = synth_generate(config, 77);
    const ProbabilityMatrix matrix = build_probability_matrix(data);

    for (int h = 0; h < kNumHistories; ++h) {
        REQUIRE_FALSE(matrix.zero_support[h]);
        // P(class | flag) via Bayes over the configured per-class conditionals.
        double evidence = 0.0;
        std::array<double, kNumSubtypes> expected{};
        for (int c = 0; c < kNumSubtypes; ++c) {
            expected[c] = static_cast<double>(config.classes[c].count) *
                          config.classes[c].history_prob[h];
            evidence += expected[c];
        }
        const double n = static_cast<double>(matrix.support_counts[h]);
        for (int c = 0; c < kNumSubtypes; ++c) {
            const double p = expected[c] / evidence;
            const double sigma = std::sqrt(p * (1.0 - p) / n);
            CHECK(std::fabs(matrix.rows[h][c] - p) <= 3.0 * sigma + 1e-12);
        }
    }
}

TEST_CASE("unlabeled samples are rejected") {
    Dataset train;
    train.samples.push_back(labeled_sample("a", SubtypeLabel::AMI, {0}));
    train.samples.push_back(labeled_sample("b", SubtypeLabel::CAD, {}));
    train.samples[1].label.reset();
    CHECK_THROWS_AS(build_probability_matrix(train), UnlabeledSample);
}

TEST_CASE("train/test matrices differ whenever the held-out flags differ") {
    // The estimator must never see the test split: feeding the union changes
    // the matrix, so equality would reveal leakage.
    Dataset train, both;
    train.samples.push_back(labeled_sample("a", SubtypeLabel::AMI, {0}));
    train.samples.push_back(labeled_sample("b", SubtypeLabel::CAD, {0}));
    both = train;
    both.samples.push_back(labeled_sample("t", SubtypeLabel::CON, {0}));

    const ProbabilityMatrix from_train = build_probability_matrix(train);
    const ProbabilityMatrix from_union = build_probability_matrix(both);
    CHECK(from_train.rows[0] != from_union.rows[0]);
}

TEST_CASE("fixed-ratio matrix splits mass 0.9 / 0.02") {
    const WeightMatrix fixed = WeightMatrix::fixed_ratio(0.9);
    for (int c = 0; c < kNumSubtypes; ++c) {
        CHECK(fixed.at(0, c) == doctest::Approx(0.9));
        for (int h = 1; h <= kNumHistories; ++h) {
            CHECK(fixed.at(h, c) == doctest::Approx(0.02));
        }
    }
    CHECK_THROWS_AS(WeightMatrix::fixed_ratio(0.0), InvalidConfig);
    CHECK_THROWS_AS(WeightMatrix::fixed_ratio(1.0), InvalidConfig);
}

TEST_CASE("all-ones weights with no flags under masked policy is the identity") {
    const std::array<double, 4> e_raman = {0.55, 0.2, 0.15, 0.1};
    ProbabilityMatrix prob;  // any content; rows are masked out
    for (auto& row : prob.rows) row = {0.3, 0.3, 0.2, 0.2};
    const WeightMatrix ones = WeightMatrix::ones();
    HistoryVector no_flags;

    const FusionOutput out =
        fuse(e_raman, prob, no_flags, ones, FusionPolicy::Masked);
    for (int c = 0; c < kNumSubtypes; ++c) {
        CHECK(out.class_scores[c] == e_raman[c]);  // exact
    }
}

TEST_CASE("fixed 9:1 fusion reproduces the worked example") {
    // e_R = [1,0,0,0], one active flag whose probability row is [0,1,0,0]:
    // scores = 0.9*e_R + 0.02*row = [0.9, 0.02, 0, 0].
    const std::array<double, 4> e_raman = {1.0, 0.0, 0.0, 0.0};
    ProbabilityMatrix prob;
    for (auto& row : prob.rows) row = {0.0, 0.0, 0.0, 0.0};
    prob.rows[2] = {0.0, 1.0, 0.0, 0.0};
    HistoryVector history;
    history[2] = true;

    const FusionOutput out = fuse(e_raman, prob, history, WeightMatrix::fixed_ratio(0.9),
                                  FusionPolicy::Masked);
    CHECK(out.class_scores[0] == doctest::Approx(0.9));
    CHECK(out.class_scores[1] == doctest::Approx(0.02));
    CHECK(out.class_scores[2] == doctest::Approx(0.0));
    CHECK(out.class_scores[3] == doctest::Approx(0.0));
}

TEST_CASE("global policy keeps every probability row in the stack") {
    const std::array<double, 4> e_raman = {0.25, 0.25, 0.25, 0.25};
    ProbabilityMatrix prob;
    for (auto& row : prob.rows) row = {1.0, 0.0, 0.0, 0.0};
    HistoryVector no_flags;

    const FusionOutput masked =
        fuse(e_raman, prob, no_flags, WeightMatrix::ones(), FusionPolicy::Masked);
    const FusionOutput global =
        fuse(e_raman, prob, no_flags, WeightMatrix::ones(), FusionPolicy::Global);
    CHECK(masked.class_scores[0] == doctest::Approx(0.25));
    CHECK(global.class_scores[0] == doctest::Approx(5.25));  // 0.25 + 5 rows of 1
}

TEST_CASE("fused probabilities sum to one; argmax is shift invariant") {
    Rng rng(61);
    for (int trial = 0; trial < 1000; ++trial) {
        std::array<double, 4> scores;
        for (double& s : scores) s = rng.uniform(-3.0, 3.0);
        const auto base = softmax(scores);
        double sum = 0.0;
        for (double p : base) sum += p;
        CHECK(std::fabs(sum - 1.0) < 1e-12);

        const double shift = rng.uniform(-50.0, 50.0);
        std::array<double, 4> shifted = scores;
        for (double& s : shifted) s += shift;
        const auto moved = softmax(shifted);

        const auto argmax = [](const std::vector<double>& v) {
            std::size_t best = 0;
            for (std::size_t k = 1; k < v.size(); ++k) {
                if (v[k] > v[best]) best = k;
            }
            return best;
        };
        CHECK(argmax(base) == argmax(moved));
    }
}

TEST_CASE("zero-initialized head yields the uniform preliminary prediction") {
    ExtractorConfig config;
    config.scales = {8, 16};
    MultiScaleExtractor extractor(config);
    Rng rng(62);
    extractor.init_params(rng);
    // Zero the head: logits become 0 regardless of the branch embeddings.
    for (Tensor* t : extractor.head().parameters()) {
        std::fill(t->data.begin(), t->data.end(), 0.0);
    }

    const Dataset data = synth_generate(default_synth_config(), 5);
    std::vector<GafImage> images;
    for (std::size_t scale : config.scales) images.push_back(encode(data.samples[0], scale));
    const auto e_raman = extractor.extract(images);
    for (double p : e_raman) CHECK(p == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("identical spectra produce identical preliminary predictions") {
    ExtractorConfig config;
    config.scales = {8, 16};
    MultiScaleExtractor extractor(config);
    Rng rng(63);
    extractor.init_params(rng);

    const Dataset data = synth_generate(default_synth_config(), 6);
    std::vector<GafImage> images;
    for (std::size_t scale : config.scales) images.push_back(encode(data.samples[3], scale));
    const auto a = extractor.extract(images);
    const auto b = extractor.extract(images);
    for (int c = 0; c < kNumSubtypes; ++c) CHECK(a[c] == b[c]);
}

TEST_CASE("preliminary predictions always live on the simplex") {
    ExtractorConfig config;
    config.scales = {8, 16};
    MultiScaleExtractor extractor(config);
    Rng rng(64);
    extractor.init_params(rng);

    SynthConfig synth = default_synth_config();
    for (auto& cls : synth.classes) cls.count = 25;
    const Dataset data = synth_generate(synth, 19);
    for (const auto& sample : data.samples) {
        std::vector<GafImage> images;
        for (std::size_t scale : config.scales) images.push_back(encode(sample, scale));
        const auto e_raman = extractor.extract(images);
        double sum = 0.0;
        for (double p : e_raman) {
            CHECK(p >= 0.0);
            sum += p;
        }
        CHECK(std::fabs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("extractor rejects images at the wrong scale") {
    ExtractorConfig config;
    config.scales = {8, 16};
    MultiScaleExtractor extractor(config);
    Rng rng(65);
    extractor.init_params(rng);

    const Dataset data = synth_generate(default_synth_config(), 5);
    std::vector<GafImage> wrong;
    wrong.push_back(encode(data.samples[0], 16));
    wrong.push_back(encode(data.samples[0], 8));
    CHECK_THROWS_AS(extractor.extract(wrong), ShapeError);
}
