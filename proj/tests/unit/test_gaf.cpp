#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "m3s/errors.hpp"
#include "m3s/gaf.hpp"
#include "m3s/preprocess.hpp"
#include "m3s/rng.hpp"
#include "m3s/synth.hpp"

using namespace m3s;

TEST_CASE("to_polar maps the arccos anchor points") {
    const auto polar = to_polar(std::vector<double>{1.0, -1.0, 0.0});
    CHECK(polar.phi[0] == doctest::Approx(0.0));
    CHECK(polar.phi[1] == doctest::Approx(std::numbers::pi));
    CHECK(polar.phi[2] == doctest::Approx(std::numbers::pi / 2.0));
}

TEST_CASE("to_polar angles increase when values decrease") {
    std::vector<double> xs = {0.9, 0.5, 0.1, -0.3, -0.8};
    const auto polar = to_polar(xs);
    for (std::size_t k = 1; k < xs.size(); ++k) {
        CHECK(polar.phi[k] > polar.phi[k - 1]);
    }
}

TEST_CASE("to_polar radii fill (0,1] with span constant i") {
    const auto polar = to_polar(std::vector<double>{0.1, 0.2, 0.3, 0.4});
    CHECK(polar.span_constant == doctest::Approx(4.0));
    CHECK(polar.radius[0] == doctest::Approx(0.25));
    CHECK(polar.radius[1] == doctest::Approx(0.5));
    CHECK(polar.radius[2] == doctest::Approx(0.75));
    CHECK(polar.radius[3] == doctest::Approx(1.0));
}

TEST_CASE("to_polar clamps boundary residue and rejects real violations") {
    const auto polar = to_polar(std::vector<double>{1.0 + 5e-13, -1.0 - 5e-13});
    CHECK(polar.phi[0] == doctest::Approx(0.0));
    CHECK(polar.phi[1] == doctest::Approx(std::numbers::pi));
    CHECK_THROWS_AS(to_polar(std::vector<double>{1.0 + 1e-6}), DomainError);
    CHECK_THROWS_AS(to_polar(std::vector<double>{-1.001}), DomainError);
}

TEST_CASE("gasf of a single point is cos(2 arccos x)") {
    const auto image = gasf(to_polar(std::vector<double>{1.0}));
    REQUIRE(image.scale == 1);
    CHECK(image.pixels[0] == doctest::Approx(1.0));
}

TEST_CASE("gasf of [1,-1] yields the angle-sum matrix") {
    const auto image = gasf(to_polar(std::vector<double>{1.0, -1.0}));
    REQUIRE(image.scale == 2);
    CHECK(image.at(0, 0) == doctest::Approx(1.0));    // cos 0
    CHECK(image.at(0, 1) == doctest::Approx(-1.0));   // cos pi
    CHECK(image.at(1, 0) == doctest::Approx(-1.0));
    CHECK(image.at(1, 1) == doctest::Approx(1.0));    // cos 2pi
}

TEST_CASE("gasf matches the product-form identity") {
    // cos(a+b) = cos a cos b - sin a sin b, evaluated directly from the values
    Rng rng(21);
    std::vector<double> xs(16);
    for (double& x : xs) x = rng.uniform(-1.0, 1.0);
    const auto image = gasf(to_polar(xs));
    for (std::size_t a = 0; a < xs.size(); ++a) {
        for (std::size_t b = 0; b < xs.size(); ++b) {
            const double expected = xs[a] * xs[b] -
                                    std::sqrt(1.0 - xs[a] * xs[a]) *
                                        std::sqrt(1.0 - xs[b] * xs[b]);
            CHECK(std::fabs(image.at(a, b) - expected) < 1e-12);
        }
    }
}

TEST_CASE("gasf is exactly symmetric with pixels in range") {
    Rng rng(22);
    std::vector<double> xs(33);
    for (double& x : xs) x = rng.uniform(-1.0, 1.0);
    const auto image = gasf(to_polar(xs));
    for (std::size_t a = 0; a < xs.size(); ++a) {
        for (std::size_t b = 0; b < xs.size(); ++b) {
            CHECK(image.at(a, b) == image.at(b, a));  // bit-for-bit
            CHECK(image.at(a, b) >= -1.0 - 1e-12);
            CHECK(image.at(a, b) <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("gasf diagonal equals 2x^2 - 1") {
    Rng rng(23);
    std::vector<double> xs(24);
    for (double& x : xs) x = rng.uniform(-1.0, 1.0);
    const auto image = gasf(to_polar(xs));
    for (std::size_t k = 0; k < xs.size(); ++k) {
        CHECK(std::fabs(image.at(k, k) - (2.0 * xs[k] * xs[k] - 1.0)) < 1e-12);
    }
}

TEST_CASE("encode yields an i x i image at every requested scale") {
    const Dataset dataset = synth_generate(default_synth_config(), 5);
    const auto& spec = dataset.samples[0];
    for (std::size_t scale : {32UL, 64UL, 128UL}) {
        const auto image = encode(spec, scale);
        CHECK(image.scale == scale);
        CHECK(image.pixels.size() == scale * scale);
    }
}

TEST_CASE("encode equals the hand-composed four-stage pipeline") {
    // constant-plus-single-spike spectrum
    std::vector<double> values(kSequenceLength, 0.2);
    values[500] = 3.0;
    RamanSpectrum spec;
    spec.id = "spike";
    spec.values = values;

    const auto image = encode(spec, 32);
    const auto reference = gasf(to_polar(paa(rescale(values), 32)));
    REQUIRE(image.pixels.size() == reference.pixels.size());
    for (std::size_t k = 0; k < image.pixels.size(); ++k) {
        CHECK(image.pixels[k] == reference.pixels[k]);
    }
}

TEST_CASE("encode is invariant to positive affine transforms of the input") {
    const Dataset dataset = synth_generate(default_synth_config(), 6);
    RamanSpectrum original = dataset.samples[0];
    RamanSpectrum shifted = original;
    for (double& v : shifted.values) v = 2.5 * v + 7.0;

    const auto a = encode(original, 64);
    const auto b = encode(shifted, 64);
    for (std::size_t k = 0; k < a.pixels.size(); ++k) {
        CHECK(std::fabs(a.pixels[k] - b.pixels[k]) < 1e-12);
    }
}

TEST_CASE("encode propagates preprocessing errors") {
    RamanSpectrum flat;
    flat.id = "flat";
    flat.values.assign(kSequenceLength, 1.0);
    CHECK_THROWS_AS(encode(flat, 32), ConstantSequence);

    const Dataset dataset = synth_generate(default_synth_config(), 5);
    CHECK_THROWS_AS(encode(dataset.samples[0], 0), InvalidGroups);
    CHECK_THROWS_AS(encode(dataset.samples[0], kSequenceLength + 1), InvalidGroups);
}
