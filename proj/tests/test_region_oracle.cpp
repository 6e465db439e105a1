// Copyright 2026 The pwln-interp Authors
// SPDX-License-Identifier: Apache-2.0

#include "pwln/region_oracle.hpp"

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "catch2/catch_amalgamated.hpp"
#include "pwln/bounds.hpp"
#include "pwln/nn.hpp"

namespace {

using pwln::Hyperplane2D;
using pwln::InputBox;
using pwln::MlpModel;
using pwln::PwlnArchitecture;

Hyperplane2D line(double nx, double ny, double offset) {
    return Hyperplane2D{{nx, ny}, offset};
}

// Single-layer 2-D model with parameters from a continuous distribution;
// biases included so the lines are in general position almost surely.
MlpModel random_plane_model(int hidden, std::uint64_t seed, int classes = 2) {
    MlpModel model = pwln::init_truncated_normal(
        PwlnArchitecture{2, {hidden}, classes}, seed);
    std::mt19937_64 rng(seed ^ 0xabcdef);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (pwln::Matrix& w : model.weights) {
        for (double& v : w.data) v = dist(rng);
    }
    for (auto& b : model.biases) {
        for (double& v : b) v = dist(rng);
    }
    return model;
}

TEST_CASE("exact 2-D region counts on hand geometries", "[region]") {
    // Empty arrangement: the whole plane.
    CHECK(pwln::count_regions_exact_2d({}) == 1);
    // One line.
    CHECK(pwln::count_regions_exact_2d({line(1, 0, 0)}) == 2);
    // Two crossing lines.
    CHECK(pwln::count_regions_exact_2d({line(1, 0, 0), line(0, 1, 0)}) == 4);
    // Two parallel distinct lines.
    CHECK(pwln::count_regions_exact_2d({line(1, 0, 0), line(1, 0, 1)}) == 3);
    // Coincident duplicates add nothing, including rescaled and flipped
    // representations of the same line.
    CHECK(pwln::count_regions_exact_2d({line(1, 0, 1), line(1, 0, 1)}) == 2);
    CHECK(pwln::count_regions_exact_2d({line(1, 0, 1), line(2, 0, 2)}) == 2);
    CHECK(pwln::count_regions_exact_2d({line(1, 0, 1), line(-1, 0, -1)}) == 2);
    // Three concurrent lines through the origin: 6, not the generic 7.
    CHECK(pwln::count_regions_exact_2d(
              {line(1, 0, 0), line(0, 1, 0), line(1, 1, 0)}) == 6);
    // Three generic lines.
    CHECK(pwln::count_regions_exact_2d(
              {line(1, 0, 0), line(0, 1, 0), line(1, 1, 1)}) == 7);
    // Four generic lines: 1 + 4 + C(4,2).
    CHECK(pwln::count_regions_exact_2d(
              {line(1, 0, 0), line(0, 1, 0), line(1, 1, 1),
               line(1, -1, 0.5)}) == 11);
}

TEST_CASE("exact 2-D counter validates input", "[region]") {
    CHECK_THROWS_MATCHES(
        pwln::count_regions_exact_2d({line(0, 0, 1)}), std::invalid_argument,
        Catch::Matchers::MessageMatches(
            Catch::Matchers::ContainsSubstring("degenerate")));
    std::vector<Hyperplane2D> many(65, line(1, 0, 0));
    CHECK_THROWS_MATCHES(
        pwln::count_regions_exact_2d(many), std::invalid_argument,
        Catch::Matchers::MessageMatches(
            Catch::Matchers::ContainsSubstring("64")));
}

TEST_CASE("exact counts certify the single-layer upper bound", "[region]") {
    int equal_count = 0;
    const int trials = 50;
    std::mt19937_64 seed_rng(0xc0ffee);
    for (int t = 0; t < trials; ++t) {
        const int hidden = 1 + static_cast<int>(seed_rng() % 6);
        const MlpModel model = random_plane_model(hidden, seed_rng());
        const long exact = pwln::count_regions_exact_2d(
            pwln::first_layer_hyperplanes(model));
        const long long bound = std::llround(
            pwln::complexity_upper(model.architecture).value());
        CHECK(exact <= bound);
        if (exact == bound) ++equal_count;
    }
    // General position holds almost surely; allow a few numerically
    // detected coincidences.
    CHECK(equal_count >= (trials * 9) / 10);
}

TEST_CASE("grid pattern counts on hand geometries", "[region]") {
    const InputBox box{{-1.0, -1.0}, {1.0, 1.0}};

    MlpModel zero = pwln::init_truncated_normal(
        PwlnArchitecture{2, {4}, 2}, 3);
    for (pwln::Matrix& w : zero.weights) {
        std::fill(w.data.begin(), w.data.end(), 0.0);
    }
    CHECK(pwln::count_activation_patterns_grid(zero, box, 16) == 1);

    // One ReLU whose line crosses the box: exactly two patterns.
    MlpModel single = pwln::init_truncated_normal(
        PwlnArchitecture{2, {1}, 2}, 4);
    single.weights[0](0, 0) = 0.7;
    single.weights[0](0, 1) = -0.3;
    single.biases[0][0] = 0.05;
    CHECK(pwln::count_activation_patterns_grid(single, box, 64) == 2);

    // Random 2-neuron layer: between 1 and 4 patterns, never above the
    // closed-form bound.
    const MlpModel pair_model = random_plane_model(2, 99);
    const long patterns = pwln::count_activation_patterns_grid(
        pair_model, InputBox{{-10.0, -10.0}, {10.0, 10.0}}, 512);
    CHECK(patterns >= 1);
    CHECK(patterns <= 4);
    CHECK(patterns <= std::llround(
              pwln::complexity_upper(pair_model.architecture).value()));
}

TEST_CASE("grid counts stay below exact counts and grow with resolution",
          "[region]") {
    std::mt19937_64 seed_rng(0xfeed);
    const InputBox box{{-8.0, -8.0}, {8.0, 8.0}};
    for (int t = 0; t < 10; ++t) {
        const int hidden = 1 + static_cast<int>(seed_rng() % 6);
        const MlpModel model = random_plane_model(hidden, seed_rng());
        const long exact = pwln::count_regions_exact_2d(
            pwln::first_layer_hyperplanes(model));
        long previous = 0;
        for (int resolution : {4, 8, 16, 32, 64, 128}) {
            const long grid = pwln::count_activation_patterns_grid(
                model, box, resolution);
            CHECK(grid <= exact);
            CHECK(grid >= previous);
            previous = grid;
        }
    }
}

TEST_CASE("grid counting works for deep and 1-D/3-D inputs", "[region]") {
    // Deep net: pattern space covers all hidden layers.
    const MlpModel deep = [] {
        MlpModel m = pwln::init_truncated_normal(
            PwlnArchitecture{2, {3, 3}, 2}, 17);
        std::mt19937_64 rng(555);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        for (pwln::Matrix& w : m.weights) {
            for (double& v : w.data) v = dist(rng);
        }
        for (auto& b : m.biases) {
            for (double& v : b) v = dist(rng);
        }
        return m;
    }();
    long previous = 0;
    for (int resolution : {8, 16, 32}) {
        const long count = pwln::count_activation_patterns_grid(
            deep, InputBox{{-5.0, -5.0}, {5.0, 5.0}}, resolution);
        CHECK(count >= previous);
        previous = count;
    }

    const MlpModel line_model = pwln::init_truncated_normal(
        PwlnArchitecture{1, {4}, 2}, 23);
    CHECK(pwln::count_activation_patterns_grid(
              line_model, InputBox{{-3.0}, {3.0}}, 128) >= 1);

    const MlpModel cube_model = pwln::init_truncated_normal(
        PwlnArchitecture{3, {3}, 2}, 29);
    CHECK(pwln::count_activation_patterns_grid(
              cube_model, InputBox{{-1, -1, -1}, {1, 1, 1}}, 16) >= 1);
}

TEST_CASE("grid op validates input", "[region]") {
    const MlpModel big = pwln::init_truncated_normal(
        PwlnArchitecture{4, {3}, 2}, 1);
    CHECK_THROWS_MATCHES(
        pwln::count_activation_patterns_grid(
            big, InputBox{{0, 0, 0, 0}, {1, 1, 1, 1}}, 8),
        std::invalid_argument,
        Catch::Matchers::MessageMatches(
            Catch::Matchers::ContainsSubstring("input_dim 4")));

    const MlpModel ok = pwln::init_truncated_normal(
        PwlnArchitecture{2, {2}, 2}, 2);
    CHECK_THROWS_AS(pwln::count_activation_patterns_grid(
                        ok, InputBox{{0, 0}, {1, 1}}, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(pwln::count_activation_patterns_grid(
                        ok, InputBox{{0}, {1}}, 8),
                    std::invalid_argument);
    CHECK_THROWS_AS(pwln::count_activation_patterns_grid(
                        ok, InputBox{{0, 2}, {1, 1}}, 8),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        pwln::first_layer_hyperplanes(pwln::init_truncated_normal(
            PwlnArchitecture{3, {2}, 2}, 3)),
        std::invalid_argument);
}

TEST_CASE("grid op counts the same patterns forward emits", "[region]") {
    // Independent recount: enumerate the identical grid, collect the
    // pattern vectors from forward(), and compare cardinalities.
    std::mt19937_64 seed_rng(0xbead);
    for (int t = 0; t < 10; ++t) {
        const MlpModel model = random_plane_model(
            1 + static_cast<int>(seed_rng() % 5), seed_rng());
        const InputBox box{{-4.0, -4.0}, {4.0, 4.0}};
        const int resolution = 32;
        std::set<std::vector<std::uint8_t>> patterns;
        for (int ix = 0; ix < resolution; ++ix) {
            for (int iy = 0; iy < resolution; ++iy) {
                const std::vector<double> x{
                    box.lo[0] + ix * (box.hi[0] - box.lo[0]) / resolution,
                    box.lo[1] + iy * (box.hi[1] - box.lo[1]) / resolution};
                patterns.insert(pwln::forward(model, x).activation_pattern);
            }
        }
        CHECK(pwln::count_activation_patterns_grid(model, box, resolution) ==
              static_cast<long>(patterns.size()));
    }
}

}  // namespace
