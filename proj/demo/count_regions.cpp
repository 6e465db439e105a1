// Copyright 2026 The pwln-interp Authors
// SPDX-License-Identifier: Apache-2.0

// Counts the linear regions of a random single-layer net three ways: the
// exact 2-D arrangement count, grid-sampled activation patterns at rising
// resolutions, and the closed-form ceiling.
// Build and run:  ./demo_count_regions

#include <cstdio>
#include <random>

#include "pwln/bounds.hpp"
#include "pwln/nn.hpp"
#include "pwln/region_oracle.hpp"

int main() {
    const pwln::PwlnArchitecture arch{2, {6}, 2};
    pwln::MlpModel model = pwln::init_truncated_normal(arch, 21);
    // Continuous draws put the six lines in general position, where the
    // ceiling is attained.
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> param(-1.0, 1.0);
    for (pwln::Matrix& w : model.weights) {
        for (double& v : w.data) v = param(rng);
    }
    for (auto& b : model.biases) {
        for (double& v : b) v = param(rng);
    }

    const long exact = pwln::count_regions_exact_2d(
        pwln::first_layer_hyperplanes(model));
    const double ceiling = pwln::complexity_upper(arch).value();
    std::printf("architecture        %s\n", pwln::to_literal(arch).c_str());
    std::printf("exact region count  %ld\n", exact);
    std::printf("closed-form ceiling %.0f\n", ceiling);

    const pwln::InputBox box{{-4.0, -4.0}, {4.0, 4.0}};
    for (int resolution : {8, 32, 128, 512}) {
        const long grid =
            pwln::count_activation_patterns_grid(model, box, resolution);
        std::printf("grid %3dx%-3d        %ld\n", resolution, resolution,
                    grid);
    }
    return 0;
}
