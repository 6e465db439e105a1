// Copyright 2026 The pwln-interp Authors
// SPDX-License-Identifier: Apache-2.0

// End-to-end distillation on a synthetic dataset: train a two-layer black
// box on Gaussian blobs, distill a single-layer student from its
// predictions alone, and print the interpretation report.
// Build and run:  ./demo_distill_blobs

#include <iostream>

#include "pwln/config.hpp"
#include "pwln/data_io.hpp"
#include "pwln/interpret.hpp"
#include "pwln/nn.hpp"

int main() {
    const pwln::LabeledDataset dataset =
        pwln::make_blobs(1200, 3, /*spread=*/3.0, /*noise_std=*/0.6,
                         /*seed=*/7);
    const pwln::LabeledSplit split = pwln::split_labeled(
        dataset, /*eval_fraction=*/0.2, /*seed=*/7);

    // The black box sees ground-truth labels; nothing after this line does.
    pwln::TrainConfig teacher_cfg;
    teacher_cfg.epochs = 30;
    pwln::MlpClassifier black_box(
        pwln::init_truncated_normal(
            pwln::PwlnArchitecture{2, {16, 16}, 3}, /*seed=*/1),
        teacher_cfg);
    black_box.fit(split.query_pool, split.pool_labels);

    pwln::TrainConfig student_cfg;
    student_cfg.epochs = 20;
    pwln::MlpClassifier student(
        pwln::init_truncated_normal(pwln::PwlnArchitecture{2, {8}, 3},
                                    /*seed=*/2),
        student_cfg);

    pwln::InterpretationConfig config;
    config.query_fraction = 0.5;  // query half of the pool
    config.seed = 7;
    const pwln::InterpretationReport report = pwln::run_interpretation(
        student, black_box, split.query_pool, split.eval_features, config);

    std::cout << report.to_json(pwln::EntropyEstimator::agreement).dump(2)
              << "\n";
    return 0;
}
