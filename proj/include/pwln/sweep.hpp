// Copyright 2026 The pwln-interp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <future>
#include <memory>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pwln/architecture.hpp"
#include "pwln/config.hpp"
#include "pwln/data_io.hpp"
#include "pwln/interpret.hpp"

namespace pwln {

// Shared setup for a run: dataset loaded (and optionally normalized), rows
// split into query pool and evaluation subset, black box built and fitted.
// Ground-truth labels are consumed here and nowhere downstream.
struct PreparedRun {
    LabeledDataset dataset;
    LabeledSplit split;
    std::shared_ptr<Classifier> black_box;
};

inline PreparedRun prepare_run(const RunConfig& config) {
    PreparedRun run;
    run.dataset = load_dataset_spec(config.dataset, config.data_dir);
    if (config.normalize) {
        run.dataset = minmax_normalize(std::move(run.dataset));
    }
    run.split =
        split_labeled(run.dataset, config.eval_fraction, config.seed);

    std::unique_ptr<Classifier> black_box = build_model(
        config.model_b, run.dataset.class_count,
        detail::mix_seed(config.seed, kSeedRoleBlackBoxInit),
        config.data_dir);
    if (!black_box->fitted()) {
        black_box->fit(run.split.query_pool, run.split.pool_labels);
    }
    run.black_box = std::move(black_box);
    return run;
}

inline InterpretationConfig make_interpretation_config(
    const RunConfig& config, std::uint64_t point_seed) {
    InterpretationConfig ic;
    ic.query_fraction = config.query_fraction;
    ic.epsilon = config.epsilon;
    ic.seed = point_seed;
    ic.use_soft_targets = config.soft_targets;
    ic.record_timing = config.record_timing;
    return ic;
}

// One full interpretation run from a config: build the student, distill it
// against the prepared black box, and stamp the config fingerprint.
inline InterpretationReport run_distill(const RunConfig& config) {
    PreparedRun run = prepare_run(config);
    std::unique_ptr<Classifier> student = build_model(
        config.model_a, run.dataset.class_count,
        detail::mix_seed(config.seed, kSeedRoleStudentInit),
        config.data_dir);
    InterpretationReport report = run_interpretation(
        *student, *run.black_box, run.split.query_pool,
        run.split.eval_features,
        make_interpretation_config(config, config.seed));
    report.config_fingerprint = config_fingerprint(config, RunMode::distill);
    return report;
}

struct SweepPoint {
    nlohmann::json axis_value;
    std::uint64_t seed = 0;
    InterpretationReport report;
};

struct SweepResult {
    std::vector<SweepPoint> points;  // value-major, seed-minor
    std::string csv;
    // Per axis value, primary-estimator interpretability aggregates
    // (std is 0 when only one seed ran).
    std::vector<std::string> value_labels;
    std::vector<double> mean_interpretability;
    std::vector<double> std_interpretability;
};

namespace detail {

inline double mean_of(const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return xs.empty() ? 0.0 : sum / static_cast<double>(xs.size());
}

// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 points.
inline double sample_std(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean_of(xs);
    double sum_sq = 0.0;
    for (double x : xs) sum_sq += (x - m) * (x - m);
    return std::sqrt(sum_sq / static_cast<double>(xs.size() - 1));
}

// Doubles are rendered through the JSON serializer so CSV cells and report
// fields show identical digits (shortest round-trip form).
inline std::string csv_number(double x) {
    return nlohmann::json(x).dump();
}

inline std::string axis_value_label(const nlohmann::json& value) {
    return value.is_string() ? value.get<std::string>() : value.dump();
}

// Applies one axis value to the student spec.  Width and optimizer axes
// rewrite the mlp spec; the query_fraction axis is handled at
// interpretation-config level instead.
inline ModelSpec student_spec_for_point(const RunConfig& config,
                                        int class_count, SweepAxis axis,
                                        const nlohmann::json& value) {
    ModelSpec spec = config.model_a;
    if (axis == SweepAxis::width) {
        PwlnArchitecture arch = parse_architecture(spec.arch, class_count);
        for (int& w : arch.layer_widths) w = value.get<int>();
        spec.arch = to_literal(arch);
    } else if (axis == SweepAxis::optimizer) {
        spec.train.optimizer = parse_optimizer(value.get<std::string>());
    }
    return spec;
}

}  // namespace detail

// Runs the full grid of (axis value, seed) points.  The dataset, split, and
// black box are prepared once and shared read-only; each point owns its
// student model and RNG streams, so results are independent of scheduling.
inline SweepResult run_sweep(const RunConfig& config) {
    if (config.axis.empty() || config.values.empty() ||
        config.seeds.empty()) {
        throw std::invalid_argument(
            "run_sweep: axis, values, and seeds are required");
    }
    const SweepAxis axis = parse_sweep_axis(config.axis);
    const EntropyEstimator estimator = parse_estimator(config.estimator);
    const std::string fingerprint =
        config_fingerprint(config, RunMode::sweep);

    const PreparedRun run = prepare_run(config);
    const int class_count = run.dataset.class_count;

    // Pre-resolve every point's inputs so worker tasks touch only their own
    // state plus the shared read-only black box.
    struct PointJob {
        std::size_t value_index;
        nlohmann::json value;
        std::uint64_t seed;
    };
    std::vector<PointJob> jobs;
    for (std::size_t vi = 0; vi < config.values.size(); ++vi) {
        for (std::uint64_t seed : config.seeds) {
            jobs.push_back({vi, config.values[vi], seed});
        }
    }

    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    static constexpr std::ptrdiff_t kMaxWorkers = 64;
    std::counting_semaphore<kMaxWorkers> slots(static_cast<std::ptrdiff_t>(
        std::min<std::size_t>({jobs.size(), hw, kMaxWorkers})));

    auto run_point = [&](const PointJob& job) {
        slots.acquire();
        struct Release {
            std::counting_semaphore<kMaxWorkers>& s;
            ~Release() { s.release(); }
        } release{slots};

        RunConfig point_config = config;
        if (axis == SweepAxis::query_fraction) {
            point_config.query_fraction = job.value.get<double>();
        }
        const ModelSpec student_spec = detail::student_spec_for_point(
            config, class_count, axis, job.value);
        std::unique_ptr<Classifier> student = build_model(
            student_spec, class_count,
            detail::mix_seed(job.seed, kSeedRoleStudentInit),
            config.data_dir);
        InterpretationReport report = run_interpretation(
            *student, *run.black_box, run.split.query_pool,
            run.split.eval_features,
            make_interpretation_config(point_config, job.seed));
        report.config_fingerprint = fingerprint;
        return report;
    };

    std::vector<std::future<InterpretationReport>> futures;
    futures.reserve(jobs.size());
    for (const PointJob& job : jobs) {
        futures.push_back(
            std::async(std::launch::async, run_point, std::cref(job)));
    }

    SweepResult result;
    result.points.reserve(jobs.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        result.points.push_back(
            {jobs[i].value, jobs[i].seed, futures[i].get()});
    }

    // CSV: one data row per point (primary estimator), then per-value
    // aggregate rows — a mean row always, plus a sample-std row when at
    // least two seeds ran.
    std::string csv =
        "axis_value,seed,estimator,H_before,H_after,interpretability,"
        "fidelity_before,fidelity_after,wall_ms\n";
    for (const SweepPoint& point : result.points) {
        const EstimatorScores scores = point.report.scores(estimator);
        csv += detail::cat(
            detail::axis_value_label(point.axis_value), ",",
            std::to_string(point.seed), ",", config.estimator, ",",
            detail::csv_number(scores.h_before), ",",
            detail::csv_number(scores.h_after), ",",
            detail::csv_number(scores.interpretability), ",",
            detail::csv_number(point.report.fidelity_before), ",",
            detail::csv_number(point.report.fidelity_after), ",",
            detail::csv_number(point.report.wall_ms), "\n");
    }

    const std::size_t n_seeds = config.seeds.size();
    for (std::size_t vi = 0; vi < config.values.size(); ++vi) {
        std::vector<double> h_before, h_after, interp, fid_before, fid_after,
            wall;
        for (std::size_t si = 0; si < n_seeds; ++si) {
            const SweepPoint& point = result.points[vi * n_seeds + si];
            const EstimatorScores scores = point.report.scores(estimator);
            h_before.push_back(scores.h_before);
            h_after.push_back(scores.h_after);
            interp.push_back(scores.interpretability);
            fid_before.push_back(point.report.fidelity_before);
            fid_after.push_back(point.report.fidelity_after);
            wall.push_back(point.report.wall_ms);
        }
        const std::string label =
            detail::axis_value_label(config.values[vi]);
        csv += detail::cat(label, ",mean,", config.estimator, ",",
                           detail::csv_number(detail::mean_of(h_before)), ",",
                           detail::csv_number(detail::mean_of(h_after)), ",",
                           detail::csv_number(detail::mean_of(interp)), ",",
                           detail::csv_number(detail::mean_of(fid_before)),
                           ",",
                           detail::csv_number(detail::mean_of(fid_after)),
                           ",", detail::csv_number(detail::mean_of(wall)),
                           "\n");
        if (n_seeds >= 2) {
            csv += detail::cat(
                label, ",std,", config.estimator, ",",
                detail::csv_number(detail::sample_std(h_before)), ",",
                detail::csv_number(detail::sample_std(h_after)), ",",
                detail::csv_number(detail::sample_std(interp)), ",",
                detail::csv_number(detail::sample_std(fid_before)), ",",
                detail::csv_number(detail::sample_std(fid_after)), ",",
                detail::csv_number(detail::sample_std(wall)), "\n");
        }
        result.value_labels.push_back(label);
        result.mean_interpretability.push_back(detail::mean_of(interp));
        result.std_interpretability.push_back(detail::sample_std(interp));
    }
    result.csv = std::move(csv);
    return result;
}

}  // namespace pwln
