// Copyright 2026 The pwln-interp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pwln/classifier.hpp"
#include "pwln/detail/common.hpp"
#include "pwln/matrix.hpp"
#include "pwln/nn.hpp"

namespace pwln {

// Floor for per-sample probability differences before the log: an exact
// match would otherwise contribute an infinite term.
constexpr double kDefaultEntropyEpsilon = 0x1p-30;

// Probability match tolerance for the agreement estimator.
constexpr double kAgreementTolerance = 1e-12;

// Seed-stream tag for the query-subset shuffle (see seed roles in config).
constexpr std::uint64_t kQuerySeedTag = 3;

struct QueryResult {
    std::vector<int> labels;          // hard predictions, ties to lowest index
    std::vector<ProbVector> probabilities;
};

// Queries the black box on every row: hard label = argmax of its
// probability vector.
inline QueryResult query_black_box(const Classifier& model,
                                   const Matrix& features) {
    if (!model.fitted()) {
        throw std::logic_error(detail::cat("query_black_box: ", model.kind(),
                                           " model is not fitted"));
    }
    QueryResult result;
    result.probabilities = model.predict_proba(features);
    result.labels.reserve(result.probabilities.size());
    for (const ProbVector& p : result.probabilities) {
        result.labels.push_back(argmax_index(p));
    }
    return result;
}

namespace detail {

inline void check_probs_vs_labels(const std::vector<ProbVector>& probs,
                                  const std::vector<int>& b_labels,
                                  const char* op) {
    if (probs.size() != b_labels.size()) {
        throw std::invalid_argument(cat(op, ": ", probs.size(),
                                        " probability rows vs ",
                                        b_labels.size(), " labels"));
    }
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (b_labels[i] < 0 ||
            static_cast<std::size_t>(b_labels[i]) >= probs[i].size()) {
            throw std::invalid_argument(cat(op, ": label ", b_labels[i],
                                            " at row ", i, " outside row of ",
                                            probs[i].size(), " classes"));
        }
    }
}

// |p over the black box's class  -  p over the row's own argmax|.
inline double probability_gap(const ProbVector& probs, int b_label) {
    const double p_b = probs[static_cast<std::size_t>(b_label)];
    const double p_max = probs[static_cast<std::size_t>(argmax_index(probs))];
    return std::abs(p_b - p_max);
}

}  // namespace detail

// Difference-based empirical entropy: sum of -log2 of the per-row gap
// between the probability assigned to the black box's class and the row's
// own maximum, floored at epsilon.  Every term is nonnegative (gaps never
// exceed 1), so the sum grows with the evaluation-set size.
inline double empirical_entropy_diff(const std::vector<ProbVector>& a_probs,
                                     const std::vector<int>& b_labels,
                                     double epsilon = kDefaultEntropyEpsilon) {
    if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
        throw std::invalid_argument(detail::cat(
            "empirical_entropy_diff: epsilon must lie in (0, 1), got ",
            epsilon));
    }
    detail::check_probs_vs_labels(a_probs, b_labels, "empirical_entropy_diff");
    double total = 0.0;
    for (std::size_t i = 0; i < a_probs.size(); ++i) {
        const double gap =
            std::max(detail::probability_gap(a_probs[i], b_labels[i]), epsilon);
        total -= std::log2(gap);
    }
    return total;
}

// Agreement-based empirical entropy: binary entropy of the fraction of rows
// whose maximal probability equals the probability over the black box's
// class (within kAgreementTolerance).  0 * log 0 := 0.
inline double empirical_entropy_agreement(
    const std::vector<ProbVector>& a_probs, const std::vector<int>& b_labels) {
    detail::check_probs_vs_labels(a_probs, b_labels,
                                  "empirical_entropy_agreement");
    if (a_probs.empty()) {
        throw std::invalid_argument("empirical_entropy_agreement: no rows");
    }
    std::size_t matches = 0;
    for (std::size_t i = 0; i < a_probs.size(); ++i) {
        if (detail::probability_gap(a_probs[i], b_labels[i]) <=
            kAgreementTolerance) {
            ++matches;
        }
    }
    const double p = static_cast<double>(matches) /
                     static_cast<double>(a_probs.size());
    auto term = [](double q) {
        return q <= 0.0 || q >= 1.0 ? 0.0 : -q * std::log2(q);
    };
    return term(p) + term(1.0 - p);
}

// Relative uncertainty reduction (H_before - H_after) / H_before, clamped
// into [0, 1].  H_before = 0 means the black box's boundary was already
// matched before training: the score is 1 and *h_before_zero flags it.
inline double interpretability_score(double h_before, double h_after,
                                     bool* h_before_zero = nullptr) {
    if (!(h_before >= 0.0) || !(h_after >= 0.0)) {
        throw std::invalid_argument(
            detail::cat("interpretability_score: entropies must be "
                        "nonnegative, got before=",
                        h_before, " after=", h_after));
    }
    if (h_before_zero != nullptr) *h_before_zero = h_before == 0.0;
    if (h_before == 0.0) return 1.0;
    return std::clamp((h_before - h_after) / h_before, 0.0, 1.0);
}

enum class EntropyEstimator { diff, agreement };

inline const char* estimator_name(EntropyEstimator estimator) {
    return estimator == EntropyEstimator::diff ? "diff" : "agreement";
}

inline EntropyEstimator parse_estimator(const std::string& name) {
    if (name == "diff") return EntropyEstimator::diff;
    if (name == "agreement") return EntropyEstimator::agreement;
    throw std::invalid_argument(detail::cat(
        "parse_estimator: unknown estimator \"", name,
        "\" (expected diff|agreement)"));
}

struct InterpretationConfig {
    double query_fraction = 1.0;     // in (0, 1]
    double epsilon = kDefaultEntropyEpsilon;
    std::uint64_t seed = 0;
    bool use_soft_targets = false;   // train A on B's probabilities instead
    bool record_timing = false;      // wall_ms stays 0 when disabled

    void validate() const {
        if (!(query_fraction > 0.0) || query_fraction > 1.0) {
            throw std::invalid_argument(detail::cat(
                "InterpretationConfig: query_fraction must lie in (0, 1], "
                "got ",
                query_fraction));
        }
        if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
            throw std::invalid_argument(detail::cat(
                "InterpretationConfig: epsilon must lie in (0, 1), got ",
                epsilon));
        }
    }
};

// Entropies and score under one estimator.
struct EstimatorScores {
    double h_before = 0.0;
    double h_after = 0.0;
    double interpretability = 0.0;
    bool h_before_zero = false;
};

struct InterpretationReport {
    EstimatorScores diff;
    EstimatorScores agreement;
    double fidelity_before = 0.0;
    double fidelity_after = 0.0;
    std::size_t n_eval = 0;
    std::size_t n_query = 0;
    std::uint64_t seed = 0;
    double epsilon = kDefaultEntropyEpsilon;
    std::string model_a;
    std::string model_b;
    std::string target_mode;  // "hard" or "soft"
    double wall_ms = 0.0;
    // Hash of the full run configuration; the caller that owns the config
    // stamps it before serialization.
    std::string config_fingerprint;
    std::vector<double> sample_gaps_before;  // per eval row, verbose output
    std::vector<double> sample_gaps_after;

    const EstimatorScores& scores(EntropyEstimator estimator) const {
        return estimator == EntropyEstimator::diff ? diff : agreement;
    }

    // Serialization is field-complete and key-sorted, so byte equality of
    // two dumps is equivalent to value equality of two reports.
    nlohmann::json to_json(
        EntropyEstimator primary = EntropyEstimator::agreement,
        bool verbose = false) const {
        const EstimatorScores& main = scores(primary);
        const EntropyEstimator other = primary == EntropyEstimator::diff
                                           ? EntropyEstimator::agreement
                                           : EntropyEstimator::diff;
        const EstimatorScores& companion = scores(other);
        nlohmann::json j{
            {"estimator", estimator_name(primary)},
            {"h_before", main.h_before},
            {"h_after", main.h_after},
            {"interpretability", main.interpretability},
            {"h_before_zero_warning", main.h_before_zero},
            {"companion",
             {{"estimator", estimator_name(other)},
              {"h_before", companion.h_before},
              {"h_after", companion.h_after},
              {"interpretability", companion.interpretability},
              {"h_before_zero_warning", companion.h_before_zero}}},
            {"fidelity_before", fidelity_before},
            {"fidelity_after", fidelity_after},
            {"n_eval", n_eval},
            {"n_query", n_query},
            {"seed", seed},
            {"epsilon", epsilon},
            {"model_a", model_a},
            {"model_b", model_b},
            {"target_mode", target_mode},
            {"wall_ms", wall_ms},
            {"config_fingerprint", config_fingerprint},
        };
        if (verbose) {
            j["sample_gaps_before"] = sample_gaps_before;
            j["sample_gaps_after"] = sample_gaps_after;
        }
        return j;
    }
};

// The five-step interpretation pipeline.  `query_pool` feeds step 1 (a
// seeded subsample of its rows is labeled by the black box), `eval_features`
// is the fixed evaluation subset for entropies and fidelities.  Ground-truth
// labels are not an input: nothing here can read them.
inline InterpretationReport run_interpretation(Classifier& model_a,
                                               const Classifier& model_b,
                                               const Matrix& query_pool,
                                               const Matrix& eval_features,
                                               const InterpretationConfig&
                                                   config = {}) {
    config.validate();
    if (query_pool.rows == 0) {
        throw std::invalid_argument(
            "run_interpretation: query subset is empty");
    }
    if (eval_features.rows == 0) {
        throw std::invalid_argument(
            "run_interpretation: evaluation subset is empty");
    }
    if (!model_b.fitted()) {
        throw std::logic_error(detail::cat("run_interpretation: black box (",
                                           model_b.kind(),
                                           ") is not fitted"));
    }
    if (model_a.class_count() != model_b.class_count()) {
        throw std::invalid_argument(detail::cat(
            "run_interpretation: model A has ", model_a.class_count(),
            " classes but model B has ", model_b.class_count()));
    }
    if (config.use_soft_targets && !model_a.supports_soft_targets()) {
        throw std::invalid_argument(detail::cat(
            "run_interpretation: soft targets requested but ",
            model_a.kind(), " consumes hard labels only"));
    }

    const auto started = std::chrono::steady_clock::now();

    // Step 1: seeded query subsample, labeled by the black box.
    std::vector<int> pool_order(query_pool.rows);
    std::iota(pool_order.begin(), pool_order.end(), 0);
    std::mt19937_64 query_rng(detail::mix_seed(config.seed, kQuerySeedTag));
    detail::shuffle_indices(pool_order, query_rng);
    const auto n_query = static_cast<std::size_t>(std::max<long>(
        1, std::lround(config.query_fraction *
                       static_cast<double>(query_pool.rows))));
    pool_order.resize(std::min(n_query, static_cast<std::size_t>(
                                            query_pool.rows)));
    const Matrix query_features = query_pool.gather_rows(pool_order);
    const QueryResult queries = query_black_box(model_b, query_features);

    // Step 2: the input transform is the identity.

    // Step 3: model A's pre-training probabilities on the evaluation set.
    const std::vector<ProbVector> initial =
        model_a.initial_proba(eval_features);

    // Step 4: train A on the black box's predictions.
    if (config.use_soft_targets) {
        model_a.fit_soft(query_features, queries.probabilities);
    } else {
        model_a.fit(query_features, queries.labels);
    }

    // Step 5: final probabilities, entropies, fidelities.
    const std::vector<ProbVector> final_probs =
        model_a.predict_proba(eval_features);
    const QueryResult eval_queries = query_black_box(model_b, eval_features);
    const std::vector<int>& y_hat = eval_queries.labels;

    InterpretationReport report;
    report.n_eval = eval_features.rows;
    report.n_query = query_features.rows;
    report.seed = config.seed;
    report.epsilon = config.epsilon;
    report.model_a = model_a.kind();
    report.model_b = model_b.kind();
    report.target_mode = config.use_soft_targets ? "soft" : "hard";

    report.diff.h_before =
        empirical_entropy_diff(initial, y_hat, config.epsilon);
    report.diff.h_after =
        empirical_entropy_diff(final_probs, y_hat, config.epsilon);
    report.diff.interpretability = interpretability_score(
        report.diff.h_before, report.diff.h_after, &report.diff.h_before_zero);

    report.agreement.h_before = empirical_entropy_agreement(initial, y_hat);
    report.agreement.h_after =
        empirical_entropy_agreement(final_probs, y_hat);
    report.agreement.interpretability = interpretability_score(
        report.agreement.h_before, report.agreement.h_after,
        &report.agreement.h_before_zero);

    std::size_t hits_before = 0;
    std::size_t hits_after = 0;
    report.sample_gaps_before.reserve(initial.size());
    report.sample_gaps_after.reserve(final_probs.size());
    for (std::size_t i = 0; i < initial.size(); ++i) {
        const auto y = static_cast<std::size_t>(y_hat[i]);
        if (static_cast<std::size_t>(argmax_index(initial[i])) == y) {
            ++hits_before;
        }
        if (static_cast<std::size_t>(argmax_index(final_probs[i])) == y) {
            ++hits_after;
        }
        report.sample_gaps_before.push_back(
            detail::probability_gap(initial[i], y_hat[i]));
        report.sample_gaps_after.push_back(
            detail::probability_gap(final_probs[i], y_hat[i]));
    }
    report.fidelity_before = static_cast<double>(hits_before) /
                             static_cast<double>(initial.size());
    report.fidelity_after = static_cast<double>(hits_after) /
                            static_cast<double>(final_probs.size());

    if (config.record_timing) {
        report.wall_ms =
            std::chrono::duration<double, std::milli>(
                std::chrono::steady_clock::now() - started)
                .count();
    }
    return report;
}

}  // namespace pwln
