// Copyright 2026 The pwln-interp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pwln/classifier.hpp"
#include "pwln/detail/common.hpp"
#include "pwln/matrix.hpp"
#include "pwln/nn.hpp"

namespace pwln {

// Gini impurity of a class-count histogram: 1 - sum p_k^2, in [0, 1-1/c].
inline double gini_impurity(const std::vector<long>& counts) {
    long total = 0;
    for (long c : counts) {
        if (c < 0) {
            throw std::invalid_argument("gini_impurity: negative count");
        }
        total += c;
    }
    if (total == 0) {
        throw std::invalid_argument("gini_impurity: all counts are zero");
    }
    double sum_sq = 0.0;
    for (long c : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

namespace detail {

// Shared label validation: labels in [0, c) with c inferred when not given.
inline int resolve_class_count(const std::vector<int>& labels,
                               int declared_count, const char* op) {
    int max_label = -1;
    for (int y : labels) {
        if (y < 0) {
            throw std::invalid_argument(
                cat(op, ": negative label ", y));
        }
        max_label = std::max(max_label, y);
    }
    const int inferred = max_label + 1;
    if (declared_count < 0) {
        if (inferred < 2) {
            throw std::invalid_argument(
                cat(op, ": need at least 2 classes, saw only labels < ",
                    inferred));
        }
        return inferred;
    }
    if (inferred > declared_count) {
        throw std::invalid_argument(
            cat(op, ": label ", max_label, " outside declared class count ",
                declared_count));
    }
    return declared_count;
}

}  // namespace detail

struct DecisionTreeOptions {
    int max_depth = 12;
    int min_samples_leaf = 2;
    // Class count when known up front (enables pre-fit initial_proba and
    // padding for classes absent from the training labels); -1 = infer.
    int class_count = -1;
};

// Axis-aligned decision tree grown greedily on the Gini criterion.  Split
// thresholds are midpoints between consecutive distinct sorted feature
// values; among equal-impurity candidates the lowest feature index wins,
// then the lowest threshold.  Leaves store class-frequency distributions.
class DecisionTreeClassifier final : public Classifier {
public:
    explicit DecisionTreeClassifier(DecisionTreeOptions options = {})
        : options_(options) {
        if (options_.max_depth < 1) {
            throw std::invalid_argument(detail::cat(
                "DecisionTreeClassifier: max_depth must be >= 1, got ",
                options_.max_depth));
        }
        if (options_.min_samples_leaf < 1) {
            throw std::invalid_argument(detail::cat(
                "DecisionTreeClassifier: min_samples_leaf must be >= 1, got ",
                options_.min_samples_leaf));
        }
        if (options_.class_count == 0 || options_.class_count == 1) {
            throw std::invalid_argument(
                "DecisionTreeClassifier: class_count must be >= 2");
        }
        if (options_.class_count >= 2) class_count_ = options_.class_count;
    }

    std::string kind() const override { return "tree"; }

    int class_count() const override {
        if (class_count_ < 0) {
            throw std::logic_error(
                "DecisionTreeClassifier: class count unknown before fit");
        }
        return class_count_;
    }

    bool fitted() const override { return fitted_; }

    void fit(const Matrix& features, const std::vector<int>& labels) override {
        if (features.rows == 0) {
            throw std::invalid_argument("tree fit: empty dataset");
        }
        if (features.rows != labels.size()) {
            throw std::invalid_argument(
                detail::cat("tree fit: ", features.rows, " feature rows vs ",
                            labels.size(), " labels"));
        }
        class_count_ = detail::resolve_class_count(
            labels, options_.class_count, "tree fit");
        nodes_.clear();
        std::vector<int> indices(features.rows);
        std::iota(indices.begin(), indices.end(), 0);
        build_node(features, labels, indices, 1);
        fitted_ = true;
    }

    std::vector<ProbVector> predict_proba(
        const Matrix& features) const override {
        require_fitted("predict_proba");
        std::vector<ProbVector> out;
        out.reserve(features.rows);
        for (std::size_t i = 0; i < features.rows; ++i) {
            const auto row = features.row(i);
            std::size_t node = 0;
            while (!nodes_[node].is_leaf()) {
                const Node& n = nodes_[node];
                node = row[static_cast<std::size_t>(n.feature)] <= n.threshold
                           ? n.left
                           : n.right;
            }
            out.push_back(nodes_[node].distribution);
        }
        return out;
    }

    std::vector<ProbVector> initial_proba(
        const Matrix& features) const override {
        if (class_count_ < 0) {
            throw std::logic_error(
                "tree initial_proba: class count unknown (construct with an "
                "explicit class_count or fit first)");
        }
        return Classifier::initial_proba(features);
    }

    // Number of decision nodes plus leaves; 1 means a leaf-only tree.
    std::size_t node_count() const { return nodes_.size(); }

    const DecisionTreeOptions& options() const { return options_; }

private:
    struct Node {
        int feature = -1;
        double threshold = 0.0;
        std::size_t left = 0;
        std::size_t right = 0;
        ProbVector distribution;  // populated on leaves only

        bool is_leaf() const { return feature < 0; }
    };

    // Grows the subtree over `indices`, returns its node id.  Recursion
    // terminates because every accepted split strictly shrinks both sides.
    std::size_t build_node(const Matrix& features,
                           const std::vector<int>& labels,
                           const std::vector<int>& indices, int depth) {
        std::vector<long> counts(static_cast<std::size_t>(class_count_), 0);
        for (int i : indices) {
            ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(
                i)])];
        }
        const bool pure =
            std::count_if(counts.begin(), counts.end(),
                          [](long c) { return c > 0; }) <= 1;

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_score = std::numeric_limits<double>::infinity();
        if (!pure && depth <= options_.max_depth &&
            indices.size() >=
                2 * static_cast<std::size_t>(options_.min_samples_leaf)) {
            find_best_split(features, labels, indices, best_feature,
                            best_threshold, best_score);
        }

        if (best_feature < 0) {
            Node leaf;
            leaf.distribution.resize(counts.size());
            for (std::size_t k = 0; k < counts.size(); ++k) {
                leaf.distribution[k] = static_cast<double>(counts[k]) /
                                       static_cast<double>(indices.size());
            }
            nodes_.push_back(std::move(leaf));
            return nodes_.size() - 1;
        }

        std::vector<int> left_idx;
        std::vector<int> right_idx;
        for (int i : indices) {
            const double v = features(static_cast<std::size_t>(i),
                                      static_cast<std::size_t>(best_feature));
            (v <= best_threshold ? left_idx : right_idx).push_back(i);
        }
        const std::size_t id = nodes_.size();
        nodes_.emplace_back();
        nodes_[id].feature = best_feature;
        nodes_[id].threshold = best_threshold;
        const std::size_t left =
            build_node(features, labels, left_idx, depth + 1);
        const std::size_t right =
            build_node(features, labels, right_idx, depth + 1);
        nodes_[id].left = left;
        nodes_[id].right = right;
        return id;
    }

    // Scans every feature's midpoint thresholds for the minimal weighted
    // child Gini.  Strict `<` keeps the first — lowest-feature, lowest-
    // threshold — candidate on ties.  A candidate must leave at least
    // min_samples_leaf on each side; it need not beat the parent impurity
    // (an even split of an even mixture is how fragments like XOR resolve).
    void find_best_split(const Matrix& features, const std::vector<int>& labels,
                         const std::vector<int>& indices, int& best_feature,
                         double& best_threshold, double& best_score) const {
        const auto n = static_cast<double>(indices.size());
        const std::size_t c = static_cast<std::size_t>(class_count_);
        std::vector<std::pair<double, int>> column(indices.size());
        std::vector<long> left_counts(c), right_counts(c);
        for (std::size_t f = 0; f < features.cols; ++f) {
            for (std::size_t k = 0; k < indices.size(); ++k) {
                const auto i = static_cast<std::size_t>(indices[k]);
                column[k] = {features(i, f), labels[i]};
            }
            std::sort(column.begin(), column.end());

            std::fill(left_counts.begin(), left_counts.end(), 0);
            std::fill(right_counts.begin(), right_counts.end(), 0);
            for (const auto& [value, label] : column) {
                ++right_counts[static_cast<std::size_t>(label)];
            }

            // Sweep samples left-to-right; a threshold candidate sits
            // between positions k-1 and k whenever the value changes.
            for (std::size_t k = 1; k < column.size(); ++k) {
                const auto moved = static_cast<std::size_t>(column[k - 1].second);
                ++left_counts[moved];
                --right_counts[moved];
                if (column[k].first == column[k - 1].first) continue;
                if (k < static_cast<std::size_t>(options_.min_samples_leaf) ||
                    column.size() - k <
                        static_cast<std::size_t>(options_.min_samples_leaf)) {
                    continue;
                }
                const double threshold =
                    column[k - 1].first +
                    (column[k].first - column[k - 1].first) / 2.0;
                const double score =
                    (static_cast<double>(k) / n) * gini_from_counts(left_counts) +
                    (static_cast<double>(column.size() - k) / n) *
                        gini_from_counts(right_counts);
                if (score < best_score) {
                    best_score = score;
                    best_feature = static_cast<int>(f);
                    best_threshold = threshold;
                }
            }
        }
    }

    static double gini_from_counts(const std::vector<long>& counts) {
        long total = 0;
        for (long c : counts) total += c;
        double sum_sq = 0.0;
        for (long c : counts) {
            const double p =
                static_cast<double>(c) / static_cast<double>(total);
            sum_sq += p * p;
        }
        return 1.0 - sum_sq;
    }

    DecisionTreeOptions options_;
    int class_count_ = -1;
    bool fitted_ = false;
    std::vector<Node> nodes_;
};

struct LogisticRegressionOptions {
    double learning_rate = 0.5;
    long epochs = 200;
    int class_count = -1;
};

// Multinomial logistic regression trained by full-batch gradient descent on
// cross-entropy.  Parameters start at zero, so the untrained model emits
// uniform probabilities and repeated fits are deterministic without a seed.
class LogisticRegressionClassifier final : public Classifier {
public:
    explicit LogisticRegressionClassifier(LogisticRegressionOptions options = {})
        : options_(options) {
        if (!(options_.learning_rate > 0.0) ||
            !std::isfinite(options_.learning_rate)) {
            throw std::invalid_argument(
                "LogisticRegressionClassifier: learning_rate must be finite "
                "and positive");
        }
        if (options_.epochs < 1) {
            throw std::invalid_argument(
                "LogisticRegressionClassifier: epochs must be >= 1");
        }
        if (options_.class_count == 0 || options_.class_count == 1) {
            throw std::invalid_argument(
                "LogisticRegressionClassifier: class_count must be >= 2");
        }
        if (options_.class_count >= 2) class_count_ = options_.class_count;
    }

    std::string kind() const override { return "logistic"; }

    int class_count() const override {
        if (class_count_ < 0) {
            throw std::logic_error(
                "LogisticRegressionClassifier: class count unknown before "
                "fit");
        }
        return class_count_;
    }

    bool fitted() const override { return fitted_; }

    void fit(const Matrix& features, const std::vector<int>& labels) override {
        if (features.rows == 0) {
            throw std::invalid_argument("logistic fit: empty dataset");
        }
        if (features.rows != labels.size()) {
            throw std::invalid_argument(detail::cat(
                "logistic fit: ", features.rows, " feature rows vs ",
                labels.size(), " labels"));
        }
        class_count_ = detail::resolve_class_count(
            labels, options_.class_count, "logistic fit");
        weights_ = Matrix(static_cast<std::size_t>(class_count_),
                          features.cols);
        biases_.assign(static_cast<std::size_t>(class_count_), 0.0);
        loss_trace_.clear();
        Matrix grad_w(weights_.rows, weights_.cols);
        std::vector<double> grad_b(biases_.size());
        for (long epoch = 1; epoch <= options_.epochs; ++epoch) {
            const double loss =
                loss_and_gradient(features, labels, &grad_w, &grad_b);
            if (!std::isfinite(loss)) {
                throw std::runtime_error(detail::cat(
                    "logistic fit: non-finite loss at epoch ", epoch));
            }
            for (std::size_t i = 0; i < weights_.data.size(); ++i) {
                weights_.data[i] -= options_.learning_rate * grad_w.data[i];
            }
            for (std::size_t i = 0; i < biases_.size(); ++i) {
                biases_[i] -= options_.learning_rate * grad_b[i];
            }
            loss_trace_.push_back(loss);
        }
        fitted_ = true;
    }

    std::vector<ProbVector> predict_proba(
        const Matrix& features) const override {
        require_fitted("predict_proba");
        return proba_from_params(features);
    }

    // Mean cross-entropy of the current parameters; fills the gradient
    // outputs when non-null.  Public so tests can difference it directly.
    double loss_and_gradient(const Matrix& features,
                             const std::vector<int>& labels,
                             Matrix* grad_weights,
                             std::vector<double>* grad_biases) const {
        if (weights_.data.empty()) {
            throw std::logic_error(
                "logistic loss_and_gradient: parameters not allocated (fit "
                "first)");
        }
        if (grad_weights != nullptr) {
            grad_weights->data.assign(weights_.data.size(), 0.0);
            grad_weights->rows = weights_.rows;
            grad_weights->cols = weights_.cols;
        }
        if (grad_biases != nullptr) {
            grad_biases->assign(biases_.size(), 0.0);
        }
        const auto n = static_cast<double>(features.rows);
        double total_loss = 0.0;
        std::vector<double> logits(biases_.size());
        for (std::size_t i = 0; i < features.rows; ++i) {
            const auto row = features.row(i);
            logits_for_row(row, logits);
            const ProbVector probs = detail::softmax_from_logits(logits);
            const auto y = static_cast<std::size_t>(labels[i]);
            total_loss +=
                detail::log_sum_exp(logits) - logits[y];
            if (grad_weights == nullptr && grad_biases == nullptr) continue;
            for (std::size_t k = 0; k < probs.size(); ++k) {
                const double delta =
                    (probs[k] - (k == y ? 1.0 : 0.0)) / n;
                if (grad_biases != nullptr) (*grad_biases)[k] += delta;
                if (grad_weights != nullptr) {
                    for (std::size_t j = 0; j < features.cols; ++j) {
                        (*grad_weights)(k, j) += delta * row[j];
                    }
                }
            }
        }
        return total_loss / n;
    }

    // Allocates zero parameters for the given shape without training, so
    // loss_and_gradient can be probed on a virgin model.
    void allocate(std::size_t feature_dim, int classes) {
        if (classes < 2) {
            throw std::invalid_argument(
                "logistic allocate: need at least 2 classes");
        }
        class_count_ = classes;
        weights_ = Matrix(static_cast<std::size_t>(classes), feature_dim);
        biases_.assign(static_cast<std::size_t>(classes), 0.0);
    }

    Matrix& weights() { return weights_; }
    const Matrix& weights() const { return weights_; }
    std::vector<double>& biases() { return biases_; }
    const std::vector<double>& biases() const { return biases_; }
    const std::vector<double>& loss_trace() const { return loss_trace_; }
    const LogisticRegressionOptions& options() const { return options_; }

private:
    void logits_for_row(std::span<const double> row,
                        std::vector<double>& logits) const {
        for (std::size_t k = 0; k < logits.size(); ++k) {
            double z = biases_[k];
            for (std::size_t j = 0; j < row.size(); ++j) {
                z += weights_(k, j) * row[j];
            }
            logits[k] = z;
        }
    }

    std::vector<ProbVector> proba_from_params(const Matrix& features) const {
        std::vector<ProbVector> out;
        out.reserve(features.rows);
        std::vector<double> logits(biases_.size());
        for (std::size_t i = 0; i < features.rows; ++i) {
            logits_for_row(features.row(i), logits);
            out.push_back(detail::softmax_from_logits(logits));
        }
        return out;
    }

    LogisticRegressionOptions options_;
    int class_count_ = -1;
    bool fitted_ = false;
    Matrix weights_;
    std::vector<double> biases_;
    std::vector<double> loss_trace_;
};

// Probability-averaging ensemble.  Predictions are the arithmetic mean of
// the members' probability vectors, accumulated in ascending member index
// so the result is bit-exact regardless of how the ensemble was assembled.
class EnsembleClassifier final : public Classifier {
public:
    explicit EnsembleClassifier(
        std::vector<std::shared_ptr<Classifier>> members)
        : members_(std::move(members)) {
        if (members_.empty()) {
            throw std::invalid_argument(
                "EnsembleClassifier: need at least 1 member");
        }
        for (std::size_t i = 0; i < members_.size(); ++i) {
            if (members_[i] == nullptr) {
                throw std::invalid_argument(
                    detail::cat("EnsembleClassifier: member ", i, " is null"));
            }
        }
    }

    std::string kind() const override { return "ensemble"; }

    int class_count() const override { return members_.front()->class_count(); }

    bool fitted() const override {
        return std::all_of(members_.begin(), members_.end(),
                           [](const auto& m) { return m->fitted(); });
    }

    void fit(const Matrix& features, const std::vector<int>& labels) override {
        for (auto& member : members_) member->fit(features, labels);
        require_consistent_classes();
    }

    std::vector<ProbVector> predict_proba(
        const Matrix& features) const override {
        for (std::size_t i = 0; i < members_.size(); ++i) {
            if (!members_[i]->fitted()) {
                throw std::logic_error(detail::cat(
                    "ensemble predict_proba: member ", i, " (",
                    members_[i]->kind(), ") is not fitted"));
            }
        }
        require_consistent_classes();
        return mean_proba(features, /*initial=*/false);
    }

    std::vector<ProbVector> initial_proba(
        const Matrix& features) const override {
        return mean_proba(features, /*initial=*/true);
    }

    const std::vector<std::shared_ptr<Classifier>>& members() const {
        return members_;
    }

private:
    void require_consistent_classes() const {
        const int c = members_.front()->class_count();
        for (std::size_t i = 1; i < members_.size(); ++i) {
            if (members_[i]->class_count() != c) {
                throw std::logic_error(detail::cat(
                    "ensemble: member 0 has ", c, " classes but member ", i,
                    " has ", members_[i]->class_count()));
            }
        }
    }

    std::vector<ProbVector> mean_proba(const Matrix& features,
                                       bool initial) const {
        std::vector<std::vector<ProbVector>> all;
        all.reserve(members_.size());
        for (const auto& member : members_) {
            all.push_back(initial ? member->initial_proba(features)
                                  : member->predict_proba(features));
        }
        const double scale = 1.0 / static_cast<double>(members_.size());
        std::vector<ProbVector> out = std::move(all.front());
        for (std::size_t m = 1; m < all.size(); ++m) {
            for (std::size_t i = 0; i < out.size(); ++i) {
                for (std::size_t k = 0; k < out[i].size(); ++k) {
                    out[i][k] += all[m][i][k];
                }
            }
        }
        for (auto& row : out) {
            for (double& v : row) v *= scale;
        }
        return out;
    }

    std::vector<std::shared_ptr<Classifier>> members_;
};

}  // namespace pwln
