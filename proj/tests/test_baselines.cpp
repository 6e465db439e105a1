// Copyright 2026 The pwln-interp Authors
// SPDX-License-Identifier: Apache-2.0

#include "pwln/baselines.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "catch2/catch_amalgamated.hpp"

namespace {

using pwln::DecisionTreeClassifier;
using pwln::DecisionTreeOptions;
using pwln::EnsembleClassifier;
using pwln::LogisticRegressionClassifier;
using pwln::LogisticRegressionOptions;
using pwln::Matrix;
using pwln::ProbVector;

// Well-separated Gaussian clusters, one per class, balanced labels.
void class_blobs(int n, int classes, std::uint64_t seed, Matrix& features,
                 std::vector<int>& labels) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.3);
    features = Matrix(static_cast<std::size_t>(n), 2);
    labels.assign(static_cast<std::size_t>(n), 0);
    const double tau = 2.0 * std::acos(-1.0);
    for (int i = 0; i < n; ++i) {
        const int label = i % classes;
        const double angle = tau * label / classes;
        features(static_cast<std::size_t>(i), 0) =
            3.0 * std::cos(angle) + noise(rng);
        features(static_cast<std::size_t>(i), 1) =
            3.0 * std::sin(angle) + noise(rng);
        labels[static_cast<std::size_t>(i)] = label;
    }
}

double accuracy(const pwln::Classifier& model, const Matrix& features,
                const std::vector<int>& labels) {
    const auto probs = model.predict_proba(features);
    int hits = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (pwln::argmax_index(probs[i]) == labels[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(probs.size());
}

}  // namespace

TEST_CASE("gini impurity matches hand values", "[baselines]") {
    CHECK(pwln::gini_impurity({50, 50}) == 0.5);
    CHECK(pwln::gini_impurity({100, 0}) == 0.0);
    CHECK(pwln::gini_impurity({2, 1, 1}) == 0.625);

    // Range: [0, 1 - 1/c] with the maximum at the uniform histogram.
    CHECK(pwln::gini_impurity({7, 7, 7, 7}) == Catch::Approx(0.75));
    CHECK_THROWS_AS(pwln::gini_impurity({0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(pwln::gini_impurity({3, -1}), std::invalid_argument);
}

TEST_CASE("tree handles pure and constant datasets", "[baselines]") {
    Matrix features(5, 2);
    for (std::size_t i = 0; i < 5; ++i) {
        features(i, 0) = static_cast<double>(i);
        features(i, 1) = -static_cast<double>(i);
    }

    // Pure labels: a single leaf putting probability 1 on the class.
    DecisionTreeClassifier pure{DecisionTreeOptions{.class_count = 3}};
    pure.fit(features, {2, 2, 2, 2, 2});
    CHECK(pure.node_count() == 1);
    for (const ProbVector& p : pure.predict_proba(features)) {
        CHECK(p == ProbVector{0.0, 0.0, 1.0});
    }

    // Constant features admit no threshold: single leaf with empirical
    // class frequencies.
    Matrix constant(4, 2);
    for (double& v : constant.data) v = 7.0;
    DecisionTreeClassifier tree{DecisionTreeOptions{.min_samples_leaf = 1}};
    tree.fit(constant, {0, 0, 0, 1});
    CHECK(tree.node_count() == 1);
    const auto probs = tree.predict_proba(constant);
    CHECK(probs[0] == ProbVector{0.75, 0.25});
}

TEST_CASE("tree solves 2D XOR at depth 2", "[baselines]") {
    Matrix features(4, 2);
    features(0, 0) = 0.0; features(0, 1) = 0.0;
    features(1, 0) = 1.0; features(1, 1) = 1.0;
    features(2, 0) = 0.0; features(2, 1) = 1.0;
    features(3, 0) = 1.0; features(3, 1) = 0.0;
    const std::vector<int> labels{0, 0, 1, 1};

    DecisionTreeClassifier tree{
        DecisionTreeOptions{.max_depth = 2, .min_samples_leaf = 1}};
    tree.fit(features, labels);
    CHECK(accuracy(tree, features, labels) == 1.0);
}

TEST_CASE("tree accuracy is non-decreasing in max_depth", "[baselines]") {
    Matrix features;
    std::vector<int> labels;
    class_blobs(200, 4, 99, features, labels);
    // Sprinkle label noise so shallow trees genuinely underfit.
    for (std::size_t i = 0; i < labels.size(); i += 17) {
        labels[i] = (labels[i] + 1) % 4;
    }

    double previous = -1.0;
    for (int depth = 1; depth <= 10; ++depth) {
        DecisionTreeClassifier tree{DecisionTreeOptions{
            .max_depth = depth, .min_samples_leaf = 1}};
        tree.fit(features, labels);
        const double acc = accuracy(tree, features, labels);
        CHECK(acc >= previous);
        previous = acc;
    }
    CHECK(previous > 0.9);
}

TEST_CASE("tree validates inputs and reports state", "[baselines]") {
    CHECK_THROWS_AS(DecisionTreeClassifier{DecisionTreeOptions{.max_depth = 0}},
                    std::invalid_argument);
    CHECK_THROWS_AS(
        DecisionTreeClassifier{DecisionTreeOptions{.class_count = 1}},
        std::invalid_argument);

    DecisionTreeClassifier tree;
    CHECK(tree.kind() == "tree");
    CHECK(!tree.fitted());
    CHECK(!tree.supports_soft_targets());
    Matrix features(2, 1);
    CHECK_THROWS_AS(tree.predict_proba(features), std::logic_error);
    CHECK_THROWS_AS(tree.class_count(), std::logic_error);
    CHECK_THROWS_AS(tree.fit(Matrix(0, 2), {}), std::invalid_argument);
    CHECK_THROWS_AS(tree.fit(features, {0}), std::invalid_argument);
    CHECK_THROWS_AS(tree.fit(features, {0, 0}),  // one inferred class
                    std::invalid_argument);
    CHECK_THROWS_AS(tree.fit_soft(features, {}), std::logic_error);

    // Declared class count caps the labels and pads the distributions.
    DecisionTreeClassifier wide{DecisionTreeOptions{.class_count = 4}};
    features(0, 0) = 0.0;
    features(1, 0) = 1.0;
    wide.fit(features, {0, 1});
    CHECK(wide.class_count() == 4);
    const auto probs = wide.predict_proba(features);
    CHECK(probs[0].size() == 4);
    CHECK(pwln::is_valid_prob_vector(probs[0]));

    DecisionTreeClassifier narrow{DecisionTreeOptions{.class_count = 2}};
    CHECK_THROWS_AS(narrow.fit(features, {0, 3}), std::invalid_argument);
}

TEST_CASE("tree initial probabilities are uniform", "[baselines]") {
    Matrix features(3, 2);
    DecisionTreeClassifier tree{DecisionTreeOptions{.class_count = 4}};
    const auto initial = tree.initial_proba(features);
    REQUIRE(initial.size() == 3);
    for (const ProbVector& p : initial) {
        CHECK(p == ProbVector{0.25, 0.25, 0.25, 0.25});
    }

    DecisionTreeClassifier unknown;
    CHECK_THROWS_AS(unknown.initial_proba(features), std::logic_error);
}

TEST_CASE("logistic regression separates blobs deterministically",
          "[baselines]") {
    Matrix features;
    std::vector<int> labels;
    class_blobs(300, 3, 7, features, labels);

    LogisticRegressionClassifier model{
        LogisticRegressionOptions{.learning_rate = 0.5, .epochs = 300}};
    model.fit(features, labels);
    CHECK(model.class_count() == 3);
    CHECK(accuracy(model, features, labels) >= 0.99);
    REQUIRE(model.loss_trace().size() == 300);
    CHECK(model.loss_trace().back() < model.loss_trace().front());

    // Bitwise determinism: zero init + fixed sweep order.
    LogisticRegressionClassifier again{
        LogisticRegressionOptions{.learning_rate = 0.5, .epochs = 300}};
    again.fit(features, labels);
    CHECK(model.weights().data == again.weights().data);
    CHECK(model.biases() == again.biases());

    for (const ProbVector& p : model.predict_proba(features)) {
        CHECK(pwln::is_valid_prob_vector(p));
    }
}

TEST_CASE("logistic zero weights emit uniform probabilities", "[baselines]") {
    LogisticRegressionClassifier model;
    model.allocate(3, 4);
    Matrix features(2, 3);
    features(0, 0) = 5.0;
    features(1, 2) = -3.0;
    // Pre-fit state is reachable via initial_proba (uniform by definition)
    // and loss_and_gradient (uniform probabilities => loss log(c)).
    const auto initial = model.initial_proba(features);
    CHECK(initial[0] == ProbVector{0.25, 0.25, 0.25, 0.25});
    const double loss =
        model.loss_and_gradient(features, {1, 3}, nullptr, nullptr);
    CHECK(loss == Catch::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("logistic gradient matches finite differences", "[baselines]") {
    Matrix features;
    std::vector<int> labels;
    class_blobs(40, 3, 21, features, labels);

    LogisticRegressionClassifier model{
        LogisticRegressionOptions{.learning_rate = 0.2, .epochs = 25}};
    model.fit(features, labels);  // gradient probed away from zero

    Matrix grad_w(0, 0);
    std::vector<double> grad_b;
    model.loss_and_gradient(features, labels, &grad_w, &grad_b);

    const double h = 1e-5;
    double max_rel = 0.0;
    auto probe = [&](double& param, double analytic) {
        const double saved = param;
        param = saved + h;
        const double plus =
            model.loss_and_gradient(features, labels, nullptr, nullptr);
        param = saved - h;
        const double minus =
            model.loss_and_gradient(features, labels, nullptr, nullptr);
        param = saved;
        const double numeric = (plus - minus) / (2.0 * h);
        const double denom =
            std::max({std::abs(analytic), std::abs(numeric), 1e-8});
        max_rel = std::max(max_rel, std::abs(analytic - numeric) / denom);
    };
    for (std::size_t i = 0; i < model.weights().data.size(); ++i) {
        probe(model.weights().data[i], grad_w.data[i]);
    }
    for (std::size_t i = 0; i < model.biases().size(); ++i) {
        probe(model.biases()[i], grad_b[i]);
    }
    CHECK(max_rel < 1e-4);
}

TEST_CASE("logistic validates options and inputs", "[baselines]") {
    CHECK_THROWS_AS(LogisticRegressionClassifier{LogisticRegressionOptions{
                        .learning_rate = 0.0}},
                    std::invalid_argument);
    CHECK_THROWS_AS(
        LogisticRegressionClassifier{LogisticRegressionOptions{.epochs = 0}},
        std::invalid_argument);

    LogisticRegressionClassifier model;
    CHECK(model.kind() == "logistic");
    CHECK(!model.fitted());
    Matrix features(2, 2);
    CHECK_THROWS_AS(model.predict_proba(features), std::logic_error);
    CHECK_THROWS_AS(model.fit(Matrix(0, 2), {}), std::invalid_argument);
    CHECK_THROWS_AS(
        model.loss_and_gradient(features, {0, 1}, nullptr, nullptr),
        std::logic_error);

    // Exploding parameters surface as a named non-finite-loss abort.
    Matrix big(2, 1);
    big(0, 0) = 1e308;
    big(1, 0) = -1e308;
    LogisticRegressionClassifier diverge{
        LogisticRegressionOptions{.learning_rate = 1e300, .epochs = 3}};
    CHECK_THROWS_MATCHES(
        diverge.fit(big, {0, 1}), std::runtime_error,
        Catch::Matchers::MessageMatches(
            Catch::Matchers::ContainsSubstring("non-finite loss at epoch")));
}

TEST_CASE("ensemble averages member probabilities", "[baselines]") {
    Matrix features;
    std::vector<int> labels;
    class_blobs(120, 3, 31, features, labels);

    auto tree = std::make_shared<DecisionTreeClassifier>(
        DecisionTreeOptions{.max_depth = 4, .class_count = 3});
    auto logistic = std::make_shared<LogisticRegressionClassifier>(
        LogisticRegressionOptions{.learning_rate = 0.5,
                                  .epochs = 100,
                                  .class_count = 3});
    auto tree2 = std::make_shared<DecisionTreeClassifier>(
        DecisionTreeOptions{.max_depth = 2, .class_count = 3});

    EnsembleClassifier trio{{tree, logistic, tree2}};
    CHECK(trio.kind() == "ensemble");
    trio.fit(features, labels);
    REQUIRE(trio.fitted());

    // Three-member mean matches the hand average row by row.
    const auto combined = trio.predict_proba(features);
    const auto p0 = tree->predict_proba(features);
    const auto p1 = logistic->predict_proba(features);
    const auto p2 = tree2->predict_proba(features);
    for (std::size_t i = 0; i < combined.size(); ++i) {
        CHECK(pwln::is_valid_prob_vector(combined[i]));
        for (std::size_t k = 0; k < combined[i].size(); ++k) {
            const double hand = (p0[i][k] + p1[i][k] + p2[i][k]) / 3.0;
            CHECK(combined[i][k] == Catch::Approx(hand).margin(1e-12));
        }
    }
}

TEST_CASE("ensemble edge cases", "[baselines]") {
    CHECK_THROWS_AS(EnsembleClassifier{{}}, std::invalid_argument);
    CHECK_THROWS_AS(
        EnsembleClassifier{{std::shared_ptr<pwln::Classifier>{}}},
        std::invalid_argument);

    Matrix features(3, 2);
    features(0, 0) = -1.0;
    features(1, 0) = 0.5;
    features(2, 0) = 2.0;
    const std::vector<int> labels{0, 1, 1};

    // Single-member ensemble is identical to the member.
    auto solo = std::make_shared<DecisionTreeClassifier>(
        DecisionTreeOptions{.min_samples_leaf = 1, .class_count = 2});
    EnsembleClassifier single{{solo}};
    single.fit(features, labels);
    CHECK(single.class_count() == 2);
    CHECK(single.predict_proba(features) == solo->predict_proba(features));

    // Unfitted members are named by index.
    auto fitted = std::make_shared<DecisionTreeClassifier>(
        DecisionTreeOptions{.min_samples_leaf = 1, .class_count = 2});
    fitted->fit(features, labels);
    auto unfitted = std::make_shared<LogisticRegressionClassifier>(
        LogisticRegressionOptions{.class_count = 2});
    EnsembleClassifier partial{{fitted, unfitted}};
    CHECK(!partial.fitted());
    CHECK_THROWS_MATCHES(
        partial.predict_proba(features), std::logic_error,
        Catch::Matchers::MessageMatches(
            Catch::Matchers::ContainsSubstring("member 1")));

    // Opposing one-hot members average to (0.5, 0.5): emulate with two
    // single-leaf trees trained on opposite pure labels.
    auto zeros = std::make_shared<DecisionTreeClassifier>(
        DecisionTreeOptions{.class_count = 2});
    zeros->fit(features, {0, 0, 0});
    auto ones = std::make_shared<DecisionTreeClassifier>(
        DecisionTreeOptions{.class_count = 2});
    ones->fit(features, {1, 1, 1});
    EnsembleClassifier pair{{zeros, ones}};
    for (const ProbVector& p : pair.predict_proba(features)) {
        CHECK(p == ProbVector{0.5, 0.5});
    }
}
