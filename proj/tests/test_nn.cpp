// Copyright 2026 The pwln-interp Authors
// SPDX-License-Identifier: Apache-2.0

#include "pwln/nn.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <random>
#include <vector>

#include "catch2/catch_amalgamated.hpp"
#include "pwln/classifier.hpp"

namespace {

using pwln::Matrix;
using pwln::MlpModel;
using pwln::PwlnArchitecture;
using pwln::TrainConfig;

PwlnArchitecture arch(int n0, std::vector<int> widths, int c = 2) {
    return PwlnArchitecture{n0, std::move(widths), c};
}

bool models_identical(const MlpModel& a, const MlpModel& b) {
    if (a.architecture != b.architecture || a.rng_seed != b.rng_seed) {
        return false;
    }
    return a.weights == b.weights && a.biases == b.biases;
}

// Two well-separated 2-D clusters, balanced labels; local so this file
// does not depend on the dataset module.
void two_blobs(int n, std::uint64_t seed, Matrix& features,
               std::vector<int>& labels) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.4);
    features = Matrix(static_cast<std::size_t>(n), 2);
    labels.assign(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        const int label = i % 2;
        const double cx = label == 0 ? -2.0 : 2.0;
        const double cy = label == 0 ? -1.0 : 1.0;
        features(static_cast<std::size_t>(i), 0) = cx + noise(rng);
        features(static_cast<std::size_t>(i), 1) = cy + noise(rng);
        labels[static_cast<std::size_t>(i)] = label;
    }
}

double train_accuracy(const MlpModel& model, const Matrix& features,
                      const std::vector<int>& labels) {
    int hits = 0;
    for (std::size_t i = 0; i < features.rows; ++i) {
        const auto probs = pwln::forward_proba(model, features.row(i));
        if (pwln::argmax_index(probs) == labels[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(features.rows);
}

// Random net with unit-scale parameters.  Backprop must be exact for any
// parameter values, and O(1) weights keep hidden pre-activations far from
// the ReLU kinks where central differences are meaningless.
MlpModel unit_scale_net(const PwlnArchitecture& a, std::uint64_t seed) {
    MlpModel m = pwln::init_truncated_normal(a, seed);
    std::mt19937_64 rng(seed * 31 + 7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (Matrix& w : m.weights) {
        for (double& v : w.data) v = dist(rng);
    }
    for (auto& b : m.biases) {
        for (double& v : b) v = dist(rng);
    }
    return m;
}

// Draws inputs until every hidden pre-activation clears `margin`, so the
// finite-difference probes stay on one linear piece.
std::vector<double> kink_free_input(const MlpModel& model,
                                    std::mt19937_64& rng, double margin) {
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    std::vector<double> x(
        static_cast<std::size_t>(model.architecture.input_dim));
    for (int attempt = 0; attempt < 1000; ++attempt) {
        for (double& v : x) v = coord(rng);
        const auto trace = pwln::detail::forward_trace(model, x);
        double min_abs = std::numeric_limits<double>::infinity();
        for (std::size_t l = 0; l + 1 < trace.preact.size(); ++l) {
            for (double z : trace.preact[l]) {
                min_abs = std::min(min_abs, std::abs(z));
            }
        }
        if (min_abs > margin) return x;
    }
    FAIL("no kink-free input found");
    return x;
}

TEST_CASE("truncated-normal init is deterministic and bounded", "[nn]") {
    const auto a = arch(3, {5, 4}, 3);
    const MlpModel m1 = pwln::init_truncated_normal(a, 42);
    const MlpModel m2 = pwln::init_truncated_normal(a, 42);
    CHECK(models_identical(m1, m2));

    const MlpModel m3 = pwln::init_truncated_normal(a, 43);
    CHECK(!models_identical(m1, m3));

    for (const Matrix& w : m1.weights) {
        for (double v : w.data) {
            CHECK(std::abs(v) <= 0.1);
        }
    }
    for (const auto& b : m1.biases) {
        for (double v : b) CHECK(v == 0.0);
    }

    const MlpModel ones = pwln::init_truncated_normal(a, 42, 1.0);
    for (const auto& b : ones.biases) {
        for (double v : b) CHECK(v == 1.0);
    }
    CHECK(ones.weights == m1.weights);
}

TEST_CASE("forward produces valid distributions", "[nn]") {
    const auto a = arch(4, {6, 5}, 3);
    MlpModel zero = pwln::init_truncated_normal(a, 1);
    for (Matrix& w : zero.weights) {
        std::fill(w.data.begin(), w.data.end(), 0.0);
    }
    const std::vector<double> x{0.3, -0.2, 0.9, 0.1};
    const auto uniform = pwln::forward(zero, x);
    for (double p : uniform.probabilities) {
        CHECK(p == Catch::Approx(1.0 / 3.0).margin(1e-12));
    }
    CHECK(uniform.activation_pattern ==
          std::vector<std::uint8_t>(11, 0));

    const MlpModel model = pwln::init_truncated_normal(a, 7);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> input(4);
        for (double& v : input) v = dist(rng);
        const auto result = pwln::forward(model, input);
        CHECK(pwln::is_valid_prob_vector(result.probabilities));
        CHECK(result.activation_pattern.size() == 11);

        // argmax of probabilities equals argmax of logits.
        const auto trace = pwln::detail::forward_trace(model, input);
        CHECK(pwln::argmax_index(result.probabilities) ==
              pwln::argmax_index(trace.preact.back()));
    }

    CHECK_THROWS_AS(pwln::forward(model, std::vector<double>{1.0, 2.0}),
                    std::invalid_argument);
}

TEST_CASE("scaling the class head preserves the argmax", "[nn]") {
    const MlpModel model = pwln::init_truncated_normal(arch(3, {6}, 4), 11);
    MlpModel scaled = model;
    for (double& v : scaled.weights.back().data) v *= 2.0;
    for (double& v : scaled.biases.back()) v *= 2.0;

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    bool any_prob_changed = false;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(3);
        for (double& v : x) v = dist(rng);
        const auto p1 = pwln::forward_proba(model, x);
        const auto p2 = pwln::forward_proba(scaled, x);
        CHECK(pwln::argmax_index(p1) == pwln::argmax_index(p2));
        if (std::abs(p1[0] - p2[0]) > 1e-9) any_prob_changed = true;
    }
    CHECK(any_prob_changed);
}

TEST_CASE("optimizer single-step updates", "[nn]") {
    // Adam's bias-corrected first step: -lr * g / (|g| + eps).
    double m = 0.0, v = 0.0;
    const double update = pwln::detail::adam_update(0.3, m, v, 1, 0.01);
    CHECK(update ==
          Catch::Approx(-0.01 * 0.3 / (0.3 + 1e-8)).epsilon(1e-12));
    CHECK(std::abs(update) == Catch::Approx(0.01).epsilon(1e-6));

    // Negative gradient moves the parameter up by the same magnitude.
    double m2 = 0.0, v2 = 0.0;
    CHECK(pwln::detail::adam_update(-0.3, m2, v2, 1, 0.01) ==
          Catch::Approx(0.01 * 0.3 / (0.3 + 1e-8)).epsilon(1e-12));

    // RMSProp first step: -lr * g / (sqrt(0.1 g^2) + eps).
    double r = 0.0;
    const double rms = pwln::detail::rmsprop_update(0.5, r, 0.01);
    CHECK(rms == Catch::Approx(-0.01 * 0.5 /
                               (std::sqrt(0.1 * 0.25) + 1e-8))
                     .epsilon(1e-12));
}

TEST_CASE("training is deterministic and learns separable blobs", "[nn]") {
    Matrix features;
    std::vector<int> labels;
    two_blobs(400, 2026, features, labels);

    TrainConfig cfg;
    cfg.optimizer = pwln::Optimizer::adam;
    cfg.learning_rate = 0.01;
    cfg.batch_size = 32;
    cfg.epochs = 20;

    const MlpModel init = pwln::init_truncated_normal(arch(2, {8}, 2), 3);
    const auto r1 = pwln::train(init, features, pwln::TrainTargets::hard(labels), cfg);
    const auto r2 = pwln::train(init, features, pwln::TrainTargets::hard(labels), cfg);
    CHECK(models_identical(r1.model, r2.model));
    CHECK(r1.loss_trace == r2.loss_trace);

    REQUIRE(r1.loss_trace.size() == 20);
    for (double loss : r1.loss_trace) CHECK(std::isfinite(loss));
    CHECK(r1.loss_trace.back() < r1.loss_trace.front());
    CHECK(train_accuracy(r1.model, features, labels) >= 0.99);
}

TEST_CASE("all three optimizers reduce the loss", "[nn]") {
    Matrix features;
    std::vector<int> labels;
    two_blobs(300, 77, features, labels);
    for (auto opt : {pwln::Optimizer::sgd, pwln::Optimizer::rmsprop,
                     pwln::Optimizer::adam}) {
        TrainConfig cfg;
        cfg.optimizer = opt;
        cfg.learning_rate = opt == pwln::Optimizer::sgd ? 0.05 : 0.005;
        cfg.batch_size = 16;
        cfg.epochs = 10;
        const auto result =
            pwln::train(pwln::init_truncated_normal(arch(2, {6}, 2), 4),
                        features, pwln::TrainTargets::hard(labels), cfg);
        INFO(pwln::optimizer_name(opt));
        CHECK(result.loss_trace.back() < result.loss_trace.front());
    }
}

TEST_CASE("soft targets equal to own outputs give zero gradients", "[nn]") {
    const MlpModel model = pwln::init_truncated_normal(arch(3, {5}, 4), 9);
    const std::vector<double> x{0.4, -1.0, 0.7};
    const auto probs = pwln::forward_proba(model, x);

    pwln::detail::Gradients grads(model);
    pwln::detail::SampleTarget target;
    target.soft = probs.data();
    pwln::detail::backprop_sample(model, x, target, grads);

    double norm_sq = 0.0;
    for (const Matrix& g : grads.weights) {
        for (double v : g.data) norm_sq += v * v;
    }
    for (const auto& g : grads.biases) {
        for (double v : g) norm_sq += v * v;
    }
    CHECK(std::sqrt(norm_sq) < 1e-6);

    // Central differences around the minimum agree in absolute terms.
    MlpModel probe = model;
    double max_abs_error = 0.0;
    for (std::size_t l = 0; l < probe.weights.size(); ++l) {
        for (std::size_t i = 0; i < probe.weights[l].data.size(); ++i) {
            double& param = probe.weights[l].data[i];
            const double saved = param;
            param = saved + 1e-4;
            const double plus = pwln::detail::sample_loss(probe, x, target);
            param = saved - 1e-4;
            const double minus = pwln::detail::sample_loss(probe, x, target);
            param = saved;
            const double numeric = (plus - minus) / 2e-4;
            max_abs_error = std::max(
                max_abs_error,
                std::abs(grads.weights[l].data[i] - numeric));
        }
    }
    CHECK(max_abs_error < 1e-7);
}

TEST_CASE("gradient check passes on random small nets", "[nn]") {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<int> width(1, 8);
    std::uniform_int_distribution<int> classes(2, 5);
    for (int trial = 0; trial < 20; ++trial) {
        const int n0 = width(rng) % 4 + 1;
        std::vector<int> widths{width(rng)};
        if (trial % 2 == 0) widths.push_back(width(rng));
        const int c = classes(rng);
        const MlpModel model = unit_scale_net(arch(n0, widths, c), rng());
        const std::vector<double> x = kink_free_input(model, rng, 1e-3);
        const int label = static_cast<int>(rng() % static_cast<unsigned>(c));
        CHECK(pwln::gradient_check(model, x, label, 1e-5) < 1e-4);
    }
}

TEST_CASE("gradient check h sensitivity and domain", "[nn]") {
    // Frozen configuration measured once: h = 1e-4 and h = 1e-5 give
    // relative errors 1.30e-9 and 1.38e-9, i.e. within one order of
    // magnitude of each other and far below the acceptance gate.
    const MlpModel model = unit_scale_net(arch(2, {4, 3}, 3), 1);
    std::mt19937_64 rng(1 * 7919);
    const std::vector<double> x = kink_free_input(model, rng, 1e-2);
    const double err_coarse = pwln::gradient_check(model, x, 1, 1e-4);
    const double err_fine = pwln::gradient_check(model, x, 1, 1e-5);
    CHECK(err_coarse < 1e-4);
    CHECK(err_fine < 1e-4);
    const double ratio = err_coarse / std::max(err_fine, 1e-30);
    CHECK(ratio >= 0.1);
    CHECK(ratio <= 10.0);

    CHECK_THROWS_AS(pwln::gradient_check(model, x, 1, 1e-7),
                    std::invalid_argument);
    CHECK_THROWS_AS(pwln::gradient_check(model, x, 1, 1e-2),
                    std::invalid_argument);

    // Soft-target overload agrees with the finite-difference oracle too.
    const std::vector<double> soft{0.2, 0.5, 0.3};
    CHECK(pwln::gradient_check(model, x, soft, 1e-5) < 1e-4);
}

TEST_CASE("train validates inputs and aborts on divergence", "[nn]") {
    Matrix features(4, 2);
    std::vector<int> labels{0, 1, 0, 1};
    const MlpModel model = pwln::init_truncated_normal(arch(2, {3}, 2), 1);

    TrainConfig bad = TrainConfig{};
    bad.epochs = 0;
    CHECK_THROWS_AS(
        pwln::train(model, features, pwln::TrainTargets::hard(labels), bad),
        std::invalid_argument);

    TrainConfig cfg;
    CHECK_THROWS_AS(pwln::train(model, features,
                                pwln::TrainTargets::hard({0, 1, 2, 0}), cfg),
                    std::invalid_argument);
    CHECK_THROWS_AS(pwln::train(model, features,
                                pwln::TrainTargets::hard({0, 1}), cfg),
                    std::invalid_argument);

    // Hand-built net: positive first layer, zero output layer.  Feeding it
    // an infinite feature drives a hidden activation to +inf, and
    // 0 * inf = NaN reaches the logits, so the first batch loss is
    // non-finite and the abort names the epoch and batch.
    MlpModel overflow = pwln::init_truncated_normal(arch(2, {2}, 2), 8);
    for (double& v : overflow.weights[0].data) v = 0.05;
    for (double& v : overflow.weights[1].data) v = 0.0;
    Matrix big(1, 2);
    big(0, 0) = std::numeric_limits<double>::infinity();
    std::vector<int> one_label{0};
    TrainConfig diverge;
    diverge.optimizer = pwln::Optimizer::sgd;
    diverge.learning_rate = 1e308;
    diverge.batch_size = 1;
    diverge.epochs = 1;
    CHECK_THROWS_MATCHES(
        pwln::train(overflow, big, pwln::TrainTargets::hard(one_label),
                    diverge),
        std::runtime_error,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring(
            "non-finite loss at epoch 1 batch 1")));

    // A pathological learning rate overflows the parameters on the very
    // first step: the same net on a large finite input produces a gradient
    // of magnitude 25, and 1e308 * 25 is not representable.
    big(0, 0) = 1000.0;
    CHECK_THROWS_MATCHES(
        pwln::train(overflow, big, pwln::TrainTargets::hard(one_label),
                    diverge),
        std::runtime_error,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring(
            "non-finite parameter at epoch 1 batch 1")));
}

TEST_CASE("model JSON round-trips value-exactly", "[nn]") {
    MlpModel model = pwln::init_truncated_normal(arch(3, {4, 2}, 3), 1234);
    model.weights[0](0, 0) = 1e-300;
    model.weights[0](0, 1) = 3.141592653589793;
    model.weights[1](1, 1) = -2.2250738585072014e-308;
    model.biases[2][2] = 0.1;

    const nlohmann::json j = pwln::mlp_to_json(model);
    const MlpModel back = pwln::mlp_from_json(j);
    CHECK(models_identical(model, back));

    // Through a file as well.
    const auto path = std::filesystem::temp_directory_path() /
                      "pwln_model_roundtrip.json";
    pwln::save_mlp(model, path.string());
    const MlpModel loaded = pwln::load_mlp(path.string());
    CHECK(models_identical(model, loaded));
    std::filesystem::remove(path);

    nlohmann::json missing = j;
    missing.erase("biases");
    CHECK_THROWS_AS(pwln::mlp_from_json(missing), std::invalid_argument);

    nlohmann::json bad_shape = j;
    bad_shape["weights"][0].push_back(0.5);
    CHECK_THROWS_AS(pwln::mlp_from_json(bad_shape), std::invalid_argument);

    CHECK_THROWS_AS(pwln::load_mlp("/nonexistent/model.json"),
                    std::runtime_error);
}

TEST_CASE("MlpClassifier adapter semantics", "[nn]") {
    Matrix features;
    std::vector<int> labels;
    two_blobs(200, 31, features, labels);

    TrainConfig cfg;
    cfg.learning_rate = 0.01;
    cfg.epochs = 15;
    pwln::MlpClassifier clf(pwln::init_truncated_normal(arch(2, {8}, 2), 6),
                            cfg);
    CHECK(!clf.fitted());
    CHECK_THROWS_AS(clf.predict_proba(features), std::logic_error);

    // Initial probabilities come from the initial parameters and are
    // available before fitting.
    const auto initial = clf.initial_proba(features);
    REQUIRE(initial.size() == features.rows);
    CHECK(pwln::is_valid_prob_vector(initial[0]));

    clf.fit(features, labels);
    CHECK(clf.fitted());
    const auto probs = clf.predict_proba(features);
    int hits = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (pwln::argmax_index(probs[i]) == labels[i]) ++hits;
    }
    CHECK(static_cast<double>(hits) / static_cast<double>(probs.size()) >=
          0.99);
    // The stored initial state is unchanged by fitting.
    CHECK(clf.initial_proba(features) == initial);

    // Zero-epoch classifier: fitting is a no-op on the parameters.
    TrainConfig zero = cfg;
    zero.epochs = 0;
    pwln::MlpClassifier control(
        pwln::init_truncated_normal(arch(2, {8}, 2), 6), zero);
    control.fit(features, labels);
    CHECK(control.fitted());
    CHECK(models_identical(control.model(), control.initial_model()));
    CHECK(control.predict_proba(features) ==
          control.initial_proba(features));

    // Pretrained wrapper is fitted from the start.
    const auto pre = pwln::MlpClassifier::pretrained(clf.model());
    CHECK(pre.fitted());
    CHECK(pre.predict_proba(features) == clf.predict_proba(features));

    // Soft-target fitting runs and stays fitted.
    pwln::MlpClassifier soft_clf(
        pwln::init_truncated_normal(arch(2, {4}, 2), 10), cfg);
    std::vector<pwln::ProbVector> soft(features.rows, {0.5, 0.5});
    soft_clf.fit_soft(features, soft);
    CHECK(soft_clf.fitted());
}

}  // namespace
