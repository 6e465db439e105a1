// Copyright 2026 The pwln-interp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Minimal feed-forward ReLU network with a softmax class head: explicit
// forward pass, manual backpropagation, SGD/RMSProp/Adam updates, and
// truncated-normal initialization.  Everything is deterministic given the
// model seed; random draws use hand-rolled transforms of mt19937_64 output
// so results do not depend on the standard library's distribution code.

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pwln/architecture.hpp"
#include "pwln/classifier.hpp"
#include "pwln/detail/common.hpp"
#include "pwln/matrix.hpp"

namespace pwln {

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEpsilon = 1e-8;
inline constexpr double kRmsPropDecay = 0.9;
inline constexpr double kRmsPropEpsilon = 1e-8;
inline constexpr double kInitStdDev = 0.05;

enum class Optimizer { sgd, rmsprop, adam };

inline std::string optimizer_name(Optimizer o) {
    switch (o) {
        case Optimizer::sgd: return "sgd";
        case Optimizer::rmsprop: return "rmsprop";
        case Optimizer::adam: return "adam";
    }
    throw std::logic_error("optimizer_name: unknown optimizer");
}

inline Optimizer parse_optimizer(const std::string& name) {
    if (name == "sgd") return Optimizer::sgd;
    if (name == "rmsprop") return Optimizer::rmsprop;
    if (name == "adam") return Optimizer::adam;
    throw std::invalid_argument(detail::cat(
        "parse_optimizer: unknown optimizer \"", name,
        "\" (expected sgd, rmsprop, or adam)"));
}

enum class TargetMode { hard_labels, soft_probabilities };

inline std::string target_mode_name(TargetMode m) {
    return m == TargetMode::hard_labels ? "hard_labels" : "soft_probabilities";
}

inline TargetMode parse_target_mode(const std::string& name) {
    if (name == "hard_labels") return TargetMode::hard_labels;
    if (name == "soft_probabilities") return TargetMode::soft_probabilities;
    throw std::invalid_argument(detail::cat(
        "parse_target_mode: unknown target mode \"", name,
        "\" (expected hard_labels or soft_probabilities)"));
}

struct TrainConfig {
    Optimizer optimizer = Optimizer::adam;
    double learning_rate = 1e-3;
    long batch_size = 32;
    long epochs = 1;
    TargetMode target_mode = TargetMode::hard_labels;

    void validate() const {
        if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
            throw std::invalid_argument(detail::cat(
                "TrainConfig: learning_rate must be positive, got ",
                learning_rate));
        }
        if (batch_size < 1) {
            throw std::invalid_argument(detail::cat(
                "TrainConfig: batch_size must be >= 1, got ", batch_size));
        }
        if (epochs < 1) {
            throw std::invalid_argument(detail::cat(
                "TrainConfig: epochs must be >= 1, got ", epochs));
        }
    }
};

// Fully-connected network parameters.  weights[l] maps layer l-1 (columns)
// to layer l (rows); the last entry is the linear class head n_L -> c.
struct MlpModel {
    PwlnArchitecture architecture;
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
    std::uint64_t rng_seed = 0;

    void validate() const {
        architecture.validate();
        const std::size_t layer_count = architecture.layer_widths.size() + 1;
        if (weights.size() != layer_count || biases.size() != layer_count) {
            throw std::invalid_argument(detail::cat(
                "MlpModel: expected ", layer_count,
                " weight/bias layers, got ", weights.size(), "/",
                biases.size()));
        }
        std::size_t fan_in = static_cast<std::size_t>(architecture.input_dim);
        for (std::size_t l = 0; l < layer_count; ++l) {
            const std::size_t fan_out =
                l < architecture.layer_widths.size()
                    ? static_cast<std::size_t>(architecture.layer_widths[l])
                    : static_cast<std::size_t>(architecture.class_count);
            if (weights[l].rows != fan_out || weights[l].cols != fan_in ||
                biases[l].size() != fan_out) {
                throw std::invalid_argument(detail::cat(
                    "MlpModel: layer ", l, " shapes are inconsistent: weight ",
                    weights[l].rows, "x", weights[l].cols, ", bias ",
                    biases[l].size(), ", expected ", fan_out, "x", fan_in));
            }
            fan_in = fan_out;
        }
    }

    bool parameters_finite() const {
        for (const Matrix& w : weights) {
            for (double v : w.data) {
                if (!std::isfinite(v)) return false;
            }
        }
        for (const auto& b : biases) {
            for (double v : b) {
                if (!std::isfinite(v)) return false;
            }
        }
        return true;
    }
};

namespace detail {

inline constexpr std::uint64_t kShuffleStreamTag = 0x73687566;  // "shuf"

// Uniform draw in (0, 1] built directly from the top 53 bits of the
// generator output; identical on every platform.
inline double uniform_unit(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

// Box-Muller cosine branch.  Hand-rolled: std::normal_distribution is
// implementation-defined and would break cross-platform determinism.
inline double standard_normal(std::mt19937_64& rng) {
    const double u1 = uniform_unit(rng);
    const double u2 = uniform_unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

// Normal(0, std) with redraw outside +/- 2 std.
inline double truncated_normal(std::mt19937_64& rng, double stddev) {
    for (;;) {
        const double z = standard_normal(rng);
        if (std::abs(z) <= 2.0) return z * stddev;
    }
}

// In-place Fisher-Yates with the same modulo indexing everywhere.
inline void shuffle_indices(std::vector<int>& indices, std::mt19937_64& rng) {
    for (std::size_t i = indices.size(); i > 1; --i) {
        const std::size_t j =
            static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(i));
        std::swap(indices[i - 1], indices[j]);
    }
}

}  // namespace detail

// Weights ~ truncated Normal(0, 0.05), biases set to bias_init (0 by
// default; 1 matches the wide-sweep configuration).  Draw order is layer
// by layer, row-major within a layer, so a seed pins every parameter.
inline MlpModel init_truncated_normal(const PwlnArchitecture& arch,
                                      std::uint64_t seed,
                                      double bias_init = 0.0) {
    arch.validate();
    MlpModel model;
    model.architecture = arch;
    model.rng_seed = seed;
    std::mt19937_64 rng(seed);
    std::size_t fan_in = static_cast<std::size_t>(arch.input_dim);
    for (std::size_t l = 0; l <= arch.layer_widths.size(); ++l) {
        const std::size_t fan_out =
            l < arch.layer_widths.size()
                ? static_cast<std::size_t>(arch.layer_widths[l])
                : static_cast<std::size_t>(arch.class_count);
        Matrix w(fan_out, fan_in);
        for (double& v : w.data) {
            v = detail::truncated_normal(rng, kInitStdDev);
        }
        model.weights.push_back(std::move(w));
        model.biases.emplace_back(fan_out, bias_init);
        fan_in = fan_out;
    }
    return model;
}

struct ForwardResult {
    std::vector<double> probabilities;
    // One entry per hidden unit, layer by layer: 1 where the unit's
    // preactivation is strictly positive.
    std::vector<std::uint8_t> activation_pattern;
};

namespace detail {

// Full forward pass keeping per-layer preactivations and activations;
// used by forward(), training, and the loss evaluations.
struct ForwardTrace {
    std::vector<std::vector<double>> preact;       // hidden layers + head
    std::vector<std::vector<double>> activation;   // hidden layers only
};

inline ForwardTrace forward_trace(const MlpModel& model,
                                  std::span<const double> x) {
    if (x.size() !=
        static_cast<std::size_t>(model.architecture.input_dim)) {
        throw std::invalid_argument(detail::cat(
            "forward: input has dimension ", x.size(), ", model expects ",
            model.architecture.input_dim));
    }
    ForwardTrace trace;
    const std::size_t hidden_layers = model.architecture.layer_widths.size();
    trace.preact.resize(hidden_layers + 1);
    trace.activation.resize(hidden_layers);
    std::span<const double> input = x;
    for (std::size_t l = 0; l <= hidden_layers; ++l) {
        const Matrix& w = model.weights[l];
        std::vector<double>& z = trace.preact[l];
        z.assign(w.rows, 0.0);
        for (std::size_t r = 0; r < w.rows; ++r) {
            double acc = model.biases[l][r];
            const double* wr = &w.data[r * w.cols];
            for (std::size_t c = 0; c < w.cols; ++c) acc += wr[c] * input[c];
            z[r] = acc;
        }
        if (l < hidden_layers) {
            std::vector<double>& a = trace.activation[l];
            a.resize(z.size());
            for (std::size_t r = 0; r < z.size(); ++r) {
                a[r] = z[r] > 0.0 ? z[r] : 0.0;
            }
            input = a;
        }
    }
    return trace;
}

inline std::vector<double> softmax_from_logits(
    std::span<const double> logits) {
    double max_logit = logits[0];
    for (double v : logits) max_logit = std::max(max_logit, v);
    std::vector<double> probs(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        probs[i] = std::exp(logits[i] - max_logit);
        sum += probs[i];
    }
    for (double& p : probs) p /= sum;
    return probs;
}

inline double log_sum_exp(std::span<const double> logits) {
    double max_logit = logits[0];
    for (double v : logits) max_logit = std::max(max_logit, v);
    double sum = 0.0;
    for (double v : logits) sum += std::exp(v - max_logit);
    return max_logit + std::log(sum);
}

// Exactly one of `soft` (c probabilities) or `label` is set.
struct SampleTarget {
    int label = -1;
    const double* soft = nullptr;
};

// Cross-entropy (natural log) of one sample, straight from the logits so
// extreme logits cannot produce log(0).
inline double sample_loss_from_logits(std::span<const double> logits,
                                      const SampleTarget& target) {
    const double lse = log_sum_exp(logits);
    if (target.soft == nullptr) {
        return lse - logits[static_cast<std::size_t>(target.label)];
    }
    double dot = 0.0;
    for (std::size_t k = 0; k < logits.size(); ++k) {
        dot += target.soft[k] * logits[k];
    }
    return lse - dot;
}

struct Gradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;

    explicit Gradients(const MlpModel& model) {
        for (std::size_t l = 0; l < model.weights.size(); ++l) {
            weights.emplace_back(model.weights[l].rows,
                                 model.weights[l].cols);
            biases.emplace_back(model.biases[l].size(), 0.0);
        }
    }

    void zero() {
        for (Matrix& w : weights) std::fill(w.data.begin(), w.data.end(), 0.0);
        for (auto& b : biases) std::fill(b.begin(), b.end(), 0.0);
    }

    void scale(double factor) {
        for (Matrix& w : weights) {
            for (double& v : w.data) v *= factor;
        }
        for (auto& b : biases) {
            for (double& v : b) v *= factor;
        }
    }
};

// Backpropagates one sample, accumulating into `grads`; returns the loss.
inline double backprop_sample(const MlpModel& model, std::span<const double> x,
                              const SampleTarget& target, Gradients& grads) {
    const ForwardTrace trace = forward_trace(model, x);
    const std::vector<double>& logits = trace.preact.back();
    const double loss = sample_loss_from_logits(logits, target);
    std::vector<double> probs = softmax_from_logits(logits);

    // Output delta: softmax probabilities minus the target distribution.
    std::vector<double> delta = std::move(probs);
    if (target.soft == nullptr) {
        delta[static_cast<std::size_t>(target.label)] -= 1.0;
    } else {
        for (std::size_t k = 0; k < delta.size(); ++k) {
            delta[k] -= target.soft[k];
        }
    }

    const std::size_t hidden_layers = model.architecture.layer_widths.size();
    for (std::size_t l = hidden_layers + 1; l-- > 0;) {
        const Matrix& w = model.weights[l];
        std::span<const double> input =
            l == 0 ? x : std::span<const double>(trace.activation[l - 1]);
        Matrix& gw = grads.weights[l];
        std::vector<double>& gb = grads.biases[l];
        for (std::size_t r = 0; r < w.rows; ++r) {
            gb[r] += delta[r];
            double* gwr = &gw.data[r * w.cols];
            for (std::size_t c = 0; c < w.cols; ++c) {
                gwr[c] += delta[r] * input[c];
            }
        }
        if (l == 0) break;
        // delta_{l-1} = W_l^T delta_l, masked by the ReLU derivative.
        std::vector<double> prev(w.cols, 0.0);
        for (std::size_t r = 0; r < w.rows; ++r) {
            const double* wr = &w.data[r * w.cols];
            for (std::size_t c = 0; c < w.cols; ++c) {
                prev[c] += wr[c] * delta[r];
            }
        }
        const std::vector<double>& z = trace.preact[l - 1];
        for (std::size_t c = 0; c < prev.size(); ++c) {
            if (!(z[c] > 0.0)) prev[c] = 0.0;
        }
        delta = std::move(prev);
    }
    return loss;
}

// One Adam update for a single parameter; t is the 1-based step count.
// First step reduces to -lr * g / (|g| + eps), magnitude ~lr.
inline double adam_update(double grad, double& m, double& v, long t,
                          double learning_rate) {
    m = kAdamBeta1 * m + (1.0 - kAdamBeta1) * grad;
    v = kAdamBeta2 * v + (1.0 - kAdamBeta2) * grad * grad;
    const double m_hat =
        m / (1.0 - std::pow(kAdamBeta1, static_cast<double>(t)));
    const double v_hat =
        v / (1.0 - std::pow(kAdamBeta2, static_cast<double>(t)));
    return -learning_rate * m_hat / (std::sqrt(v_hat) + kAdamEpsilon);
}

inline double rmsprop_update(double grad, double& v, double learning_rate) {
    v = kRmsPropDecay * v + (1.0 - kRmsPropDecay) * grad * grad;
    return -learning_rate * grad / (std::sqrt(v) + kRmsPropEpsilon);
}

}  // namespace detail

inline ForwardResult forward(const MlpModel& model, std::span<const double> x) {
    const detail::ForwardTrace trace = detail::forward_trace(model, x);
    ForwardResult result;
    result.probabilities = detail::softmax_from_logits(trace.preact.back());
    result.activation_pattern.reserve(
        static_cast<std::size_t>(model.architecture.total_hidden_neurons()));
    for (std::size_t l = 0; l + 1 < trace.preact.size(); ++l) {
        for (double z : trace.preact[l]) {
            result.activation_pattern.push_back(z > 0.0 ? 1 : 0);
        }
    }
    return result;
}

inline std::vector<double> forward_proba(const MlpModel& model,
                                         std::span<const double> x) {
    return detail::softmax_from_logits(
        detail::forward_trace(model, x).preact.back());
}

inline std::vector<std::uint8_t> activation_pattern(
    const MlpModel& model, std::span<const double> x) {
    return forward(model, x).activation_pattern;
}

// Training targets: class indices, or one probability row per sample.
struct TrainTargets {
    TargetMode mode = TargetMode::hard_labels;
    std::vector<int> labels;
    Matrix soft;

    static TrainTargets hard(std::vector<int> labels) {
        TrainTargets t;
        t.mode = TargetMode::hard_labels;
        t.labels = std::move(labels);
        return t;
    }

    static TrainTargets soft_rows(Matrix probabilities) {
        TrainTargets t;
        t.mode = TargetMode::soft_probabilities;
        t.soft = std::move(probabilities);
        return t;
    }

    std::size_t count() const {
        return mode == TargetMode::hard_labels ? labels.size() : soft.rows;
    }
};

struct TrainResult {
    MlpModel model;
    std::vector<double> loss_trace;  // mean cross-entropy per epoch
};

// Mini-batch training with per-epoch shuffling.  The shuffle stream is
// derived from the model seed with a fixed tag, so two runs with the same
// (model, data, config) produce bit-identical parameters.
inline TrainResult train(MlpModel model, const Matrix& features,
                         const TrainTargets& targets,
                         const TrainConfig& config) {
    config.validate();
    model.validate();
    const std::size_t n = features.rows;
    if (n == 0) {
        throw std::invalid_argument("train: empty feature matrix");
    }
    if (features.cols !=
        static_cast<std::size_t>(model.architecture.input_dim)) {
        throw std::invalid_argument(detail::cat(
            "train: features have ", features.cols, " columns, model expects ",
            model.architecture.input_dim));
    }
    if (targets.count() != n) {
        throw std::invalid_argument(detail::cat(
            "train: ", n, " samples but ", targets.count(), " targets"));
    }
    if (targets.mode != config.target_mode) {
        throw std::invalid_argument(
            "train: target data does not match config.target_mode");
    }
    const auto c = static_cast<std::size_t>(model.architecture.class_count);
    if (targets.mode == TargetMode::hard_labels) {
        for (std::size_t i = 0; i < n; ++i) {
            if (targets.labels[i] < 0 ||
                static_cast<std::size_t>(targets.labels[i]) >= c) {
                throw std::invalid_argument(detail::cat(
                    "train: label ", targets.labels[i], " of sample ", i,
                    " outside [0,", c, ")"));
            }
        }
    } else {
        if (targets.soft.cols != c) {
            throw std::invalid_argument(detail::cat(
                "train: soft targets have ", targets.soft.cols,
                " columns, expected ", c));
        }
        for (std::size_t i = 0; i < n; ++i) {
            double sum = 0.0;
            for (double v : targets.soft.row(i)) sum += v;
            if (std::abs(sum - 1.0) > 1e-6) {
                throw std::invalid_argument(detail::cat(
                    "train: soft target row ", i, " sums to ", sum));
            }
        }
    }

    detail::Gradients grads(model);
    detail::Gradients first_moment(model);   // Adam m / RMSProp v
    detail::Gradients second_moment(model);  // Adam v
    long step = 0;

    std::mt19937_64 shuffle_rng(
        detail::mix_seed(model.rng_seed, detail::kShuffleStreamTag));
    std::vector<int> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);

    TrainResult result;
    for (long epoch = 1; epoch <= config.epochs; ++epoch) {
        detail::shuffle_indices(order, shuffle_rng);
        double epoch_loss = 0.0;
        long batch_index = 0;
        for (std::size_t begin = 0; begin < n;
             begin += static_cast<std::size_t>(config.batch_size)) {
            ++batch_index;
            const std::size_t end = std::min(
                begin + static_cast<std::size_t>(config.batch_size), n);
            const auto batch = static_cast<double>(end - begin);
            grads.zero();
            double batch_loss = 0.0;
            for (std::size_t k = begin; k < end; ++k) {
                const auto i = static_cast<std::size_t>(order[k]);
                detail::SampleTarget target;
                if (targets.mode == TargetMode::hard_labels) {
                    target.label = targets.labels[i];
                } else {
                    target.soft = targets.soft.row(i).data();
                }
                batch_loss += detail::backprop_sample(model, features.row(i),
                                                      target, grads);
            }
            if (!std::isfinite(batch_loss)) {
                throw std::runtime_error(detail::cat(
                    "train: non-finite loss at epoch ", epoch, " batch ",
                    batch_index));
            }
            epoch_loss += batch_loss;
            grads.scale(1.0 / batch);

            ++step;
            for (std::size_t l = 0; l < model.weights.size(); ++l) {
                auto update = [&](double& param, double grad, double& m1,
                                  double& m2) {
                    switch (config.optimizer) {
                        case Optimizer::sgd:
                            param -= config.learning_rate * grad;
                            break;
                        case Optimizer::rmsprop:
                            param += detail::rmsprop_update(
                                grad, m1, config.learning_rate);
                            break;
                        case Optimizer::adam:
                            param += detail::adam_update(
                                grad, m1, m2, step, config.learning_rate);
                            break;
                    }
                };
                for (std::size_t i = 0; i < model.weights[l].data.size();
                     ++i) {
                    update(model.weights[l].data[i], grads.weights[l].data[i],
                           first_moment.weights[l].data[i],
                           second_moment.weights[l].data[i]);
                }
                for (std::size_t i = 0; i < model.biases[l].size(); ++i) {
                    update(model.biases[l][i], grads.biases[l][i],
                           first_moment.biases[l][i],
                           second_moment.biases[l][i]);
                }
            }
            if (!model.parameters_finite()) {
                throw std::runtime_error(detail::cat(
                    "train: non-finite parameter at epoch ", epoch, " batch ",
                    batch_index));
            }
        }
        result.loss_trace.push_back(epoch_loss / static_cast<double>(n));
    }
    result.model = std::move(model);
    return result;
}

namespace detail {

inline double sample_loss(const MlpModel& model, std::span<const double> x,
                          const SampleTarget& target) {
    return sample_loss_from_logits(forward_trace(model, x).preact.back(),
                                   target);
}

inline double gradient_check_impl(const MlpModel& model,
                                  std::span<const double> x,
                                  const SampleTarget& target, double h) {
    if (!(h >= 1e-6 && h <= 1e-3)) {
        throw std::invalid_argument(detail::cat(
            "gradient_check: perturbation ", h, " outside [1e-6, 1e-3]"));
    }
    Gradients analytic(model);
    backprop_sample(model, x, target, analytic);

    MlpModel probe = model;
    double max_rel_error = 0.0;
    auto check_param = [&](double& param, double analytic_grad) {
        const double saved = param;
        param = saved + h;
        const double plus = sample_loss(probe, x, target);
        param = saved - h;
        const double minus = sample_loss(probe, x, target);
        param = saved;
        const double numeric = (plus - minus) / (2.0 * h);
        const double rel =
            std::abs(analytic_grad - numeric) /
            std::max({std::abs(analytic_grad), std::abs(numeric), 1e-8});
        max_rel_error = std::max(max_rel_error, rel);
    };
    for (std::size_t l = 0; l < probe.weights.size(); ++l) {
        for (std::size_t i = 0; i < probe.weights[l].data.size(); ++i) {
            check_param(probe.weights[l].data[i],
                        analytic.weights[l].data[i]);
        }
        for (std::size_t i = 0; i < probe.biases[l].size(); ++i) {
            check_param(probe.biases[l][i], analytic.biases[l][i]);
        }
    }
    return max_rel_error;
}

}  // namespace detail

// Max relative error between analytic and central-difference gradients
// over every parameter, for one sample with a hard label target.
inline double gradient_check(const MlpModel& model, std::span<const double> x,
                             int label, double h) {
    detail::SampleTarget target;
    target.label = label;
    return detail::gradient_check_impl(model, x, target, h);
}

// Same, for a soft probability target.
inline double gradient_check(const MlpModel& model, std::span<const double> x,
                             std::span<const double> soft_target, double h) {
    if (soft_target.size() !=
        static_cast<std::size_t>(model.architecture.class_count)) {
        throw std::invalid_argument("gradient_check: soft target size");
    }
    detail::SampleTarget target;
    target.soft = soft_target.data();
    return detail::gradient_check_impl(model, x, target, h);
}

// --- serialization ---------------------------------------------------------

// JSON layout: {"architecture": {...}, "weights": [[row-major]...],
// "biases": [[...]...], "seed": n}.  nlohmann emits shortest round-trip
// decimal for doubles, so finite values survive a round trip exactly.
inline nlohmann::json mlp_to_json(const MlpModel& model) {
    model.validate();
    nlohmann::json j;
    j["architecture"] = {{"input_dim", model.architecture.input_dim},
                         {"layer_widths", model.architecture.layer_widths},
                         {"class_count", model.architecture.class_count}};
    j["weights"] = nlohmann::json::array();
    for (const Matrix& w : model.weights) {
        j["weights"].push_back(w.data);
    }
    j["biases"] = nlohmann::json::array();
    for (const auto& b : model.biases) {
        j["biases"].push_back(b);
    }
    j["seed"] = model.rng_seed;
    return j;
}

inline MlpModel mlp_from_json(const nlohmann::json& j) {
    MlpModel model;
    try {
        const nlohmann::json& arch = j.at("architecture");
        model.architecture.input_dim = arch.at("input_dim").get<int>();
        model.architecture.layer_widths =
            arch.at("layer_widths").get<std::vector<int>>();
        model.architecture.class_count = arch.at("class_count").get<int>();
        std::size_t fan_in =
            static_cast<std::size_t>(model.architecture.input_dim);
        const nlohmann::json& weights = j.at("weights");
        const nlohmann::json& biases = j.at("biases");
        for (std::size_t l = 0; l < weights.size(); ++l) {
            const std::size_t fan_out =
                l < model.architecture.layer_widths.size()
                    ? static_cast<std::size_t>(
                          model.architecture.layer_widths[l])
                    : static_cast<std::size_t>(
                          model.architecture.class_count);
            Matrix w(fan_out, fan_in);
            w.data = weights.at(l).get<std::vector<double>>();
            if (w.data.size() != fan_out * fan_in) {
                throw std::invalid_argument(detail::cat(
                    "model JSON: layer ", l, " has ", w.data.size(),
                    " weights, expected ", fan_out * fan_in));
            }
            model.weights.push_back(std::move(w));
            model.biases.push_back(
                biases.at(l).get<std::vector<double>>());
            fan_in = fan_out;
        }
        model.rng_seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(
            detail::cat("model JSON: malformed document: ", e.what()));
    }
    model.validate();
    return model;
}

inline void save_mlp(const MlpModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error(
            detail::cat("save_mlp: cannot open ", path, " for writing"));
    }
    out << mlp_to_json(model).dump(2) << '\n';
    if (!out) {
        throw std::runtime_error(detail::cat("save_mlp: write to ", path,
                                             " failed"));
    }
}

inline MlpModel load_mlp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error(detail::cat("load_mlp: cannot open ", path));
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(
            detail::cat("load_mlp: ", path, " is not valid JSON: ", e.what()));
    }
    return mlp_from_json(j);
}

// --- Classifier adapter ----------------------------------------------------

// MLP behind the common Classifier interface.  Accepts epochs == 0 in its
// own config as "skip training entirely" (the untrained-control case);
// train() itself still requires epochs >= 1.
class MlpClassifier : public Classifier {
public:
    MlpClassifier(MlpModel initial_model, TrainConfig config)
        : initial_(initial_model),
          model_(std::move(initial_model)),
          config_(config) {
        model_.validate();
    }

    static MlpClassifier pretrained(MlpModel model) {
        MlpClassifier c(std::move(model), TrainConfig{});
        c.fitted_ = true;
        return c;
    }

    std::string kind() const override { return "mlp"; }
    int class_count() const override {
        return model_.architecture.class_count;
    }
    bool fitted() const override { return fitted_; }

    void fit(const Matrix& features, const std::vector<int>& labels) override {
        if (config_.epochs > 0) {
            TrainConfig cfg = config_;
            cfg.target_mode = TargetMode::hard_labels;
            TrainResult r =
                train(std::move(model_), features, TrainTargets::hard(labels),
                      cfg);
            model_ = std::move(r.model);
            loss_trace_ = std::move(r.loss_trace);
        }
        fitted_ = true;
    }

    bool supports_soft_targets() const override { return true; }

    void fit_soft(const Matrix& features,
                  const std::vector<ProbVector>& targets) override {
        if (config_.epochs > 0) {
            Matrix soft(targets.size(),
                        static_cast<std::size_t>(class_count()));
            for (std::size_t i = 0; i < targets.size(); ++i) {
                if (targets[i].size() != soft.cols) {
                    throw std::invalid_argument(detail::cat(
                        "fit_soft: target row ", i, " has ",
                        targets[i].size(), " entries, expected ", soft.cols));
                }
                std::copy(targets[i].begin(), targets[i].end(),
                          soft.row(i).begin());
            }
            TrainConfig cfg = config_;
            cfg.target_mode = TargetMode::soft_probabilities;
            TrainResult r = train(std::move(model_), features,
                                  TrainTargets::soft_rows(std::move(soft)),
                                  cfg);
            model_ = std::move(r.model);
            loss_trace_ = std::move(r.loss_trace);
        }
        fitted_ = true;
    }

    std::vector<ProbVector> predict_proba(
        const Matrix& features) const override {
        require_fitted("predict_proba");
        return proba_with(model_, features);
    }

    std::vector<ProbVector> initial_proba(
        const Matrix& features) const override {
        return proba_with(initial_, features);
    }

    const MlpModel& model() const { return model_; }
    const MlpModel& initial_model() const { return initial_; }
    const TrainConfig& config() const { return config_; }
    const std::vector<double>& loss_trace() const { return loss_trace_; }

private:
    static std::vector<ProbVector> proba_with(const MlpModel& model,
                                              const Matrix& features) {
        std::vector<ProbVector> out;
        out.reserve(features.rows);
        for (std::size_t i = 0; i < features.rows; ++i) {
            out.push_back(forward_proba(model, features.row(i)));
        }
        return out;
    }

    MlpModel initial_;
    MlpModel model_;
    TrainConfig config_;
    std::vector<double> loss_trace_;
    bool fitted_ = false;
};

}  // namespace pwln
