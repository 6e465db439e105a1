// Copyright 2026 The pwln-interp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pwln/architecture.hpp"
#include "pwln/baselines.hpp"
#include "pwln/classifier.hpp"
#include "pwln/data_io.hpp"
#include "pwln/detail/common.hpp"
#include "pwln/interpret.hpp"
#include "pwln/nn.hpp"

namespace pwln {

// Seed-stream roles: every consumer of randomness derives its own stream
// from the run seed via mix_seed(seed, role), so adding a consumer never
// shifts another's draws.  Role 3 (query subsample) lives in interpret.hpp.
constexpr std::uint64_t kSeedRoleBlackBoxInit = 1;
constexpr std::uint64_t kSeedRoleStudentInit = 2;
constexpr std::uint64_t kSeedRoleSplit = 4;
// Ensemble members offset their shared init seed by member index from here.
constexpr std::uint64_t kSeedRoleEnsembleBase = 100;

// One model description from a config file.  `kind` selects which of the
// remaining fields are meaningful.
struct ModelSpec {
    std::string kind;  // mlp | mlp_file | tree | logistic | ensemble

    // kind == mlp: architecture literal (class count may be omitted and is
    // then taken from the dataset) plus training hyperparameters.
    std::string arch;
    TrainConfig train;
    std::optional<std::uint64_t> seed;  // explicit init-seed override

    // kind == mlp_file
    std::string path;

    // kind == tree
    DecisionTreeOptions tree;

    // kind == logistic
    LogisticRegressionOptions logistic;

    // kind == ensemble
    std::vector<ModelSpec> members;
};

enum class RunMode { distill, sweep };

enum class SweepAxis { query_fraction, width, optimizer };

inline const char* sweep_axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::query_fraction: return "query_fraction";
        case SweepAxis::width: return "width";
        case SweepAxis::optimizer: return "optimizer";
    }
    return "?";
}

inline SweepAxis parse_sweep_axis(const std::string& name) {
    if (name == "query_fraction") return SweepAxis::query_fraction;
    if (name == "width") return SweepAxis::width;
    if (name == "optimizer") return SweepAxis::optimizer;
    throw std::invalid_argument(detail::cat(
        "parse_sweep_axis: unknown axis \"", name,
        "\" (expected query_fraction|width|optimizer)"));
}

// Full description of one experiment run (distill) or a family of runs
// (sweep).  Mirrors the JSON schema one to one.
struct RunConfig {
    std::string dataset;        // dataset spec string (see data_io)
    double eval_fraction = 0.2; // share of rows held out for evaluation
    bool normalize = false;     // min-max normalize features before use
    ModelSpec model_a;
    ModelSpec model_b;
    double query_fraction = 1.0;
    std::string estimator = "agreement";
    double epsilon = kDefaultEntropyEpsilon;
    std::uint64_t seed = 0;
    bool soft_targets = false;
    bool record_timing = false;
    bool svg = false;           // emit a companion SVG plot (sweep)
    std::string out_dir = ".";
    std::string data_dir;
    bool verbose = false;

    // Sweep-only fields.
    std::string axis;
    std::vector<nlohmann::json> values;  // numbers or optimizer names
    std::vector<std::uint64_t> seeds;
};

namespace detail {

// Collects schema violations; each entry is "<json pointer>: <message>".
struct ConfigErrors {
    std::vector<std::string> items;

    void add(const std::string& pointer, const std::string& message) {
        items.push_back(cat(pointer.empty() ? "/" : pointer, ": ", message));
    }

    void raise_if_any() const {
        if (items.empty()) return;
        std::string joined = "invalid config:";
        for (const std::string& item : items) {
            joined += "\n  ";
            joined += item;
        }
        throw std::invalid_argument(joined);
    }
};

inline void reject_unknown_keys(const nlohmann::json& object,
                                const std::vector<std::string>& allowed,
                                const std::string& pointer,
                                ConfigErrors& errors) {
    for (const auto& [key, value] : object.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            errors.add(cat(pointer, "/", key), "unknown key");
        }
    }
}

inline bool take_string(const nlohmann::json& object, const char* key,
                        const std::string& pointer, ConfigErrors& errors,
                        std::string& out) {
    if (!object.contains(key)) return false;
    if (!object.at(key).is_string()) {
        errors.add(cat(pointer, "/", key), "expected a string");
        return false;
    }
    out = object.at(key).get<std::string>();
    return true;
}

inline bool take_bool(const nlohmann::json& object, const char* key,
                      const std::string& pointer, ConfigErrors& errors,
                      bool& out) {
    if (!object.contains(key)) return false;
    if (!object.at(key).is_boolean()) {
        errors.add(cat(pointer, "/", key), "expected true or false");
        return false;
    }
    out = object.at(key).get<bool>();
    return true;
}

inline bool take_number(const nlohmann::json& object, const char* key,
                        const std::string& pointer, ConfigErrors& errors,
                        double& out) {
    if (!object.contains(key)) return false;
    if (!object.at(key).is_number()) {
        errors.add(cat(pointer, "/", key), "expected a number");
        return false;
    }
    out = object.at(key).get<double>();
    return true;
}

inline bool take_integer(const nlohmann::json& object, const char* key,
                         const std::string& pointer, ConfigErrors& errors,
                         long& out) {
    if (!object.contains(key)) return false;
    if (!object.at(key).is_number_integer()) {
        errors.add(cat(pointer, "/", key), "expected an integer");
        return false;
    }
    out = object.at(key).get<long>();
    return true;
}

inline bool take_seed(const nlohmann::json& object, const char* key,
                      const std::string& pointer, ConfigErrors& errors,
                      std::uint64_t& out) {
    if (!object.contains(key)) return false;
    const auto& v = object.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                   v.get<long long>() < 0)) {
        errors.add(cat(pointer, "/", key), "expected a nonnegative integer");
        return false;
    }
    out = v.get<std::uint64_t>();
    return true;
}

inline ModelSpec parse_model_spec(const nlohmann::json& j,
                                  const std::string& pointer,
                                  ConfigErrors& errors, int depth = 0);

inline ModelSpec parse_model_spec(const nlohmann::json& j,
                                  const std::string& pointer,
                                  ConfigErrors& errors, int depth) {
    ModelSpec spec;
    if (!j.is_object()) {
        errors.add(pointer, "expected a model object");
        return spec;
    }
    if (!take_string(j, "kind", pointer, errors, spec.kind)) {
        errors.add(cat(pointer, "/kind"),
                   "required: one of mlp|mlp_file|tree|logistic|ensemble");
        return spec;
    }

    if (spec.kind == "mlp") {
        reject_unknown_keys(j,
                            {"kind", "arch", "epochs", "optimizer",
                             "learning_rate", "batch_size", "target_mode",
                             "seed"},
                            pointer, errors);
        if (!take_string(j, "arch", pointer, errors, spec.arch)) {
            errors.add(cat(pointer, "/arch"),
                       "required: architecture literal such as "
                       "n0=2;layers=8,8;c=3");
        } else {
            try {
                // Syntax check only; the class count binds to the dataset
                // at build time.
                parse_architecture(spec.arch, 2);
            } catch (const std::exception& e) {
                errors.add(cat(pointer, "/arch"), e.what());
            }
        }
        long epochs = spec.train.epochs;
        if (take_integer(j, "epochs", pointer, errors, epochs)) {
            if (epochs < 0) {
                errors.add(cat(pointer, "/epochs"), "must be >= 0");
            } else {
                spec.train.epochs = epochs;
            }
        }
        std::string optimizer;
        if (take_string(j, "optimizer", pointer, errors, optimizer)) {
            try {
                spec.train.optimizer = parse_optimizer(optimizer);
            } catch (const std::exception& e) {
                errors.add(cat(pointer, "/optimizer"), e.what());
            }
        }
        double lr = spec.train.learning_rate;
        if (take_number(j, "learning_rate", pointer, errors, lr)) {
            if (!(lr > 0.0) || !std::isfinite(lr)) {
                errors.add(cat(pointer, "/learning_rate"),
                           "must be finite and > 0");
            } else {
                spec.train.learning_rate = lr;
            }
        }
        long batch = spec.train.batch_size;
        if (take_integer(j, "batch_size", pointer, errors, batch)) {
            if (batch < 1) {
                errors.add(cat(pointer, "/batch_size"), "must be >= 1");
            } else {
                spec.train.batch_size = batch;
            }
        }
        std::string mode;
        if (take_string(j, "target_mode", pointer, errors, mode)) {
            try {
                spec.train.target_mode = parse_target_mode(mode);
            } catch (const std::exception& e) {
                errors.add(cat(pointer, "/target_mode"), e.what());
            }
        }
        std::uint64_t seed = 0;
        if (take_seed(j, "seed", pointer, errors, seed)) spec.seed = seed;
        return spec;
    }

    if (spec.kind == "mlp_file") {
        reject_unknown_keys(j, {"kind", "path"}, pointer, errors);
        if (!take_string(j, "path", pointer, errors, spec.path) ||
            spec.path.empty()) {
            errors.add(cat(pointer, "/path"),
                       "required: path to a serialized model JSON");
        }
        return spec;
    }

    if (spec.kind == "tree") {
        reject_unknown_keys(j, {"kind", "max_depth", "min_samples_leaf"},
                            pointer, errors);
        long depth_opt = spec.tree.max_depth;
        if (take_integer(j, "max_depth", pointer, errors, depth_opt)) {
            if (depth_opt < 1) {
                errors.add(cat(pointer, "/max_depth"), "must be >= 1");
            } else {
                spec.tree.max_depth = static_cast<int>(depth_opt);
            }
        }
        long leaf = spec.tree.min_samples_leaf;
        if (take_integer(j, "min_samples_leaf", pointer, errors, leaf)) {
            if (leaf < 1) {
                errors.add(cat(pointer, "/min_samples_leaf"), "must be >= 1");
            } else {
                spec.tree.min_samples_leaf = static_cast<int>(leaf);
            }
        }
        return spec;
    }

    if (spec.kind == "logistic") {
        reject_unknown_keys(j, {"kind", "learning_rate", "epochs"}, pointer,
                            errors);
        double lr = spec.logistic.learning_rate;
        if (take_number(j, "learning_rate", pointer, errors, lr)) {
            if (!(lr > 0.0) || !std::isfinite(lr)) {
                errors.add(cat(pointer, "/learning_rate"),
                           "must be finite and > 0");
            } else {
                spec.logistic.learning_rate = lr;
            }
        }
        long epochs = spec.logistic.epochs;
        if (take_integer(j, "epochs", pointer, errors, epochs)) {
            if (epochs < 1) {
                errors.add(cat(pointer, "/epochs"), "must be >= 1");
            } else {
                spec.logistic.epochs = epochs;
            }
        }
        return spec;
    }

    if (spec.kind == "ensemble") {
        reject_unknown_keys(j, {"kind", "members"}, pointer, errors);
        if (depth > 0) {
            errors.add(pointer, "ensembles cannot nest");
            return spec;
        }
        if (!j.contains("members") || !j.at("members").is_array() ||
            j.at("members").empty()) {
            errors.add(cat(pointer, "/members"),
                       "required: nonempty array of member models");
            return spec;
        }
        const auto& members = j.at("members");
        for (std::size_t i = 0; i < members.size(); ++i) {
            spec.members.push_back(parse_model_spec(
                members[i], cat(pointer, "/members/", i), errors, depth + 1));
        }
        return spec;
    }

    errors.add(cat(pointer, "/kind"),
               cat("unknown kind \"", spec.kind,
                   "\" (expected mlp|mlp_file|tree|logistic|ensemble)"));
    return spec;
}

inline nlohmann::json model_spec_to_json(const ModelSpec& spec) {
    nlohmann::json j{{"kind", spec.kind}};
    if (spec.kind == "mlp") {
        j["arch"] = spec.arch;
        j["epochs"] = spec.train.epochs;
        j["optimizer"] = optimizer_name(spec.train.optimizer);
        j["learning_rate"] = spec.train.learning_rate;
        j["batch_size"] = spec.train.batch_size;
        j["target_mode"] = target_mode_name(spec.train.target_mode);
        if (spec.seed.has_value()) j["seed"] = *spec.seed;
    } else if (spec.kind == "mlp_file") {
        j["path"] = spec.path;
    } else if (spec.kind == "tree") {
        j["max_depth"] = spec.tree.max_depth;
        j["min_samples_leaf"] = spec.tree.min_samples_leaf;
    } else if (spec.kind == "logistic") {
        j["learning_rate"] = spec.logistic.learning_rate;
        j["epochs"] = spec.logistic.epochs;
    } else if (spec.kind == "ensemble") {
        nlohmann::json members = nlohmann::json::array();
        for (const ModelSpec& member : spec.members) {
            members.push_back(model_spec_to_json(member));
        }
        j["members"] = members;
    }
    return j;
}

}  // namespace detail

// Parses and validates a run config, collecting every schema violation
// (named by JSON pointer) before throwing.
inline RunConfig parse_run_config(const nlohmann::json& j, RunMode mode) {
    detail::ConfigErrors errors;
    RunConfig config;
    if (!j.is_object()) {
        errors.add("", "config root must be a JSON object");
        errors.raise_if_any();
    }

    std::vector<std::string> allowed{
        "dataset",      "eval_fraction", "normalize",  "model_a",
        "model_b",      "query_fraction", "estimator", "epsilon",
        "seed",         "soft_targets",  "record_timing", "svg",
        "out_dir",      "data_dir",      "verbose"};
    if (mode == RunMode::sweep) {
        allowed.insert(allowed.end(), {"axis", "values", "seeds"});
    }
    detail::reject_unknown_keys(j, allowed, "", errors);

    if (!detail::take_string(j, "dataset", "", errors, config.dataset) ||
        config.dataset.empty()) {
        errors.add("/dataset", "required: dataset spec string");
    }
    if (detail::take_number(j, "eval_fraction", "", errors,
                            config.eval_fraction)) {
        if (!(config.eval_fraction > 0.0) || !(config.eval_fraction < 1.0)) {
            errors.add("/eval_fraction", "must lie in (0, 1)");
        }
    }
    detail::take_bool(j, "normalize", "", errors, config.normalize);

    if (j.contains("model_a")) {
        config.model_a =
            detail::parse_model_spec(j.at("model_a"), "/model_a", errors);
    } else {
        errors.add("/model_a", "required: model spec object");
    }
    if (j.contains("model_b")) {
        config.model_b =
            detail::parse_model_spec(j.at("model_b"), "/model_b", errors);
    } else {
        errors.add("/model_b", "required: model spec object");
    }

    if (detail::take_number(j, "query_fraction", "", errors,
                            config.query_fraction)) {
        if (!(config.query_fraction > 0.0) || config.query_fraction > 1.0) {
            errors.add("/query_fraction", "must lie in (0, 1]");
        }
    }
    if (detail::take_string(j, "estimator", "", errors, config.estimator)) {
        try {
            parse_estimator(config.estimator);
        } catch (const std::exception& e) {
            errors.add("/estimator", e.what());
        }
    }
    if (detail::take_number(j, "epsilon", "", errors, config.epsilon)) {
        if (!(config.epsilon > 0.0) || !(config.epsilon < 1.0)) {
            errors.add("/epsilon", "must lie in (0, 1)");
        }
    }
    detail::take_seed(j, "seed", "", errors, config.seed);
    detail::take_bool(j, "soft_targets", "", errors, config.soft_targets);
    detail::take_bool(j, "record_timing", "", errors, config.record_timing);
    detail::take_bool(j, "svg", "", errors, config.svg);
    detail::take_string(j, "out_dir", "", errors, config.out_dir);
    detail::take_string(j, "data_dir", "", errors, config.data_dir);
    detail::take_bool(j, "verbose", "", errors, config.verbose);

    if (mode == RunMode::sweep) {
        if (!detail::take_string(j, "axis", "", errors, config.axis)) {
            errors.add("/axis",
                       "required: query_fraction|width|optimizer");
        } else {
            try {
                parse_sweep_axis(config.axis);
            } catch (const std::exception& e) {
                errors.add("/axis", e.what());
            }
        }
        if (!j.contains("values") || !j.at("values").is_array() ||
            j.at("values").empty()) {
            errors.add("/values", "required: nonempty array of axis values");
        } else {
            const auto& values = j.at("values");
            for (std::size_t i = 0; i < values.size(); ++i) {
                config.values.push_back(values[i]);
            }
        }
        if (!j.contains("seeds") || !j.at("seeds").is_array() ||
            j.at("seeds").empty()) {
            errors.add("/seeds", "required: nonempty array of seeds");
        } else {
            const auto& seeds = j.at("seeds");
            for (std::size_t i = 0; i < seeds.size(); ++i) {
                if (!seeds[i].is_number_integer() ||
                    (!seeds[i].is_number_unsigned() &&
                     seeds[i].get<long long>() < 0)) {
                    errors.add(detail::cat("/seeds/", i),
                               "expected a nonnegative integer");
                } else {
                    config.seeds.push_back(seeds[i].get<std::uint64_t>());
                }
            }
        }

        // Axis-specific value validation.
        if (!config.axis.empty() && !config.values.empty()) {
            SweepAxis axis;
            bool axis_ok = true;
            try {
                axis = parse_sweep_axis(config.axis);
            } catch (const std::exception&) {
                axis_ok = false;
            }
            if (axis_ok) {
                for (std::size_t i = 0; i < config.values.size(); ++i) {
                    const nlohmann::json& v = config.values[i];
                    const std::string pointer = detail::cat("/values/", i);
                    switch (axis) {
                        case SweepAxis::query_fraction:
                            if (!v.is_number() || !(v.get<double>() > 0.0) ||
                                v.get<double>() > 1.0) {
                                errors.add(pointer,
                                           "query_fraction values must be "
                                           "numbers in (0, 1]");
                            }
                            break;
                        case SweepAxis::width:
                            if (!v.is_number_integer() || v.get<long>() < 1) {
                                errors.add(pointer,
                                           "width values must be integers "
                                           ">= 1");
                            }
                            break;
                        case SweepAxis::optimizer:
                            if (!v.is_string()) {
                                errors.add(pointer,
                                           "optimizer values must be "
                                           "strings");
                            } else {
                                try {
                                    parse_optimizer(v.get<std::string>());
                                } catch (const std::exception& e) {
                                    errors.add(pointer, e.what());
                                }
                            }
                            break;
                    }
                }
                if (axis == SweepAxis::width &&
                    config.model_a.kind != "mlp") {
                    errors.add("/axis",
                               "width sweeps require model_a of kind mlp");
                }
                if (axis == SweepAxis::optimizer &&
                    config.model_a.kind != "mlp") {
                    errors.add("/axis",
                               "optimizer sweeps require model_a of kind "
                               "mlp");
                }
            }
        }
    }

    errors.raise_if_any();
    return config;
}

// Canonical JSON image of a config: every field present, defaults filled,
// keys sorted by nlohmann's object ordering.  Equal configs produce equal
// dumps, which makes the fingerprint stable.
inline nlohmann::json canonical_config_json(const RunConfig& config,
                                            RunMode mode) {
    nlohmann::json j{
        {"dataset", config.dataset},
        {"eval_fraction", config.eval_fraction},
        {"normalize", config.normalize},
        {"model_a", detail::model_spec_to_json(config.model_a)},
        {"model_b", detail::model_spec_to_json(config.model_b)},
        {"query_fraction", config.query_fraction},
        {"estimator", config.estimator},
        {"epsilon", config.epsilon},
        {"seed", config.seed},
        {"soft_targets", config.soft_targets},
        {"record_timing", config.record_timing},
        {"svg", config.svg},
        {"out_dir", config.out_dir},
        {"data_dir", config.data_dir},
        {"verbose", config.verbose},
    };
    if (mode == RunMode::sweep) {
        j["axis"] = config.axis;
        j["values"] = config.values;
        j["seeds"] = config.seeds;
    }
    return j;
}

inline std::string config_fingerprint(const RunConfig& config, RunMode mode) {
    return detail::fnv1a64_hex(canonical_config_json(config, mode).dump());
}

// Instantiates a classifier from its spec.  `class_count` comes from the
// dataset; `init_seed` is the role-derived stream for this model's
// parameter initialization (an explicit spec seed overrides it).
inline std::unique_ptr<Classifier> build_model(const ModelSpec& spec,
                                               int class_count,
                                               std::uint64_t init_seed,
                                               const std::string& data_dir =
                                                   "") {
    if (spec.kind == "mlp") {
        const PwlnArchitecture arch =
            parse_architecture(spec.arch, class_count);
        if (arch.class_count != class_count) {
            throw std::invalid_argument(detail::cat(
                "build_model: architecture \"", spec.arch, "\" declares ",
                arch.class_count, " classes but the dataset has ",
                class_count));
        }
        const std::uint64_t seed = spec.seed.value_or(init_seed);
        return std::make_unique<MlpClassifier>(
            init_truncated_normal(arch, seed), spec.train);
    }
    if (spec.kind == "mlp_file") {
        std::string path = spec.path;
        if (!data_dir.empty() &&
            !std::filesystem::path(path).is_absolute()) {
            path = (std::filesystem::path(data_dir) / path).string();
        }
        MlpModel model = load_mlp(path);
        if (model.architecture.class_count != class_count) {
            throw std::invalid_argument(detail::cat(
                "build_model: model file ", path, " declares ",
                model.architecture.class_count,
                " classes but the dataset has ", class_count));
        }
        return std::make_unique<MlpClassifier>(
            MlpClassifier::pretrained(std::move(model)));
    }
    if (spec.kind == "tree") {
        DecisionTreeOptions options = spec.tree;
        options.class_count = class_count;
        return std::make_unique<DecisionTreeClassifier>(options);
    }
    if (spec.kind == "logistic") {
        LogisticRegressionOptions options = spec.logistic;
        options.class_count = class_count;
        return std::make_unique<LogisticRegressionClassifier>(options);
    }
    if (spec.kind == "ensemble") {
        std::vector<std::shared_ptr<Classifier>> members;
        members.reserve(spec.members.size());
        for (std::size_t i = 0; i < spec.members.size(); ++i) {
            members.push_back(build_model(
                spec.members[i], class_count,
                detail::mix_seed(init_seed, kSeedRoleEnsembleBase + i),
                data_dir));
        }
        return std::make_unique<EnsembleClassifier>(std::move(members));
    }
    throw std::invalid_argument(
        detail::cat("build_model: unknown kind \"", spec.kind, "\""));
}

namespace detail {

// Shared shuffle for dataset splitting: evaluation indices first, query
// pool after.  Both split flavors must agree on this order.
inline std::pair<std::vector<int>, std::vector<int>> split_order(
    std::size_t n, double eval_fraction, std::uint64_t run_seed) {
    if (!(eval_fraction > 0.0) || !(eval_fraction < 1.0)) {
        throw std::invalid_argument(
            cat("dataset split: eval_fraction must lie in (0, 1), got ",
                eval_fraction));
    }
    if (n < 2) {
        throw std::invalid_argument("dataset split: need at least 2 rows");
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(mix_seed(run_seed, kSeedRoleSplit));
    shuffle_indices(order, rng);

    auto n_eval = static_cast<std::size_t>(std::max<long>(
        1, std::lround(eval_fraction * static_cast<double>(n))));
    n_eval = std::min(n_eval, n - 1);  // keep the pool nonempty

    std::vector<int> eval_idx(
        order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_eval));
    std::vector<int> pool_idx(
        order.begin() + static_cast<std::ptrdiff_t>(n_eval), order.end());
    return {std::move(eval_idx), std::move(pool_idx)};
}

}  // namespace detail

// Seeded split of a dataset's rows into the interpretation query pool and
// the fixed evaluation subset (shuffle, then the first eval-share rows).
struct DatasetSplit {
    Matrix query_pool;
    Matrix eval_features;
};

inline DatasetSplit split_for_interpretation(const Matrix& features,
                                             double eval_fraction,
                                             std::uint64_t run_seed) {
    const auto [eval_idx, pool_idx] =
        detail::split_order(features.rows, eval_fraction, run_seed);
    DatasetSplit split;
    split.eval_features = features.gather_rows(eval_idx);
    split.query_pool = features.gather_rows(pool_idx);
    return split;
}

// Same split, carrying labels alongside (the black box trains on the query
// pool's rows; ground truth is used only there).
struct LabeledSplit {
    Matrix query_pool;
    std::vector<int> pool_labels;
    Matrix eval_features;
    std::vector<int> eval_labels;
};

inline LabeledSplit split_labeled(const LabeledDataset& dataset,
                                  double eval_fraction,
                                  std::uint64_t run_seed) {
    const auto [eval_idx, pool_idx] =
        detail::split_order(dataset.features.rows, eval_fraction, run_seed);
    LabeledSplit split;
    split.eval_features = dataset.features.gather_rows(eval_idx);
    split.query_pool = dataset.features.gather_rows(pool_idx);
    split.eval_labels.reserve(eval_idx.size());
    for (int i : eval_idx) {
        split.eval_labels.push_back(dataset.labels[static_cast<std::size_t>(i)]);
    }
    split.pool_labels.reserve(pool_idx.size());
    for (int i : pool_idx) {
        split.pool_labels.push_back(dataset.labels[static_cast<std::size_t>(i)]);
    }
    return split;
}

}  // namespace pwln
