// Copyright 2026 The pwln-interp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pwln/detail/common.hpp"
#include "pwln/matrix.hpp"
#include "pwln/nn.hpp"

namespace pwln {

// Per-feature (min, max) captured from a training split so the identical
// affine map can be replayed on held-out rows.
struct NormalizationStats {
    std::vector<double> feature_min;
    std::vector<double> feature_max;

    bool empty() const { return feature_min.empty(); }
};

struct LabeledDataset {
    Matrix features;
    std::vector<int> labels;
    int class_count = 0;
    NormalizationStats normalization;  // empty when raw
    std::string provenance;

    void validate() const {
        if (features.rows == 0) {
            throw std::invalid_argument("LabeledDataset: no samples");
        }
        if (features.rows != labels.size()) {
            throw std::invalid_argument(detail::cat(
                "LabeledDataset: ", features.rows, " feature rows vs ",
                labels.size(), " labels"));
        }
        if (class_count < 2) {
            throw std::invalid_argument(detail::cat(
                "LabeledDataset: class_count must be >= 2, got ",
                class_count));
        }
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] < 0 || labels[i] >= class_count) {
                throw std::invalid_argument(detail::cat(
                    "LabeledDataset: label ", labels[i], " at row ", i,
                    " outside [0, ", class_count, ")"));
            }
        }
    }
};

namespace detail {

inline std::uint32_t read_u32_be(std::ifstream& in, const std::string& path,
                                 std::uint64_t offset) {
    unsigned char bytes[4];
    in.read(reinterpret_cast<char*>(bytes), 4);
    if (in.gcount() != 4) {
        throw std::runtime_error(cat("idx read: ", path, ": truncated at offset ",
                                     offset, " (expected 4 header bytes)"));
    }
    return (static_cast<std::uint32_t>(bytes[0]) << 24) |
           (static_cast<std::uint32_t>(bytes[1]) << 16) |
           (static_cast<std::uint32_t>(bytes[2]) << 8) |
           static_cast<std::uint32_t>(bytes[3]);
}

inline void write_u32_be(std::ofstream& out, std::uint32_t value) {
    const unsigned char bytes[4] = {
        static_cast<unsigned char>(value >> 24),
        static_cast<unsigned char>(value >> 16),
        static_cast<unsigned char>(value >> 8),
        static_cast<unsigned char>(value)};
    out.write(reinterpret_cast<const char*>(bytes), 4);
}

inline std::ifstream open_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error(cat("idx read: cannot open ", path));
    }
    return in;
}

}  // namespace detail

constexpr std::uint32_t kIdxImageMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

// Parses a pair of big-endian IDX files: a 3-D unsigned-byte image tensor
// and a 1-D label vector.  Pixels are flattened row-major and kept in
// [0, 255]; pair with minmax_normalize for unit-range features.
inline LabeledDataset load_idx(const std::string& images_path,
                               const std::string& labels_path) {
    std::ifstream images = detail::open_binary(images_path);
    const std::uint32_t image_magic =
        detail::read_u32_be(images, images_path, 0);
    if (image_magic != kIdxImageMagic) {
        throw std::runtime_error(detail::cat(
            "idx read: ", images_path, ": bad magic 0x", std::hex,
            image_magic, " at offset 0 (expected 0x803 image tensor)"));
    }
    const std::uint32_t n_images = detail::read_u32_be(images, images_path, 4);
    const std::uint32_t rows = detail::read_u32_be(images, images_path, 8);
    const std::uint32_t cols = detail::read_u32_be(images, images_path, 12);
    if (n_images == 0 || rows == 0 || cols == 0) {
        throw std::runtime_error(detail::cat(
            "idx read: ", images_path, ": degenerate dimensions ", n_images,
            "x", rows, "x", cols));
    }

    std::ifstream labels_in = detail::open_binary(labels_path);
    const std::uint32_t label_magic =
        detail::read_u32_be(labels_in, labels_path, 0);
    if (label_magic != kIdxLabelMagic) {
        throw std::runtime_error(detail::cat(
            "idx read: ", labels_path, ": bad magic 0x", std::hex, label_magic,
            " at offset 0 (expected 0x801 label vector)"));
    }
    const std::uint32_t n_labels =
        detail::read_u32_be(labels_in, labels_path, 4);
    if (n_labels != n_images) {
        throw std::runtime_error(detail::cat(
            "idx read: count mismatch: ", images_path, " holds ", n_images,
            " images but ", labels_path, " holds ", n_labels, " labels"));
    }

    const std::size_t pixel_count =
        static_cast<std::size_t>(n_images) * rows * cols;
    std::vector<unsigned char> pixels(pixel_count);
    images.read(reinterpret_cast<char*>(pixels.data()),
                static_cast<std::streamsize>(pixel_count));
    if (static_cast<std::size_t>(images.gcount()) != pixel_count) {
        throw std::runtime_error(detail::cat(
            "idx read: ", images_path, ": truncated at offset ",
            16 + static_cast<std::uint64_t>(images.gcount()), " (expected ",
            pixel_count, " payload bytes)"));
    }

    std::vector<unsigned char> raw_labels(n_labels);
    labels_in.read(reinterpret_cast<char*>(raw_labels.data()),
                   static_cast<std::streamsize>(n_labels));
    if (static_cast<std::size_t>(labels_in.gcount()) != n_labels) {
        throw std::runtime_error(detail::cat(
            "idx read: ", labels_path, ": truncated at offset ",
            8 + static_cast<std::uint64_t>(labels_in.gcount()), " (expected ",
            n_labels, " payload bytes)"));
    }

    LabeledDataset dataset;
    dataset.features = Matrix(n_images, static_cast<std::size_t>(rows) * cols);
    for (std::size_t i = 0; i < pixel_count; ++i) {
        dataset.features.data[i] = static_cast<double>(pixels[i]);
    }
    dataset.labels.resize(n_labels);
    int max_label = 0;
    for (std::size_t i = 0; i < raw_labels.size(); ++i) {
        dataset.labels[i] = static_cast<int>(raw_labels[i]);
        max_label = std::max(max_label, dataset.labels[i]);
    }
    dataset.class_count = std::max(2, max_label + 1);
    dataset.provenance =
        detail::cat("idx:images=", images_path, ",labels=", labels_path);
    dataset.validate();
    return dataset;
}

// Writers for the same format, used to synthesize fixtures and round-trip
// the loader bit-exactly.
inline void write_idx_images(const std::string& path, std::uint32_t count,
                             std::uint32_t rows, std::uint32_t cols,
                             const std::vector<unsigned char>& pixels) {
    if (pixels.size() != static_cast<std::size_t>(count) * rows * cols) {
        throw std::invalid_argument(detail::cat(
            "idx write: ", path, ": ", pixels.size(), " pixels for ", count,
            "x", rows, "x", cols, " tensor"));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error(detail::cat("idx write: cannot open ", path));
    }
    detail::write_u32_be(out, kIdxImageMagic);
    detail::write_u32_be(out, count);
    detail::write_u32_be(out, rows);
    detail::write_u32_be(out, cols);
    out.write(reinterpret_cast<const char*>(pixels.data()),
              static_cast<std::streamsize>(pixels.size()));
    if (!out) {
        throw std::runtime_error(detail::cat("idx write: failed on ", path));
    }
}

inline void write_idx_labels(const std::string& path,
                             const std::vector<unsigned char>& labels) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error(detail::cat("idx write: cannot open ", path));
    }
    detail::write_u32_be(out, kIdxLabelMagic);
    detail::write_u32_be(out, static_cast<std::uint32_t>(labels.size()));
    out.write(reinterpret_cast<const char*>(labels.data()),
              static_cast<std::streamsize>(labels.size()));
    if (!out) {
        throw std::runtime_error(detail::cat("idx write: failed on ", path));
    }
}

// Maps each feature to (x - min) / (max - min); constant features map to 0.
// The captured stats make the transform idempotent and replayable.
inline NormalizationStats compute_minmax_stats(const Matrix& features) {
    NormalizationStats stats;
    stats.feature_min.assign(features.cols,
                             std::numeric_limits<double>::infinity());
    stats.feature_max.assign(features.cols,
                             -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < features.rows; ++i) {
        for (std::size_t j = 0; j < features.cols; ++j) {
            stats.feature_min[j] = std::min(stats.feature_min[j],
                                            features(i, j));
            stats.feature_max[j] = std::max(stats.feature_max[j],
                                            features(i, j));
        }
    }
    return stats;
}

// Replays a captured transform; `clamp` pins held-out rows into [0, 1] when
// they fall outside the training range.
inline void apply_normalization(Matrix& features,
                                const NormalizationStats& stats, bool clamp) {
    if (stats.feature_min.size() != features.cols) {
        throw std::invalid_argument(detail::cat(
            "apply_normalization: stats cover ", stats.feature_min.size(),
            " features but matrix has ", features.cols));
    }
    for (std::size_t i = 0; i < features.rows; ++i) {
        for (std::size_t j = 0; j < features.cols; ++j) {
            const double span = stats.feature_max[j] - stats.feature_min[j];
            double& x = features(i, j);
            x = span == 0.0 ? 0.0 : (x - stats.feature_min[j]) / span;
            if (clamp) x = std::clamp(x, 0.0, 1.0);
        }
    }
}

// Inverse of apply_normalization on non-constant features; constant
// features cannot be recovered and return the stored minimum.
inline void invert_normalization(Matrix& features,
                                 const NormalizationStats& stats) {
    if (stats.feature_min.size() != features.cols) {
        throw std::invalid_argument(detail::cat(
            "invert_normalization: stats cover ", stats.feature_min.size(),
            " features but matrix has ", features.cols));
    }
    for (std::size_t i = 0; i < features.rows; ++i) {
        for (std::size_t j = 0; j < features.cols; ++j) {
            const double span = stats.feature_max[j] - stats.feature_min[j];
            double& x = features(i, j);
            x = stats.feature_min[j] + x * span;
        }
    }
}

inline LabeledDataset minmax_normalize(LabeledDataset dataset) {
    // A second application sees the already-captured stats and replays
    // nothing new: re-derive stats only from raw data.
    if (dataset.normalization.empty()) {
        dataset.normalization = compute_minmax_stats(dataset.features);
        apply_normalization(dataset.features, dataset.normalization,
                            /*clamp=*/false);
    }
    return dataset;
}

struct FoldSplit {
    std::vector<std::vector<int>> folds;
};

// Seeded shuffle of [0, n) followed by a contiguous partition into k folds
// whose sizes differ by at most one (the first n mod k folds are larger).
inline FoldSplit kfold_split(std::size_t n, int k, std::uint64_t seed) {
    if (k < 2) {
        throw std::invalid_argument(
            detail::cat("kfold_split: k must be >= 2, got ", k));
    }
    if (static_cast<std::size_t>(k) > n) {
        throw std::invalid_argument(
            detail::cat("kfold_split: k=", k, " exceeds n=", n));
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(detail::mix_seed(seed, 0x666f6c64));  // "fold"
    detail::shuffle_indices(order, rng);

    FoldSplit split;
    split.folds.resize(static_cast<std::size_t>(k));
    const std::size_t base = n / static_cast<std::size_t>(k);
    const std::size_t extra = n % static_cast<std::size_t>(k);
    std::size_t cursor = 0;
    for (std::size_t f = 0; f < split.folds.size(); ++f) {
        const std::size_t size = base + (f < extra ? 1 : 0);
        split.folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(cursor),
                              order.begin() +
                                  static_cast<std::ptrdiff_t>(cursor + size));
        cursor += size;
    }
    return split;
}

// Gaussian clusters with class centers evenly spaced on a circle of radius
// `spread`; labels cycle 0..classes-1 so counts are balanced within one.
inline LabeledDataset make_blobs(std::size_t n, int classes, double spread,
                                 double noise_std, std::uint64_t seed) {
    if (classes < 2) {
        throw std::invalid_argument(
            detail::cat("make_blobs: classes must be >= 2, got ", classes));
    }
    if (n < static_cast<std::size_t>(classes)) {
        throw std::invalid_argument(detail::cat(
            "make_blobs: n=", n, " smaller than class count ", classes));
    }
    if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) {
        throw std::invalid_argument("make_blobs: noise std must be finite and >= 0");
    }
    LabeledDataset dataset;
    dataset.features = Matrix(n, 2);
    dataset.labels.resize(n);
    dataset.class_count = classes;
    std::mt19937_64 rng(detail::mix_seed(seed, 0x626c6f62));  // "blob"
    const double tau = 2.0 * std::acos(-1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const int label = static_cast<int>(i % static_cast<std::size_t>(classes));
        const double angle = tau * label / classes;
        dataset.features(i, 0) =
            spread * std::cos(angle) + noise_std * detail::standard_normal(rng);
        dataset.features(i, 1) =
            spread * std::sin(angle) + noise_std * detail::standard_normal(rng);
        dataset.labels[i] = label;
    }
    dataset.provenance = detail::cat("blobs:n=", n, ",c=", classes,
                                     ",spread=", spread, ",std=", noise_std,
                                     ",seed=", seed);
    dataset.validate();
    return dataset;
}

// Two interleaved Archimedean spirals; class 1 is class 0 rotated by pi.
inline LabeledDataset make_spirals(std::size_t n, double turns, double noise_std,
                                   std::uint64_t seed) {
    if (n < 2) {
        throw std::invalid_argument(
            detail::cat("make_spirals: need n >= 2, got ", n));
    }
    if (!(turns > 0.0) || !std::isfinite(turns)) {
        throw std::invalid_argument("make_spirals: turns must be finite and > 0");
    }
    if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) {
        throw std::invalid_argument(
            "make_spirals: noise std must be finite and >= 0");
    }
    LabeledDataset dataset;
    dataset.features = Matrix(n, 2);
    dataset.labels.resize(n);
    dataset.class_count = 2;
    std::mt19937_64 rng(detail::mix_seed(seed, 0x73706972));  // "spir"
    const double pi = std::acos(-1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const int label = static_cast<int>(i % 2);
        // t spans (0, 1]: radius grows linearly, angle sweeps `turns` turns.
        const double t =
            static_cast<double>(i / 2 + 1) / static_cast<double>((n + 1) / 2);
        const double angle = turns * 2.0 * pi * t + (label == 1 ? pi : 0.0);
        const double radius = 3.0 * t;
        dataset.features(i, 0) = radius * std::cos(angle) +
                                 noise_std * detail::standard_normal(rng);
        dataset.features(i, 1) = radius * std::sin(angle) +
                                 noise_std * detail::standard_normal(rng);
        dataset.labels[i] = label;
    }
    dataset.provenance = detail::cat("spirals:n=", n, ",turns=", turns,
                                     ",std=", noise_std, ",seed=", seed);
    dataset.validate();
    return dataset;
}

namespace detail {

// Key=value parser for generator spec strings; every key must be consumed
// exactly once by the caller.
inline std::vector<std::pair<std::string, std::string>> parse_spec_pairs(
    const std::string& body, const std::string& spec) {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::size_t pos = 0;
    while (pos < body.size()) {
        const std::size_t comma = body.find(',', pos);
        const std::string item =
            body.substr(pos, comma == std::string::npos ? std::string::npos
                                                        : comma - pos);
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw std::invalid_argument(
                cat("dataset spec \"", spec, "\": expected key=value, got \"",
                    item, "\""));
        }
        pairs.emplace_back(item.substr(0, eq), item.substr(eq + 1));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return pairs;
}

inline double spec_number(const std::string& key, const std::string& value,
                          const std::string& spec) {
    try {
        std::size_t consumed = 0;
        const double parsed = std::stod(value, &consumed);
        if (consumed != value.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return parsed;
    } catch (const std::exception&) {
        throw std::invalid_argument(cat("dataset spec \"", spec, "\": key ",
                                        key, " has non-numeric value \"",
                                        value, "\""));
    }
}

}  // namespace detail

// Builds a dataset from a CLI spec string:
//   "blobs:n=3000,c=3,std=0.5,seed=7"      (optional spread=)
//   "spirals:n=2000,turns=1.5,std=0.1,seed=7"
//   "idx:images=train-images.idx,labels=train-labels.idx"
// Relative idx paths resolve against `data_dir` when it is non-empty.
inline LabeledDataset load_dataset_spec(const std::string& spec,
                                        const std::string& data_dir = "") {
    const std::size_t colon = spec.find(':');
    if (colon == std::string::npos) {
        throw std::invalid_argument(detail::cat(
            "dataset spec \"", spec,
            "\": expected <kind>:<key=value,...> with kind one of "
            "blobs|spirals|idx"));
    }
    const std::string kind = spec.substr(0, colon);
    const auto pairs = detail::parse_spec_pairs(spec.substr(colon + 1), spec);

    auto reject_unknown = [&](const std::pair<std::string, std::string>& kv,
                              const char* allowed) {
        throw std::invalid_argument(detail::cat("dataset spec \"", spec,
                                                "\": unknown key \"", kv.first,
                                                "\" (allowed: ", allowed, ")"));
    };

    if (kind == "blobs") {
        double n = 1000, c = 3, spread = 3.0, std_dev = 0.5, seed = 0;
        for (const auto& kv : pairs) {
            if (kv.first == "n") n = detail::spec_number("n", kv.second, spec);
            else if (kv.first == "c") c = detail::spec_number("c", kv.second, spec);
            else if (kv.first == "spread")
                spread = detail::spec_number("spread", kv.second, spec);
            else if (kv.first == "std")
                std_dev = detail::spec_number("std", kv.second, spec);
            else if (kv.first == "seed")
                seed = detail::spec_number("seed", kv.second, spec);
            else reject_unknown(kv, "n,c,spread,std,seed");
        }
        return make_blobs(static_cast<std::size_t>(n), static_cast<int>(c),
                          spread, std_dev, static_cast<std::uint64_t>(seed));
    }
    if (kind == "spirals") {
        double n = 1000, turns = 1.5, std_dev = 0.1, seed = 0;
        for (const auto& kv : pairs) {
            if (kv.first == "n") n = detail::spec_number("n", kv.second, spec);
            else if (kv.first == "turns")
                turns = detail::spec_number("turns", kv.second, spec);
            else if (kv.first == "std")
                std_dev = detail::spec_number("std", kv.second, spec);
            else if (kv.first == "seed")
                seed = detail::spec_number("seed", kv.second, spec);
            else reject_unknown(kv, "n,turns,std,seed");
        }
        return make_spirals(static_cast<std::size_t>(n), turns, std_dev,
                            static_cast<std::uint64_t>(seed));
    }
    if (kind == "idx") {
        std::string images, labels;
        for (const auto& kv : pairs) {
            if (kv.first == "images") images = kv.second;
            else if (kv.first == "labels") labels = kv.second;
            else reject_unknown(kv, "images,labels");
        }
        if (images.empty() || labels.empty()) {
            throw std::invalid_argument(detail::cat(
                "dataset spec \"", spec,
                "\": idx needs both images= and labels= paths"));
        }
        auto resolve = [&](const std::string& p) {
            if (data_dir.empty() ||
                std::filesystem::path(p).is_absolute()) {
                return p;
            }
            return (std::filesystem::path(data_dir) / p).string();
        };
        return load_idx(resolve(images), resolve(labels));
    }
    throw std::invalid_argument(detail::cat(
        "dataset spec \"", spec, "\": unknown kind \"", kind,
        "\" (expected blobs|spirals|idx)"));
}

}  // namespace pwln
