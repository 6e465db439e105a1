// Copyright 2026 The pwln-interp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Independent region-counting oracles used to certify the closed-form
// bounds: an exact incremental count for 2-D line arrangements (the
// single-layer case) and a sampled activation-pattern count for anything
// small enough to grid.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "pwln/detail/common.hpp"
#include "pwln/nn.hpp"

namespace pwln {

inline constexpr int kExactPlaneCap = 64;
// Two lines count as parallel when the cross product of their unit
// normals is below this.
inline constexpr double kParallelTolerance = 1e-12;
// Two intersection points coincide when equal within this, relative to
// the larger coordinate magnitude (equivalently the arrangement's scale).
inline constexpr double kPointCoincidenceTolerance = 1e-9;

// Line in the plane: normal . x + offset = 0.
struct Hyperplane2D {
    std::array<double, 2> normal{0.0, 0.0};
    double offset = 0.0;
};

// Exact number of open cells of a 2-D line arrangement.
//
// Incremental construction: one line splits the plane into 2 regions, and
// each further line adds 1 + (number of distinct points where it meets the
// lines already present).  Coincident duplicates add nothing; parallel
// lines meet nothing; concurrent lines share one point and therefore add
// less than general position would.
inline long count_regions_exact_2d(const std::vector<Hyperplane2D>& planes) {
    if (planes.size() > static_cast<std::size_t>(kExactPlaneCap)) {
        throw std::invalid_argument(detail::cat(
            "count_regions_exact_2d: ", planes.size(),
            " planes exceed the cap of ", kExactPlaneCap));
    }
    struct Line {
        double ux, uy, d;  // unit normal and scaled offset
    };
    std::vector<Line> accepted;
    long regions = 1;
    for (std::size_t i = 0; i < planes.size(); ++i) {
        const auto& p = planes[i];
        const double norm = std::hypot(p.normal[0], p.normal[1]);
        if (!(norm > kParallelTolerance)) {
            throw std::invalid_argument(detail::cat(
                "count_regions_exact_2d: plane ", i,
                " has a degenerate normal (norm <= ", kParallelTolerance,
                ")"));
        }
        const Line line{p.normal[0] / norm, p.normal[1] / norm,
                        p.offset / norm};

        bool coincident = false;
        for (const Line& other : accepted) {
            const double cross = line.ux * other.uy - line.uy * other.ux;
            if (std::abs(cross) >= kParallelTolerance) continue;
            // Parallel; coincident iff the signed offsets agree after
            // aligning normal orientation.
            const double sign =
                (line.ux * other.ux + line.uy * other.uy) > 0.0 ? 1.0 : -1.0;
            if (std::abs(line.d - sign * other.d) <=
                kPointCoincidenceTolerance *
                    std::max(1.0, std::abs(line.d))) {
                coincident = true;
                break;
            }
        }
        if (coincident) continue;

        std::vector<std::array<double, 2>> points;
        for (const Line& other : accepted) {
            const double det = line.ux * other.uy - line.uy * other.ux;
            if (std::abs(det) < kParallelTolerance) continue;
            const double px = (-line.d * other.uy + other.d * line.uy) / det;
            const double py = (-line.ux * other.d + other.ux * line.d) / det;
            bool fresh = true;
            for (const auto& q : points) {
                const double scale = std::max(
                    {1.0, std::abs(px), std::abs(py), std::abs(q[0]),
                     std::abs(q[1])});
                if (std::abs(px - q[0]) <=
                        kPointCoincidenceTolerance * scale &&
                    std::abs(py - q[1]) <=
                        kPointCoincidenceTolerance * scale) {
                    fresh = false;
                    break;
                }
            }
            if (fresh) points.push_back({px, py});
        }
        regions += 1 + static_cast<long>(points.size());
        accepted.push_back(line);
    }
    return regions;
}

// Axis-aligned sampling box, one (lo, hi) pair per input dimension.
struct InputBox {
    std::vector<double> lo;
    std::vector<double> hi;
};

// Number of distinct hidden-unit on/off patterns over a regular grid in
// the box.  `resolution` points per axis, placed at the left edges of
// `resolution` equal subdivisions (a half-open grid): refining the
// resolution by an integer factor keeps every existing sample point, so
// the count is monotone under doubling.  Always a lower estimate of the
// true region count.
inline long count_activation_patterns_grid(const MlpModel& model,
                                           const InputBox& box,
                                           int resolution) {
    model.validate();
    const int dim = model.architecture.input_dim;
    if (dim > 3) {
        throw std::invalid_argument(detail::cat(
            "count_activation_patterns_grid: input_dim ", dim,
            " exceeds the cap of 3"));
    }
    if (resolution < 2) {
        throw std::invalid_argument(detail::cat(
            "count_activation_patterns_grid: resolution must be >= 2, got ",
            resolution));
    }
    if (box.lo.size() != static_cast<std::size_t>(dim) ||
        box.hi.size() != static_cast<std::size_t>(dim)) {
        throw std::invalid_argument(detail::cat(
            "count_activation_patterns_grid: box has ", box.lo.size(), "/",
            box.hi.size(), " bounds, model expects ", dim));
    }
    for (int a = 0; a < dim; ++a) {
        const auto i = static_cast<std::size_t>(a);
        if (!(box.lo[i] < box.hi[i])) {
            throw std::invalid_argument(detail::cat(
                "count_activation_patterns_grid: axis ", a, " bounds [",
                box.lo[i], ",", box.hi[i], ") are empty"));
        }
    }

    std::unordered_set<std::string> patterns;
    std::vector<int> index(static_cast<std::size_t>(dim), 0);
    std::vector<double> x(static_cast<std::size_t>(dim), 0.0);
    for (;;) {
        for (std::size_t a = 0; a < x.size(); ++a) {
            x[a] = box.lo[a] + static_cast<double>(index[a]) *
                                   (box.hi[a] - box.lo[a]) /
                                   static_cast<double>(resolution);
        }
        const std::vector<std::uint8_t> bits = activation_pattern(model, x);
        patterns.emplace(bits.begin(), bits.end());
        // Odometer over grid indices.
        std::size_t axis = 0;
        while (axis < index.size()) {
            if (++index[axis] < resolution) break;
            index[axis] = 0;
            ++axis;
        }
        if (axis == index.size()) break;
    }
    return static_cast<long>(patterns.size());
}

// First hidden layer of a 2-D-input model as a line arrangement: row w of
// the layer and its bias b give the line w . x + b = 0.
inline std::vector<Hyperplane2D> first_layer_hyperplanes(
    const MlpModel& model) {
    model.validate();
    if (model.architecture.input_dim != 2) {
        throw std::invalid_argument(detail::cat(
            "first_layer_hyperplanes: input_dim must be 2, got ",
            model.architecture.input_dim));
    }
    std::vector<Hyperplane2D> planes;
    const Matrix& w = model.weights[0];
    for (std::size_t r = 0; r < w.rows; ++r) {
        planes.push_back(
            Hyperplane2D{{w(r, 0), w(r, 1)}, model.biases[0][r]});
    }
    return planes;
}

}  // namespace pwln
