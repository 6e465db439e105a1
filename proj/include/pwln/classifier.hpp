// Copyright 2026 The pwln-interp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pwln/matrix.hpp"

namespace pwln {

// Per-row class probability vector.
using ProbVector = std::vector<double>;

inline bool is_valid_prob_vector(const ProbVector& p, double tol = 1e-6) {
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0) || v > 1.0 + tol) return false;
        sum += v;
    }
    return std::abs(sum - 1.0) <= tol;
}

// Index of the largest entry; ties resolve to the lowest index.
inline int argmax_index(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("argmax_index: empty vector");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return static_cast<int>(best);
}

// Common capability of every model that can play either side of an
// interpretation run: train on hard labels (or, where supported, on soft
// probability targets) and emit per-row probability distributions.
class Classifier {
public:
    virtual ~Classifier() = default;

    virtual std::string kind() const = 0;
    virtual int class_count() const = 0;
    virtual bool fitted() const = 0;

    virtual void fit(const Matrix& features,
                     const std::vector<int>& labels) = 0;

    virtual bool supports_soft_targets() const { return false; }
    virtual void fit_soft(const Matrix& /*features*/,
                          const std::vector<ProbVector>& /*targets*/) {
        throw std::logic_error(
            detail::cat("fit_soft: ", kind(), " has no soft-target mode"));
    }

    // Requires fitted(); implementations must throw otherwise.
    virtual std::vector<ProbVector> predict_proba(
        const Matrix& features) const = 0;

    // Probabilities in the model's pre-training state.  Models without
    // meaningful initial parameters report the uniform distribution.
    virtual std::vector<ProbVector> initial_proba(
        const Matrix& features) const {
        const double p = 1.0 / static_cast<double>(class_count());
        return std::vector<ProbVector>(
            features.rows, ProbVector(static_cast<std::size_t>(class_count()),
                                      p));
    }

protected:
    void require_fitted(const char* op) const {
        if (!fitted()) {
            throw std::logic_error(
                detail::cat(op, ": ", kind(), " model is not fitted"));
        }
    }
};

}  // namespace pwln
