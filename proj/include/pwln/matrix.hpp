// Copyright 2026 The pwln-interp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "pwln/detail/common.hpp"

namespace pwln {

// Dense row-major matrix of doubles.  Deliberately minimal: the networks
// here are small enough that clarity beats BLAS.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) {
        return data[r * cols + c];
    }
    double operator()(std::size_t r, std::size_t c) const {
        return data[r * cols + c];
    }

    std::span<double> row(std::size_t r) {
        return std::span<double>(data).subspan(r * cols, cols);
    }
    std::span<const double> row(std::size_t r) const {
        return std::span<const double>(data).subspan(r * cols, cols);
    }

    // Gathers the given rows into a new matrix, preserving order.
    Matrix gather_rows(std::span<const int> indices) const {
        Matrix out(indices.size(), cols);
        for (std::size_t i = 0; i < indices.size(); ++i) {
            const int r = indices[i];
            if (r < 0 || static_cast<std::size_t>(r) >= rows) {
                throw std::out_of_range(detail::cat(
                    "Matrix::gather_rows: index ", r, " outside [0,", rows,
                    ")"));
            }
            auto src = row(static_cast<std::size_t>(r));
            std::copy(src.begin(), src.end(), out.row(i).begin());
        }
        return out;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;
};

}  // namespace pwln
