// Copyright 2026 The pwln-interp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Closed-form bounds on the number of linear regions (complexity) of a
// ReLU network, on the number of distinct labelings of those regions
// (entropy), and on the entropy ratio between two networks
// (interpretability).  Upper bounds follow Zaslavsky's hyperplane
// arrangement theorem and the Serra et al. index-set refinement for deep
// nets; lower bounds follow the Montufar et al. folding construction with
// a chromatic-polynomial labeling count.

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pwln/architecture.hpp"
#include "pwln/logmath.hpp"

namespace pwln {

// Cap on the depth-first enumeration of the deep upper bound's index set.
inline constexpr long kUpperBoundTupleCap = 10'000'000;

// The lower bound of a single-layer network: the tight L=1 reduction of
// the deep formula (default), or the literature's trivial value of 1.
enum class SingleLayerLowerConvention { deep_formula, table_value_one };

// Two algebraically equal ways to evaluate entropy_lower; kept separate so
// they can be checked against each other.
enum class EntropyLowerForm { product_form, closed_form };

// The average-case interpretability: ratio of average-case entropies
// (default), or the closed exponent form in total neuron counts.  The two
// disagree in general; the ratio form follows from the entropy bounds
// themselves, so it is the default.
enum class AverageInterpretabilityVariant { entropy_ratio, neuron_count_exponent };

namespace detail {

// sum_{j=0}^{kmax} C(h, j) in log domain, ascending j.  Terms with j > h
// are exact zeros and leave the accumulator bit-for-bit unchanged, so two
// callers summing to different kmax beyond h agree exactly.
inline LogQuantity zaslavsky_sum(long h, long kmax) {
    LogQuantity total = LogQuantity::zero();
    for (long j = 0; j <= kmax; ++j) {
        total += log2_binomial(h, j);
    }
    return total;
}

inline void require_lower_bound_eligible(const PwlnArchitecture& arch,
                                         const char* op) {
    for (std::size_t l = 0; l < arch.layer_widths.size(); ++l) {
        if (arch.layer_widths[l] < arch.input_dim) {
            throw std::domain_error(cat(
                op, ": architecture \"", to_literal(arch),
                "\" is not lower-bound eligible: layer ", l + 1, " width ",
                arch.layer_widths[l], " is below input_dim ", arch.input_dim));
        }
    }
}

}  // namespace detail

// Maximum number of linear regions.
//
// L = 1 is Zaslavsky's bound for h hyperplanes in n0 dimensions,
// sum_{s=0}^{n0} C(h, s).  Deeper nets use the index-set bound
// sum_J prod_l C(n_l, j_l) over J = {(j_1..j_L) : 0 <= j_l <=
// min(n0, n_1 - j_1, ..., n_{l-1} - j_{l-1}, n_l)}, enumerated
// depth-first.
inline LogQuantity complexity_upper(const PwlnArchitecture& arch) {
    arch.validate();
    const std::vector<int>& w = arch.layer_widths;
    if (arch.depth() == 1) {
        return detail::zaslavsky_sum(w[0], arch.input_dim);
    }
    long tuples = 0;
    LogQuantity total = LogQuantity::zero();
    auto enumerate = [&](auto&& self, std::size_t level, long slack,
                         LogQuantity prod) -> void {
        if (level == w.size()) {
            if (++tuples > kUpperBoundTupleCap) {
                throw std::length_error(detail::cat(
                    "complexity_upper: index-set enumeration for \"",
                    to_literal(arch), "\" exceeds ", kUpperBoundTupleCap,
                    " tuples"));
            }
            total += prod;
            return;
        }
        const long width = w[level];
        const long jmax = std::min(slack, width);
        for (long j = 0; j <= jmax; ++j) {
            self(self, level + 1, std::min(slack, width - j),
                 prod * log2_binomial(width, j));
        }
    };
    enumerate(enumerate, 0, arch.input_dim, LogQuantity::one());
    return total;
}

// Montufar-style lower bound on the number of linear regions:
// (prod_{i<L} floor(n_i/n0)^{n0}) * sum_{j=0}^{n0} C(n_L, j).
// Requires every layer at least input_dim wide.  A single-layer network
// that fails that requirement falls back to the trivial bound 1, as does
// the table_value_one convention.
inline LogQuantity complexity_lower(
    const PwlnArchitecture& arch,
    SingleLayerLowerConvention convention =
        SingleLayerLowerConvention::deep_formula) {
    arch.validate();
    const std::vector<int>& w = arch.layer_widths;
    const int L = arch.depth();
    if (convention == SingleLayerLowerConvention::table_value_one && L == 1) {
        return LogQuantity::one();
    }
    if (!arch.lower_bound_eligible()) {
        if (L == 1) return LogQuantity::one();
        detail::require_lower_bound_eligible(arch, "complexity_lower");
    }
    LogQuantity prod = LogQuantity::one();
    for (int l = 0; l + 1 < L; ++l) {
        prod *= LogQuantity::from_value(
                    static_cast<double>(w[static_cast<std::size_t>(l)] /
                                        arch.input_dim))
                    .pow(arch.input_dim);
    }
    return prod *
           detail::zaslavsky_sum(w[static_cast<std::size_t>(L - 1)],
                                 arch.input_dim);
}

// Average-case number of linear regions: (total neurons)^{n0} for n0 > 1;
// for n0 = 1 the count is dataset-size dependent, n * T * total with T = 1
// breakpoint per ReLU.
inline LogQuantity complexity_average(const PwlnArchitecture& arch,
                                      long dataset_size = 1) {
    arch.validate();
    if (dataset_size < 1) {
        throw std::invalid_argument(detail::cat(
            "complexity_average: dataset_size must be >= 1, got ",
            dataset_size));
    }
    const double total = static_cast<double>(arch.total_hidden_neurons());
    if (arch.input_dim > 1) {
        return LogQuantity::from_value(total).pow(arch.input_dim);
    }
    return LogQuantity::from_value(static_cast<double>(dataset_size)) *
           LogQuantity::from_value(total);
}

// log2(H) for H = c^C, without materializing C as an integer.  C is
// reconstructed from its log2 in extended precision; the relative error of
// the result is <= 1e-6 over the whole representable range (in practice a
// few 1e-13).  Throws when log2(H) itself leaves double range.
inline LogQuantity entropy_from_complexity(const LogQuantity& complexity,
                                           int class_count) {
    if (class_count < 2) {
        throw std::invalid_argument(detail::cat(
            "entropy bound: class_count must be >= 2, got ", class_count));
    }
    const long double c_value =
        std::exp2(static_cast<long double>(complexity.log2()));
    const long double lg =
        c_value * std::log2(static_cast<long double>(class_count));
    const double lg_double = static_cast<double>(lg);
    if (!std::isfinite(lg_double)) {
        throw std::overflow_error(detail::cat(
            "entropy bound: log2(H) = C*log2(c) overflows double for log2(C)=",
            complexity.log2()));
    }
    return LogQuantity::from_log2(lg_double);
}

inline LogQuantity entropy_upper(const PwlnArchitecture& arch) {
    return entropy_from_complexity(complexity_upper(arch), arch.class_count);
}

inline LogQuantity entropy_average(const PwlnArchitecture& arch,
                                   long dataset_size = 1) {
    return entropy_from_complexity(complexity_average(arch, dataset_size),
                                   arch.class_count);
}

// Fold counts per input dimension used by the entropy lower bound: layer
// l < L contributes floor(n_l/n0) folds, the last layer its full width.
// Each count p induces a path graph whose proper c-colorings number
// c*(c-1)^(p-1), the per-dimension labeling factor.
inline std::vector<long> entropy_lower_path_lengths(
    const PwlnArchitecture& arch) {
    arch.validate();
    std::vector<long> lengths;
    const std::vector<int>& w = arch.layer_widths;
    for (std::size_t l = 0; l + 1 < w.size(); ++l) {
        lengths.push_back(w[l] / arch.input_dim);
    }
    lengths.push_back(w.back());
    return lengths;
}

// Lower bound on the number of distinct region labelings:
//   product form: prod_{l=1}^{L-1} c(c-1)^{(floor(n_l/n0)-1) n0}
//                 * c(c-1)^{(n_L-1) n0}
//   closed form:  c^L (c-1)^{(n_L-L) n0} * prod_{l<L} (c-1)^{floor(n_l/n0) n0}
// The two are algebraically equal; both are kept so they can be checked
// against each other.
inline LogQuantity entropy_lower(
    const PwlnArchitecture& arch,
    EntropyLowerForm form = EntropyLowerForm::product_form) {
    arch.validate();
    detail::require_lower_bound_eligible(arch, "entropy_lower");
    const double n0 = static_cast<double>(arch.input_dim);
    const double c = static_cast<double>(arch.class_count);
    const int L = arch.depth();

    if (form == EntropyLowerForm::product_form) {
        LogQuantity result = LogQuantity::one();
        for (long p : entropy_lower_path_lengths(arch)) {
            result *= LogQuantity::from_value(c) *
                      LogQuantity::from_value(c - 1).pow(
                          static_cast<double>(p - 1) * n0);
        }
        return result;
    }
    const std::vector<int>& w = arch.layer_widths;
    LogQuantity result =
        LogQuantity::from_value(c).pow(L) *
        LogQuantity::from_value(c - 1).pow(
            static_cast<double>(w.back() - L) * n0);
    for (std::size_t l = 0; l + 1 < w.size(); ++l) {
        result *= LogQuantity::from_value(c - 1).pow(
            static_cast<double>(w[l] / arch.input_dim) * n0);
    }
    return result;
}

struct BoundTriple {
    LogQuantity lower;
    LogQuantity average;
    LogQuantity upper;
};

inline BoundTriple complexity_bounds(
    const PwlnArchitecture& arch, long dataset_size = 1,
    SingleLayerLowerConvention convention =
        SingleLayerLowerConvention::deep_formula) {
    BoundTriple t{complexity_lower(arch, convention),
                  complexity_average(arch, dataset_size),
                  complexity_upper(arch)};
    if (t.upper < t.lower) {
        throw std::logic_error("complexity_bounds: lower exceeds upper");
    }
    return t;
}

inline BoundTriple entropy_bounds(
    const PwlnArchitecture& arch, long dataset_size = 1,
    EntropyLowerForm form = EntropyLowerForm::product_form) {
    BoundTriple t{entropy_lower(arch, form),
                  entropy_average(arch, dataset_size), entropy_upper(arch)};
    if (t.upper < t.lower) {
        throw std::logic_error("entropy_bounds: lower exceeds upper");
    }
    return t;
}

struct InterpretabilityBounds {
    double lower = 0.0;
    double average = 0.0;
    double upper = 0.0;
};

namespace detail {

// min(1, num/den) evaluated as a log2 difference.
inline double clamped_log_ratio(const LogQuantity& num,
                                const LogQuantity& den) {
    if (num.is_zero()) return den.is_zero() ? 1.0 : 0.0;
    if (den.is_zero()) return 1.0;
    const double d = num.log2() - den.log2();
    return d >= 0.0 ? 1.0 : std::exp2(d);
}

}  // namespace detail

// Bounds on the interpretability of network B through network A, defined
// as entropy ratios clamped at 1:
//   upper = min(1, upper H_A / lower H_B)
//   lower = min(1, lower H_A / upper H_B)
//   average = min(1, average H_A / average H_B)   (entropy_ratio variant)
// The neuron_count_exponent variant replaces the average case with
// c^{-n (total_B^{n0} - total_A^{n0})}, clamped at 1.
inline InterpretabilityBounds interpretability_bounds(
    const PwlnArchitecture& arch_a, const PwlnArchitecture& arch_b,
    long dataset_size = 1,
    AverageInterpretabilityVariant variant =
        AverageInterpretabilityVariant::entropy_ratio) {
    arch_a.validate();
    arch_b.validate();
    if (arch_a.class_count != arch_b.class_count) {
        throw std::invalid_argument(detail::cat(
            "interpretability_bounds: class counts differ (",
            arch_a.class_count, " vs ", arch_b.class_count, ")"));
    }
    InterpretabilityBounds out;
    out.upper =
        detail::clamped_log_ratio(entropy_upper(arch_a), entropy_lower(arch_b));
    out.lower =
        detail::clamped_log_ratio(entropy_lower(arch_a), entropy_upper(arch_b));
    if (variant == AverageInterpretabilityVariant::entropy_ratio) {
        out.average =
            detail::clamped_log_ratio(entropy_average(arch_a, dataset_size),
                                      entropy_average(arch_b, dataset_size));
    } else {
        if (arch_a.input_dim != arch_b.input_dim) {
            throw std::invalid_argument(
                "interpretability_bounds: the neuron_count_exponent variant "
                "requires matching input_dim");
        }
        const double n0 = static_cast<double>(arch_a.input_dim);
        const double pow_a = std::pow(
            static_cast<double>(arch_a.total_hidden_neurons()), n0);
        const double pow_b = std::pow(
            static_cast<double>(arch_b.total_hidden_neurons()), n0);
        const double lg = -static_cast<double>(dataset_size) *
                          (pow_b - pow_a) *
                          std::log2(static_cast<double>(arch_a.class_count));
        out.average = lg >= 0.0 ? 1.0 : std::exp2(lg);
    }
    return out;
}

}  // namespace pwln
