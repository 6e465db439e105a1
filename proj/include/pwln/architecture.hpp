// Copyright 2026 The pwln-interp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <charconv>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pwln/detail/common.hpp"

namespace pwln {

// Shape of a fully-connected feed-forward network with piecewise-linear
// hidden units: input width, hidden widths n_1..n_L, and the number of
// output classes.  The class head is a softmax layer on top of layer L and
// is not counted in depth().
struct PwlnArchitecture {
    int input_dim = 0;                // n_0
    std::vector<int> layer_widths;    // n_1 .. n_L
    int class_count = 0;              // c

    int depth() const { return static_cast<int>(layer_widths.size()); }

    long total_hidden_neurons() const {
        long total = 0;
        for (int w : layer_widths) total += w;
        return total;
    }

    // The closed-form lower bounds require every hidden layer to be at
    // least as wide as the input.
    bool lower_bound_eligible() const {
        for (int w : layer_widths) {
            if (w < input_dim) return false;
        }
        return true;
    }

    void validate() const {
        if (input_dim < 1) {
            throw std::invalid_argument(detail::cat(
                "architecture: input_dim must be >= 1, got ", input_dim));
        }
        if (layer_widths.empty()) {
            throw std::invalid_argument(
                "architecture: at least one hidden layer is required");
        }
        for (std::size_t i = 0; i < layer_widths.size(); ++i) {
            if (layer_widths[i] < 1) {
                throw std::invalid_argument(detail::cat(
                    "architecture: layer ", i + 1, " width must be >= 1, got ",
                    layer_widths[i]));
            }
        }
        if (class_count < 2) {
            throw std::invalid_argument(detail::cat(
                "architecture: class_count must be >= 2, got ", class_count));
        }
    }

    friend bool operator==(const PwlnArchitecture&,
                           const PwlnArchitecture&) = default;
};

// Canonical literal form, e.g. "n0=2;layers=512,256;c=10".
inline std::string to_literal(const PwlnArchitecture& arch) {
    std::string s = detail::cat("n0=", arch.input_dim, ";layers=");
    for (std::size_t i = 0; i < arch.layer_widths.size(); ++i) {
        if (i > 0) s += ',';
        s += std::to_string(arch.layer_widths[i]);
    }
    s += detail::cat(";c=", arch.class_count);
    return s;
}

namespace detail {

inline int parse_positive_int(std::string_view text, std::string_view literal,
                              std::string_view what, std::size_t offset) {
    int value = 0;
    auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() ||
        text.empty()) {
        throw std::invalid_argument(cat("architecture literal \"", literal,
                                        "\": ", what, " at offset ", offset,
                                        " is not an integer: \"", text, "\""));
    }
    return value;
}

}  // namespace detail

// Parses "n0=<int>;layers=<int>[,<int>...];c=<int>".  The "c=" part may be
// omitted when default_class_count >= 2 is supplied; an explicit "c=" in
// the literal always wins.  Errors name the literal and the byte offset of
// the offending token.
inline PwlnArchitecture parse_architecture(std::string_view literal,
                                           int default_class_count = -1) {
    PwlnArchitecture arch;
    bool saw_n0 = false, saw_layers = false, saw_c = false;

    std::size_t pos = 0;
    while (pos <= literal.size()) {
        std::size_t end = literal.find(';', pos);
        if (end == std::string_view::npos) end = literal.size();
        std::string_view field = literal.substr(pos, end - pos);
        if (field.empty()) {
            throw std::invalid_argument(
                detail::cat("architecture literal \"", literal,
                            "\": empty field at offset ", pos));
        }
        std::size_t eq = field.find('=');
        if (eq == std::string_view::npos) {
            throw std::invalid_argument(detail::cat(
                "architecture literal \"", literal, "\": field at offset ",
                pos, " has no '=': \"", field, "\""));
        }
        std::string_view key = field.substr(0, eq);
        std::string_view value = field.substr(eq + 1);
        std::size_t value_offset = pos + eq + 1;

        if (key == "n0") {
            arch.input_dim = detail::parse_positive_int(
                value, literal, "value of key 'n0'", value_offset);
            saw_n0 = true;
        } else if (key == "layers") {
            std::size_t vpos = 0;
            while (vpos <= value.size()) {
                std::size_t vend = value.find(',', vpos);
                if (vend == std::string_view::npos) vend = value.size();
                arch.layer_widths.push_back(detail::parse_positive_int(
                    value.substr(vpos, vend - vpos), literal,
                    "layer width in key 'layers'", value_offset + vpos));
                if (vend == value.size()) break;
                vpos = vend + 1;
            }
            saw_layers = true;
        } else if (key == "c") {
            arch.class_count = detail::parse_positive_int(
                value, literal, "value of key 'c'", value_offset);
            saw_c = true;
        } else {
            throw std::invalid_argument(detail::cat(
                "architecture literal \"", literal, "\": unknown key \"", key,
                "\" at offset ", pos));
        }
        if (end == literal.size()) break;
        pos = end + 1;
    }

    if (!saw_n0) {
        throw std::invalid_argument(detail::cat("architecture literal \"",
                                                literal,
                                                "\": missing key 'n0'"));
    }
    if (!saw_layers) {
        throw std::invalid_argument(detail::cat("architecture literal \"",
                                                literal,
                                                "\": missing key 'layers'"));
    }
    if (!saw_c) {
        if (default_class_count < 2) {
            throw std::invalid_argument(detail::cat(
                "architecture literal \"", literal,
                "\": missing key 'c' and no default class count supplied"));
        }
        arch.class_count = default_class_count;
    }
    arch.validate();
    return arch;
}

}  // namespace pwln
