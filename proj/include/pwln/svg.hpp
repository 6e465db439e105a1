// Copyright 2026 The pwln-interp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace pwln {

namespace detail {

// Fixed "%.6g" rendering keeps SVG output byte-deterministic across runs.
inline std::string svg_num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

inline std::string xml_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace detail

// Renders a minimal line chart: one series of means with optional ±std
// whiskers, categorical x positions, numeric y axis.  Pure text transform —
// it never feeds back into any computation.
inline std::string render_line_chart(const std::string& title,
                                     const std::string& y_label,
                                     const std::vector<std::string>& x_labels,
                                     const std::vector<double>& means,
                                     const std::vector<double>& stds) {
    if (x_labels.empty() || x_labels.size() != means.size() ||
        means.size() != stds.size()) {
        throw std::invalid_argument(
            "render_line_chart: labels, means, and stds must be nonempty "
            "and equal-length");
    }

    constexpr double width = 640.0, height = 400.0;
    constexpr double left = 64.0, right = 24.0, top = 40.0, bottom = 56.0;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    double y_min = means[0] - stds[0], y_max = means[0] + stds[0];
    for (std::size_t i = 1; i < means.size(); ++i) {
        y_min = std::min(y_min, means[i] - stds[i]);
        y_max = std::max(y_max, means[i] + stds[i]);
    }
    if (!(y_max > y_min)) {  // flat series: pad to a visible band
        y_min -= 0.5;
        y_max += 0.5;
    }
    const double pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    const auto x_at = [&](std::size_t i) {
        if (x_labels.size() == 1) return left + plot_w / 2.0;
        return left + plot_w * static_cast<double>(i) /
                          static_cast<double>(x_labels.size() - 1);
    };
    const auto y_at = [&](double v) {
        return top + plot_h * (1.0 - (v - y_min) / (y_max - y_min));
    };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
         "height=\"400\" viewBox=\"0 0 640 400\">\n";
    s += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
    s += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">" +
         detail::xml_escape(title) + "</text>\n";

    // Axes.
    s += "<line x1=\"" + detail::svg_num(left) + "\" y1=\"" +
         detail::svg_num(top) + "\" x2=\"" + detail::svg_num(left) +
         "\" y2=\"" + detail::svg_num(top + plot_h) +
         "\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + detail::svg_num(left) + "\" y1=\"" +
         detail::svg_num(top + plot_h) + "\" x2=\"" +
         detail::svg_num(left + plot_w) + "\" y2=\"" +
         detail::svg_num(top + plot_h) + "\" stroke=\"black\"/>\n";

    // Y ticks and labels.
    constexpr int kTicks = 5;
    for (int t = 0; t <= kTicks; ++t) {
        const double v =
            y_min + (y_max - y_min) * static_cast<double>(t) / kTicks;
        const double y = y_at(v);
        s += "<line x1=\"" + detail::svg_num(left - 4) + "\" y1=\"" +
             detail::svg_num(y) + "\" x2=\"" + detail::svg_num(left) +
             "\" y2=\"" + detail::svg_num(y) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + detail::svg_num(left - 8) + "\" y=\"" +
             detail::svg_num(y + 4) +
             "\" text-anchor=\"end\" font-family=\"sans-serif\" "
             "font-size=\"11\">" +
             detail::svg_num(v) + "</text>\n";
    }
    s += "<text x=\"16\" y=\"" + detail::svg_num(top + plot_h / 2.0) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\" transform=\"rotate(-90 16 " +
         detail::svg_num(top + plot_h / 2.0) + ")\">" +
         detail::xml_escape(y_label) + "</text>\n";

    // X tick labels.
    for (std::size_t i = 0; i < x_labels.size(); ++i) {
        const double x = x_at(i);
        s += "<line x1=\"" + detail::svg_num(x) + "\" y1=\"" +
             detail::svg_num(top + plot_h) + "\" x2=\"" +
             detail::svg_num(x) + "\" y2=\"" +
             detail::svg_num(top + plot_h + 4) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + detail::svg_num(x) + "\" y=\"" +
             detail::svg_num(top + plot_h + 20) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
             "font-size=\"11\">" +
             detail::xml_escape(x_labels[i]) + "</text>\n";
    }

    // Std whiskers behind the mean polyline.
    for (std::size_t i = 0; i < means.size(); ++i) {
        if (stds[i] <= 0.0) continue;
        const double x = x_at(i);
        const double y_lo = y_at(means[i] - stds[i]);
        const double y_hi = y_at(means[i] + stds[i]);
        s += "<line x1=\"" + detail::svg_num(x) + "\" y1=\"" +
             detail::svg_num(y_lo) + "\" x2=\"" + detail::svg_num(x) +
             "\" y2=\"" + detail::svg_num(y_hi) +
             "\" stroke=\"#888888\"/>\n";
        for (double y : {y_lo, y_hi}) {
            s += "<line x1=\"" + detail::svg_num(x - 4) + "\" y1=\"" +
                 detail::svg_num(y) + "\" x2=\"" + detail::svg_num(x + 4) +
                 "\" y2=\"" + detail::svg_num(y) +
                 "\" stroke=\"#888888\"/>\n";
        }
    }

    s += "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"2\" "
         "points=\"";
    for (std::size_t i = 0; i < means.size(); ++i) {
        if (i > 0) s += " ";
        s += detail::svg_num(x_at(i)) + "," + detail::svg_num(y_at(means[i]));
    }
    s += "\"/>\n";
    for (std::size_t i = 0; i < means.size(); ++i) {
        s += "<circle cx=\"" + detail::svg_num(x_at(i)) + "\" cy=\"" +
             detail::svg_num(y_at(means[i])) +
             "\" r=\"3\" fill=\"#1f6fb2\"/>\n";
    }
    s += "</svg>\n";
    return s;
}

}  // namespace pwln
