// Copyright 2026 The pwln-interp Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: bounds queries, single distillation runs,
// axis sweeps, and region counting.  All numeric work lives in the
// headers under include/pwln; this file only parses flags and config
// files, routes them, and writes outputs atomically.
//
// Exit codes: 0 success, 1 runtime error, 2 config/validation error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pwln/bounds.hpp"
#include "pwln/config.hpp"
#include "pwln/interpret.hpp"
#include "pwln/nn.hpp"
#include "pwln/region_oracle.hpp"
#include "pwln/svg.hpp"
#include "pwln/sweep.hpp"
#include "pwln/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Raised for anything that should exit with the config-error code.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config file: " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " +
                          e.what());
    }
}

// Atomic file write: temp file in the target directory, then rename.
// Concurrent writers may race on the temp name but never interleave bytes.
void write_file_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out << content;
        out.flush();
        if (!out) {
            throw std::runtime_error("short write to " + tmp.string());
        }
    }
    fs::rename(tmp, path);
}

// The number in a JSON field or null: linear-domain bound values can leave
// double range, and the log2 forms are always present alongside.
json finite_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

json triple_values(const pwln::BoundTriple& t) {
    return json{{"lower", finite_or_null(t.lower.value())},
                {"average", finite_or_null(t.average.value())},
                {"upper", finite_or_null(t.upper.value())}};
}

json triple_log2(const pwln::BoundTriple& t) {
    return json{{"lower", t.lower.log2()},
                {"average", t.average.log2()},
                {"upper", t.upper.log2()}};
}

// ---------------------------------------------------------------------------
// bounds

struct BoundsArgs {
    std::string arch_a;
    std::string arch_b;
    int classes = 2;
    long dataset_size = 1;
    std::string convention = "deep_formula";
    std::string ab_variant = "entropy_ratio";
    std::string out_dir;
    bool verbose = false;
};

int cmd_bounds(const BoundsArgs& args) {
    if (args.arch_a.empty() || args.arch_b.empty()) {
        throw ConfigError("bounds: --arch-a and --arch-b are required");
    }
    if (args.classes < 2) {
        throw ConfigError("bounds: --classes must be >= 2");
    }
    if (args.dataset_size < 1) {
        throw ConfigError("bounds: -n must be >= 1");
    }
    pwln::SingleLayerLowerConvention convention;
    if (args.convention == "deep_formula") {
        convention = pwln::SingleLayerLowerConvention::deep_formula;
    } else if (args.convention == "table_value_one") {
        convention = pwln::SingleLayerLowerConvention::table_value_one;
    } else {
        throw ConfigError(
            "bounds: --convention must be deep_formula or table_value_one");
    }
    pwln::AverageInterpretabilityVariant variant;
    if (args.ab_variant == "entropy_ratio") {
        variant = pwln::AverageInterpretabilityVariant::entropy_ratio;
    } else if (args.ab_variant == "neuron_count_exponent") {
        variant = pwln::AverageInterpretabilityVariant::neuron_count_exponent;
    } else {
        throw ConfigError(
            "bounds: --ab-variant must be entropy_ratio or "
            "neuron_count_exponent");
    }

    const pwln::PwlnArchitecture arch_a =
        pwln::parse_architecture(args.arch_a, args.classes);
    const pwln::PwlnArchitecture arch_b =
        pwln::parse_architecture(args.arch_b, args.classes);

    const json config{{"arch_a", args.arch_a},
                      {"arch_b", args.arch_b},
                      {"classes", args.classes},
                      {"dataset_size", args.dataset_size},
                      {"convention", args.convention},
                      {"ab_variant", args.ab_variant}};

    json doc;
    doc["tool_version"] = std::string(pwln::kToolVersion);
    doc["config"] = config;
    doc["config_fingerprint"] = pwln::detail::fnv1a64_hex(config.dump());
    const auto emit_model = [&](const char* key,
                                const pwln::PwlnArchitecture& arch) {
        const pwln::BoundTriple complexity =
            pwln::complexity_bounds(arch, args.dataset_size, convention);
        const pwln::BoundTriple entropy = pwln::entropy_bounds(
            arch, args.dataset_size, pwln::EntropyLowerForm::product_form);
        doc[key] = {{"arch", pwln::to_literal(arch)},
                    {"complexity", triple_values(complexity)},
                    {"complexity_log2", triple_log2(complexity)},
                    {"entropy", triple_values(entropy)},
                    {"entropy_log2", triple_log2(entropy)}};
    };
    emit_model("model_a", arch_a);
    emit_model("model_b", arch_b);
    const pwln::InterpretabilityBounds interp = pwln::interpretability_bounds(
        arch_a, arch_b, args.dataset_size, variant);
    doc["interpretability"] = {{"lower", interp.lower},
                               {"average", interp.average},
                               {"upper", interp.upper}};

    const std::string text = doc.dump(2) + "\n";
    std::cout << text;
    if (!args.out_dir.empty()) {
        const fs::path path = fs::path(args.out_dir) / "bounds.json";
        write_file_atomic(path, text);
        std::cerr << "wrote " << path.string() << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// distill & sweep

// Merges config-file JSON with any flags the user actually passed (CLI
// wins), then validates.
struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> data_dir;
    std::optional<std::string> estimator;
    std::optional<double> epsilon;
    std::optional<double> query_fraction;
    bool verbose = false;
    bool svg = false;
};

pwln::RunConfig load_run_config(const std::string& config_path,
                                const RunOverrides& overrides,
                                pwln::RunMode mode) {
    json j = read_json_file(config_path);
    if (!j.is_object()) {
        throw ConfigError("config file " + config_path +
                          " must hold a JSON object");
    }
    if (overrides.seed) j["seed"] = *overrides.seed;
    if (overrides.out_dir) j["out_dir"] = *overrides.out_dir;
    if (overrides.data_dir) j["data_dir"] = *overrides.data_dir;
    if (overrides.estimator) j["estimator"] = *overrides.estimator;
    if (overrides.epsilon) j["epsilon"] = *overrides.epsilon;
    if (overrides.query_fraction) {
        j["query_fraction"] = *overrides.query_fraction;
    }
    if (overrides.verbose) j["verbose"] = true;
    if (overrides.svg) j["svg"] = true;
    return pwln::parse_run_config(j, mode);
}

// Gap profile for the distill plot: percentile cut of the sorted per-sample
// probability gaps after distillation.
void append_gap_profile(const std::vector<double>& gaps,
                        std::vector<std::string>& labels,
                        std::vector<double>& values) {
    std::vector<double> sorted = gaps;
    std::sort(sorted.begin(), sorted.end());
    for (int p = 0; p <= 100; p += 10) {
        const auto idx = static_cast<std::size_t>(std::lround(
            (static_cast<double>(p) / 100.0) *
            static_cast<double>(sorted.size() - 1)));
        labels.push_back("p" + std::to_string(p));
        values.push_back(sorted[idx]);
    }
}

int cmd_distill(const std::string& config_path,
                const RunOverrides& overrides) {
    const pwln::RunConfig config =
        load_run_config(config_path, overrides, pwln::RunMode::distill);
    const pwln::InterpretationReport report = pwln::run_distill(config);
    const pwln::EntropyEstimator estimator =
        pwln::parse_estimator(config.estimator);

    json doc;
    doc["tool_version"] = std::string(pwln::kToolVersion);
    doc["config"] =
        pwln::canonical_config_json(config, pwln::RunMode::distill);
    doc["report"] = report.to_json(estimator, config.verbose);
    const std::string text = doc.dump(2) + "\n";

    const fs::path report_path = fs::path(config.out_dir) / "report.json";
    write_file_atomic(report_path, text);

    const pwln::EstimatorScores& scores = report.scores(estimator);
    std::cout << "distilled " << report.model_a << " against "
              << report.model_b << " (" << report.n_query << " queries, "
              << report.n_eval << " eval rows)\n";
    std::cout << "fidelity: " << report.fidelity_before << " -> "
              << report.fidelity_after << "\n";
    std::cout << "interpretability (" << config.estimator
              << "): " << scores.interpretability << "\n";
    std::cout << "report: " << report_path.string() << "\n";
    if (config.verbose) {
        std::cout << text;
    }

    if (config.svg && !report.sample_gaps_after.empty()) {
        std::vector<std::string> labels;
        std::vector<double> values;
        append_gap_profile(report.sample_gaps_after, labels, values);
        const std::string chart = pwln::render_line_chart(
            "evaluation gap percentiles after distillation",
            "probability gap", labels, values,
            std::vector<double>(labels.size(), 0.0));
        const fs::path svg_path = fs::path(config.out_dir) / "report.svg";
        write_file_atomic(svg_path, chart);
        std::cout << "plot: " << svg_path.string() << "\n";
    }
    return 0;
}

int cmd_sweep(const std::string& config_path, const RunOverrides& overrides) {
    const pwln::RunConfig config =
        load_run_config(config_path, overrides, pwln::RunMode::sweep);
    const pwln::SweepResult result = pwln::run_sweep(config);

    const fs::path csv_path = fs::path(config.out_dir) / "sweep.csv";
    write_file_atomic(csv_path, result.csv);

    json meta;
    meta["tool_version"] = std::string(pwln::kToolVersion);
    meta["config"] = pwln::canonical_config_json(config, pwln::RunMode::sweep);
    meta["config_fingerprint"] =
        pwln::config_fingerprint(config, pwln::RunMode::sweep);
    const fs::path meta_path = fs::path(config.out_dir) / "sweep_meta.json";
    write_file_atomic(meta_path, meta.dump(2) + "\n");

    std::cout << "sweep over " << config.axis << ": "
              << config.values.size() << " values x " << config.seeds.size()
              << " seeds\n";
    std::cout << "csv: " << csv_path.string() << "\n";
    std::cout << "meta: " << meta_path.string() << "\n";
    if (config.verbose) {
        std::cout << result.csv;
    }

    if (config.svg) {
        const std::string chart = pwln::render_line_chart(
            "interpretability vs " + config.axis,
            "interpretability (mean, whiskers = sample std)",
            result.value_labels, result.mean_interpretability,
            result.std_interpretability);
        const fs::path svg_path = fs::path(config.out_dir) / "sweep.svg";
        write_file_atomic(svg_path, chart);
        std::cout << "plot: " << svg_path.string() << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// regions

struct RegionsArgs {
    std::string model_path;
    std::string method = "grid";
    double box = 2.0;
    int resolution = 256;
    std::string out_dir;
    std::string data_dir;
    bool verbose = false;
};

int cmd_regions(const RegionsArgs& args) {
    if (args.model_path.empty()) {
        throw ConfigError("regions: --model is required");
    }
    if (args.method != "exact2d" && args.method != "grid") {
        throw ConfigError("regions: --method must be exact2d or grid");
    }
    if (!(args.box > 0.0)) {
        throw ConfigError("regions: --box must be > 0");
    }

    std::string path = args.model_path;
    if (!args.data_dir.empty() && !fs::path(path).is_absolute()) {
        path = (fs::path(args.data_dir) / path).string();
    }
    const pwln::MlpModel model = pwln::load_mlp(path);
    const pwln::PwlnArchitecture& arch = model.architecture;

    long count = 0;
    if (args.method == "exact2d") {
        if (arch.input_dim != 2 || arch.depth() != 1) {
            throw ConfigError(pwln::detail::cat(
                "regions: exact2d requires input_dim=2 and exactly one "
                "hidden layer; model has input_dim=",
                arch.input_dim, " and ", arch.depth(), " hidden layers"));
        }
        count =
            pwln::count_regions_exact_2d(pwln::first_layer_hyperplanes(model));
    } else {
        const auto dim = static_cast<std::size_t>(arch.input_dim);
        pwln::InputBox box{std::vector<double>(dim, -args.box),
                           std::vector<double>(dim, args.box)};
        count = pwln::count_activation_patterns_grid(model, box,
                                                     args.resolution);
    }

    const pwln::LogQuantity upper = pwln::complexity_upper(arch);
    const pwln::LogQuantity lower = pwln::complexity_lower(arch);
    const bool satisfied =
        std::log2(static_cast<double>(count)) <= upper.log2() + 1e-9;

    const json config{{"model", args.model_path},
                      {"method", args.method},
                      {"box", args.box},
                      {"resolution", args.resolution}};
    json doc;
    doc["tool_version"] = std::string(pwln::kToolVersion);
    doc["config"] = config;
    doc["config_fingerprint"] = pwln::detail::fnv1a64_hex(config.dump());
    doc["arch"] = pwln::to_literal(arch);
    doc["count"] = count;
    doc["complexity_upper"] = finite_or_null(upper.value());
    doc["complexity_upper_log2"] = upper.log2();
    doc["complexity_lower"] = finite_or_null(lower.value());
    doc["complexity_lower_log2"] = lower.log2();
    doc["satisfied"] = satisfied;

    const std::string text = doc.dump(2) + "\n";
    std::cout << text;
    if (!args.out_dir.empty()) {
        const fs::path out_path = fs::path(args.out_dir) / "regions.json";
        write_file_atomic(out_path, text);
        std::cerr << "wrote " << out_path.string() << "\n";
    }
    return 0;
}

// Applies config-file values for flags the user did not pass explicitly.
template <typename T>
void overlay(const json& config, const char* key, const CLI::Option* option,
             T& value) {
    if (option != nullptr && option->count() > 0) return;  // CLI wins
    if (!config.contains(key)) return;
    try {
        value = config.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(pwln::detail::cat("config key \"", key,
                                            "\" has the wrong type"));
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Interpretation-by-distillation toolkit for piecewise-linear "
        "networks"};
    app.set_version_flag("--version", std::string(pwln::kToolVersion));
    app.require_subcommand(1);

    // --- bounds ---
    auto* bounds = app.add_subcommand(
        "bounds", "Closed-form complexity/entropy/interpretability bounds");
    BoundsArgs bounds_args;
    std::string bounds_config;
    auto* ba = bounds->add_option("--arch-a", bounds_args.arch_a,
                                  "Architecture literal for model A "
                                  "(e.g. n0=2;layers=8;c=3)");
    auto* bb = bounds->add_option("--arch-b", bounds_args.arch_b,
                                  "Architecture literal for model B");
    auto* bc = bounds->add_option("--classes", bounds_args.classes,
                                  "Class count for literals without c=");
    auto* bn = bounds->add_option("-n,--dataset-size",
                                  bounds_args.dataset_size,
                                  "Dataset size for average-case bounds");
    auto* bv = bounds->add_option("--convention", bounds_args.convention,
                                  "Single-layer lower-bound convention: "
                                  "deep_formula|table_value_one");
    auto* bav = bounds->add_option("--ab-variant", bounds_args.ab_variant,
                                   "Average interpretability variant: "
                                   "entropy_ratio|neuron_count_exponent");
    auto* bo = bounds->add_option("--out-dir", bounds_args.out_dir,
                                  "Also write bounds.json here");
    auto* bverb = bounds->add_flag("--verbose", bounds_args.verbose,
                                   "Verbose output");
    bounds->add_option("--config", bounds_config,
                       "JSON file mirroring these flags (CLI wins)");

    // --- distill / sweep ---
    auto* distill = app.add_subcommand(
        "distill", "One interpretation-by-distillation run from a config");
    auto* sweep = app.add_subcommand(
        "sweep", "Axis sweep (query_fraction|width|optimizer) from a config");
    std::string distill_config, sweep_config;
    distill->add_option("--config", distill_config, "Run config JSON file")
        ->required();
    sweep->add_option("--config", sweep_config, "Run config JSON file")
        ->required();

    RunOverrides distill_over, sweep_over;
    // Optional-valued overrides are captured through callbacks so a config
    // key is only shadowed when the flag was actually passed.
    const auto add_run_overrides = [](CLI::App* cmd, RunOverrides& over) {
        cmd->add_option_function<std::uint64_t>(
            "--seed", [&over](std::uint64_t v) { over.seed = v; },
            "Run seed (overrides config)");
        cmd->add_option_function<std::string>(
            "--out-dir", [&over](const std::string& v) { over.out_dir = v; },
            "Output directory (overrides config)");
        cmd->add_option_function<std::string>(
            "--data-dir",
            [&over](const std::string& v) { over.data_dir = v; },
            "Directory for dataset/model paths (overrides config)");
        cmd->add_option_function<std::string>(
            "--estimator",
            [&over](const std::string& v) { over.estimator = v; },
            "Entropy estimator: diff|agreement (overrides config)");
        cmd->add_option_function<double>(
            "--epsilon", [&over](double v) { over.epsilon = v; },
            "Gap floor for the diff estimator (overrides config)");
        cmd->add_option_function<double>(
            "--query-fraction",
            [&over](double v) { over.query_fraction = v; },
            "Fraction of the pool queried (overrides config)");
        cmd->add_flag("--verbose", over.verbose,
                      "Verbose output (overrides config)");
        cmd->add_flag("--svg", over.svg,
                      "Emit SVG plot (overrides config)");
    };
    add_run_overrides(distill, distill_over);
    add_run_overrides(sweep, sweep_over);

    // --- regions ---
    auto* regions = app.add_subcommand(
        "regions", "Count linear regions of a serialized model");
    RegionsArgs regions_args;
    std::string regions_config;
    auto* rm = regions->add_option("--model", regions_args.model_path,
                                   "Model JSON path");
    auto* rme = regions->add_option("--method", regions_args.method,
                                    "exact2d|grid");
    auto* rb = regions->add_option("--box", regions_args.box,
                                   "Half-width of the sampling box");
    auto* rr = regions->add_option("--resolution", regions_args.resolution,
                                   "Grid points per axis");
    auto* ro = regions->add_option("--out-dir", regions_args.out_dir,
                                   "Also write regions.json here");
    auto* rd = regions->add_option("--data-dir", regions_args.data_dir,
                                   "Base directory for relative model paths");
    auto* rverb = regions->add_flag("--verbose", regions_args.verbose,
                                    "Verbose output");
    regions->add_option("--config", regions_config,
                        "JSON file mirroring these flags (CLI wins)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (bounds->parsed()) {
            if (!bounds_config.empty()) {
                const json j = read_json_file(bounds_config);
                overlay(j, "arch_a", ba, bounds_args.arch_a);
                overlay(j, "arch_b", bb, bounds_args.arch_b);
                overlay(j, "classes", bc, bounds_args.classes);
                overlay(j, "dataset_size", bn, bounds_args.dataset_size);
                overlay(j, "convention", bv, bounds_args.convention);
                overlay(j, "ab_variant", bav, bounds_args.ab_variant);
                overlay(j, "out_dir", bo, bounds_args.out_dir);
                overlay(j, "verbose", bverb, bounds_args.verbose);
            }
            return cmd_bounds(bounds_args);
        }
        if (distill->parsed()) {
            return cmd_distill(distill_config, distill_over);
        }
        if (sweep->parsed()) {
            return cmd_sweep(sweep_config, sweep_over);
        }
        if (regions->parsed()) {
            if (!regions_config.empty()) {
                const json j = read_json_file(regions_config);
                overlay(j, "model", rm, regions_args.model_path);
                overlay(j, "method", rme, regions_args.method);
                overlay(j, "box", rb, regions_args.box);
                overlay(j, "resolution", rr, regions_args.resolution);
                overlay(j, "out_dir", ro, regions_args.out_dir);
                overlay(j, "data_dir", rd, regions_args.data_dir);
                overlay(j, "verbose", rverb, regions_args.verbose);
            }
            return cmd_regions(regions_args);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
