// Copyright 2026 The haflab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file verify.hpp
 * @brief Experiment configuration and the identity battery behind `haflab verify`.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "haflab/io.hpp"
#include "haflab/kernels.hpp"

namespace haflab {

/// Where the model comes from. Exactly one kind is active.
struct ModelSource {
    enum class Kind { builtin, file, zero, poisson };
    Kind kind = Kind::builtin;
    std::string builtin = "proper-fourier";
    BuiltinParams params{};
    std::filesystem::path file;
    int zero_feature_dim = 1;
    std::vector<Complex> lambda;  // poisson: one value per cell, or a single value broadcast
};

/**
 * Config document:
 * @code
 * {
 *   "model": {"builtin": "proper-fourier", "params": {"frequencies": 1, "length_scale": 0.2, "variance": 1}}
 *          | {"file": "model.json"} | {"zero": {"feature_dim": 2}} | {"poisson": {"lambda": z | [z, ...]}},
 *   "grid": {"window": {"lo": [0], "hi": [1]}, "cells": [4]},
 *   "seed": 1, "replicates": 10000, "samples": 100000,
 *   "boxes": [[0], [1, 2]], "orders": [1, 2], "truncation": 6, "output": "report.jsonl"
 * }
 * @endcode
 * where z is a number or an [re, im] pair. A top-level array is always per cell; a one-element array
 * is broadcast, so a complex constant is written [[re, im]].
 * A model file carries its own grid; "grid" is then ignored.
 */
struct ExperimentConfig {
    ModelSource model;
    Json grid = Json{{"window", {{"lo", {0.0}}, {"hi", {1.0}}}}, {"cells", {4}}};
    std::uint64_t seed = 1;
    std::int64_t replicates = 10000;
    std::int64_t samples = 100000;
    std::vector<CellSet> boxes;
    std::vector<int> orders{1, 2};
    std::optional<int> truncation;
    std::string output;

    /// Truncation used for Fock checks: the configured value, else max(4, 2 * max order).
    [[nodiscard]] int effective_truncation() const;
    /// Canonical JSON form; its SHA-256 identifies the experiment in reports.
    [[nodiscard]] Json to_json() const;
    [[nodiscard]] std::string hash() const;
};

/// Relative paths in the document are resolved against `base_dir`. Throws ConfigError.
ExperimentConfig parse_config(const Json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Disjoint default boxes: the grid split into two halves (one cell each if M is 2 or less).
std::vector<CellSet> default_boxes(const Grid& grid);

Grid config_grid(const ExperimentConfig& config);
/// Builds the configured Gaussian model. Throws PreconditionError for a Poisson config.
GaussianFieldModel config_model(const ExperimentConfig& config);
IntensityProfile config_profile(const ExperimentConfig& config);

struct CheckRecord {
    std::string check;
    double residual = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::optional<double> std_error;
    std::optional<long long> n_samples;
    std::string detail;
};

Json to_json(const CheckRecord& r);

/// Runs every check that applies to the configured model. A check that throws is recorded as failed
/// with the error message, and the battery continues.
std::vector<CheckRecord> run_verify(const ExperimentConfig& config);

}  // namespace haflab
