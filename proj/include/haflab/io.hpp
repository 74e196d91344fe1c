// Copyright 2026 The haflab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file io.hpp
 * @brief JSON model files and small serialization helpers.
 *
 * Model file layout:
 * @code
 * {
 *   "grid": {"window": {"lo": [0.0], "hi": [1.0]}, "cells": [4]},
 *   "feature_dim": 2,
 *   "L1": [[[re, im], ...], ...],   // feature_dim rows, one [re, im] pair per cell
 *   "L2": [[[re, im], ...], ...]
 * }
 * @endcode
 * "cells" may also be a single integer. Unequal cells are given with "centers" and "volumes".
 */

#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "haflab/kernels.hpp"

namespace haflab {

using Json = nlohmann::json;

Grid grid_from_json(const Json& j);
Json grid_to_json(const Grid& grid);

ComplexMatrix complex_matrix_from_json(const Json& j, const std::string& what);
Json complex_matrix_to_json(const ComplexMatrix& m);

/// Parses and validates a model; invalid features raise ModelError with the violation list.
GaussianFieldModel model_from_json(const Json& j);
Json model_to_json(const GaussianFieldModel& model);

/// Reads a JSON document; parse errors become ConfigError.
Json read_json_file(const std::filesystem::path& path);
GaussianFieldModel load_model(const std::filesystem::path& path);

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(const std::string& data);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace haflab
