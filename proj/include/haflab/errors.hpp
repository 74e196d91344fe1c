// Copyright 2026 The haflab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace haflab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shapes or dimensions do not fit the operation (odd hafnian order, mismatched feature maps).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Input exceeds a configured size limit or truncation budget.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Index outside the grid or mode range.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Unknown builtin, malformed config or model file.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Kernel pair that cannot be realized by a Gaussian field.
class ModelError : public Error {
public:
    using Error::Error;
};

/// Caller violated a documented precondition (overlapping boxes, empty sample).
class PreconditionError : public Error {
public:
    using Error::Error;
};

}  // namespace haflab
