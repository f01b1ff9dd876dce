// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace wiser {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Tensor/layer dimensions do not conform.
struct ShapeError : Error {
    using Error::Error;
};

/// An operation precondition was violated (e.g. non-scalar loss).
struct ContractError : Error {
    using Error::Error;
};

/// Non-finite values where finite ones are required.
struct NumericError : Error {
    using Error::Error;
};

/// Malformed input file.
struct ParseError : Error {
    using Error::Error;
};

/// Structurally valid input with unusable content.
struct DataError : Error {
    using Error::Error;
};

/// Invalid configuration value or key.
struct ConfigError : Error {
    using Error::Error;
};

/// A label-function training chunk is unusable (e.g. single-class).
struct ChunkError : Error {
    using Error::Error;
};

/// A metric is undefined for the given inputs.
struct MetricError : Error {
    using Error::Error;
};

/// Pipeline stages executed out of order or artifacts missing.
struct PipelineError : Error {
    using Error::Error;
};

} // namespace wiser
