// Copyright (c) 2026 fhenet authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace fhenet {

/// Raised when a vector cannot be packed into slots (length not a power of
/// two, or non-finite values).
struct PackingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Operand shapes (slot counts, tensor dims) do not match.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Fixed-point scales of operands disagree.
struct ScaleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Ciphertext was produced under different keys.
struct KeyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Rotation amount has no provisioned rotation key.
struct MissingKeyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Multiplicative level budget exhausted; the circuit is too deep for the
/// configured modulus chain.
struct DepthExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Transform plan cannot be built for the requested size.
struct PlanError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Plaintext does not fit the coefficient modulus.
struct EncodingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad run/weights configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fhenet
