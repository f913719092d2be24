// Copyright 2026 The mrbnn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace mrbnn {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or non-finite arguments to a numerical operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// r·a >= 1: the resonance has no finite linewidth.
class DegenerateResonatorError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Malformed configuration or bad command-line usage.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Unreadable, truncated or corrupt data files.
class DataError : public Error {
public:
    using Error::Error;
};

class ChecksumError : public DataError {
public:
    using DataError::DataError;
};

/// A configuration that violates a physical limit (passband, bank size, ...).
class PhysicalConstraintError : public Error {
public:
    using Error::Error;
};

/// Thermal crosstalk matrix is not diagonally dominant, or the naive
/// fixed-point escalation does not converge.
class IllConditionedLayoutError : public PhysicalConstraintError {
public:
    using PhysicalConstraintError::PhysicalConstraintError;
};

void require_finite(double value, const char* what);

} // namespace mrbnn
