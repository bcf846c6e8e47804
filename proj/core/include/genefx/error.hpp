// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace genefx {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes or extents do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf or a degenerate numeric state.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent or out-of-range configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Operation not allowed in the object's current state.
class StateError : public Error {
 public:
  using Error::Error;
};

/// Named entity (layer, parameter, tensor) not found.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// Malformed serialized data.
class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Request exceeds a fixed resource bound.
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace genefx
