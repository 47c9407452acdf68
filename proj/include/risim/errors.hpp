/*
 * Copyright (c) 2026 risim authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <stdexcept>
#include <string>

namespace risim {

// Errors derived from std::invalid_argument are treated as caller/input
// faults (CLI exit code 1); the rest are runtime/numerical (exit code 2).

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ParseError : ValidationError {
  using ValidationError::ValidationError;
};

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct UnsupportedOrderError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct EmptyChannelError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AlignmentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoPeakError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace risim
