// src/core/errors.hpp

// Copyright 2026  The translab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace translab {

// Base of every error raised by the library. The C API maps each subclass to
// a status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape or extent mismatch between operands.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration value (bad kernel width, degenerate ranges, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Invalid data fed to an operation (blank inside labels, bad token id, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf produced or observed, or an impossible alignment.
class NumericError : public Error {
 public:
  using Error::Error;
};

// File could not be read or written, or has an unexpected layout.
class IoError : public Error {
 public:
  using Error::Error;
};

// Broken internal invariant (cyclic graph, double backward, ...).
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace translab
