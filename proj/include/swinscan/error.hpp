// Copyright 2026 The SwinScan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace swinscan {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incompatible tensor extents.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent model or pipeline configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Invalid caller-supplied data (empty sets, out-of-range ids, bad extents).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A class label outside [0, num_classes).
class LabelError : public Error {
 public:
  LabelError(const std::string& what, std::size_t index)
      : Error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// An operation produced NaN or infinity.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// API misuse, e.g. calling backward on a non-scalar.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Malformed byte stream. Carries the offset where decoding stopped.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Malformed weight or report file.
class FormatError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// Training produced a non-finite loss.
class DivergedError : public Error {
 public:
  DivergedError(const std::string& what, std::size_t step)
      : Error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Content does not fit the PDF page.
class LayoutError : public Error {
 public:
  using Error::Error;
};

}  // namespace swinscan
