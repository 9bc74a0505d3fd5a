// Copyright 2026 The astsim Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
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

namespace astsim {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text input (AST JSON, mini-language source, config files).
// Line and column are 1-based; zero means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " at line " + std::to_string(line) + ", column " +
              std::to_string(column)),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Well-formed JSON that does not follow the expected schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Tensor shape disagreement or an invalid dimension.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A value outside the domain of a numeric operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Not enough data to perform the requested operation.
class DatasetError : public Error {
 public:
  using Error::Error;
};

// An encoding database was produced under a different model checkpoint.
class CheckpointMismatch : public Error {
 public:
  CheckpointMismatch(const std::string& expected, const std::string& actual)
      : Error("checkpoint mismatch: database has " + actual +
              ", model has " + expected),
        expected_(expected),
        actual_(actual) {}

  const std::string& expected() const { return expected_; }
  const std::string& actual() const { return actual_; }

 private:
  std::string expected_;
  std::string actual_;
};

}  // namespace astsim
