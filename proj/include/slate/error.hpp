/*
 * Copyright 2026 The SLATE Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace slate {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (LIBSVM rows, matrix files, model files, configs).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A caller broke a documented precondition (shape mismatch, bad label...).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Experiment or partition settings that cannot be satisfied.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A mixing matrix that is not symmetric doubly stochastic.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::size_t row)
      : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

// Iterations that failed to converge or produced non-finite values.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double last_value)
      : Error(what), last_value_(last_value) {}
  double last_value() const { return last_value_; }

 private:
  double last_value_;
};

}  // namespace slate
