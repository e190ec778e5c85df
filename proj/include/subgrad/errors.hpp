// Copyright 2026 The Authors.
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

namespace subgrad {

// Arithmetic outside an operation's domain (log of a non-positive value,
// division by zero). Raised at forward time, never deferred as NaN.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Invalid configuration: non-positive temperature, bad cardinality, ...
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A caller asked for something an exhaustive routine cannot do at this size,
// or an input precondition (non-negativity, submodularity) does not hold.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Problems with files and their contents.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public DataError {
 public:
  using DataError::DataError;
};

class VersionError : public DataError {
 public:
  using DataError::DataError;
};

class ShapeError : public DataError {
 public:
  using DataError::DataError;
};

// A likelihood evaluated to -inf or NaN (typically from a hard link function).
class NonFiniteLikelihood : public std::runtime_error {
 public:
  NonFiniteLikelihood(std::size_t example, double value)
      : std::runtime_error("non-finite log-likelihood " + std::to_string(value) +
                           " for training example " + std::to_string(example) +
                           " (hard link functions cannot be trained)"),
        example_(example) {}

  std::size_t example() const { return example_; }

 private:
  std::size_t example_;
};

}  // namespace subgrad
