// Copyright 2026 The qstmle Authors
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

namespace qst {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// A dense representation would exceed the configured size cap.
class CapacityError : public Error {
  public:
    using Error::Error;
};

/// Input data (a file or an in-memory table) fails schema validation.
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// A measured outcome (f > 0) has zero or negative model probability.
class SingularProbabilityError : public Error {
  public:
    SingularProbabilityError(std::size_t povm_index, double probability)
        : Error("outcome of POVM " + std::to_string(povm_index) +
                " has non-positive probability " + std::to_string(probability) +
                " but non-zero frequency"),
          povm_index_(povm_index) {}

    [[nodiscard]] std::size_t povm_index() const noexcept { return povm_index_; }

  private:
    std::size_t povm_index_;
};

/// Floating point results that violate a hard numerical invariant.
class NumericError : public Error {
  public:
    using Error::Error;
};

} // namespace qst
