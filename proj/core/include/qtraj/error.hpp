// Copyright 2026 The qtraj Authors
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

#include <stdexcept>
#include <string>

namespace qtraj {

enum class ErrorKind {
  kInvalidInput,
  kInvalidModel,
  kInvalidParameter,
  kParse,
  kBudget,
  kZeroVector,
  kAnnihilation,
  kDeadState,
  kMultipleFixedPoints,
  kAssumption,
  kNumericalFailure,
  kInsufficientResolution,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library; the kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Thrown by channel analysis when the fixed-point space is not one-dimensional.
class MultipleFixedPointsError : public Error {
 public:
  MultipleFixedPointsError(int dimension, const std::string& what)
      : Error(ErrorKind::kMultipleFixedPoints, what), dimension_(dimension) {}

  int dimension() const noexcept { return dimension_; }

 private:
  int dimension_;
};

// Exit codes used by the CLI: 0 success, 2 invalid input, 3 assumption gate,
// 4 numerical failure.
int exit_code_for(ErrorKind kind);

}  // namespace qtraj
