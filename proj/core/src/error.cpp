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

#include "qtraj/error.hpp"

namespace qtraj {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid-input";
    case ErrorKind::kInvalidModel: return "invalid-model";
    case ErrorKind::kInvalidParameter: return "invalid-parameter";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kBudget: return "budget";
    case ErrorKind::kZeroVector: return "zero-vector";
    case ErrorKind::kAnnihilation: return "annihilation";
    case ErrorKind::kDeadState: return "dead-state";
    case ErrorKind::kMultipleFixedPoints: return "multiple-fixed-points";
    case ErrorKind::kAssumption: return "assumption";
    case ErrorKind::kNumericalFailure: return "numerical-failure";
    case ErrorKind::kInsufficientResolution: return "insufficient-resolution";
  }
  return "unknown";
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kMultipleFixedPoints:
    case ErrorKind::kAssumption:
      return 3;
    case ErrorKind::kDeadState:
    case ErrorKind::kNumericalFailure:
    case ErrorKind::kInsufficientResolution:
      return 4;
    default:
      return 2;
  }
}

}  // namespace qtraj
