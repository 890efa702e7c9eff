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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qtraj/kraus.hpp"
#include "qtraj/numerics.hpp"
#include "qtraj/stats.hpp"

namespace qtraj {

enum class PurVerdict { kViolated, kHoldsCertified, kHoldsLikely, kInconclusive };

const char* to_string(PurVerdict verdict);

struct PurDecayPoint {
  int n = 0;
  double median_lambda2 = 0.0;
  double p90_lambda2 = 0.0;
};

struct PurReport {
  PurVerdict verdict = PurVerdict::kInconclusive;
  std::optional<ComplexMatrix> witness;  // projector of rank >= 2 when violated
  int word_length_checked = 0;
  std::uint64_t words_checked = 0;
  std::vector<PurDecayPoint> mc_statistics;
  std::optional<stats::LinearFit> mc_fit;  // log median vs n over resolved points
  std::string detail;
};

inline constexpr double kPurProportionalityTolerance = 1e-8;

// Word-enumeration check up to length L. Complete for k = 2; for k >= 3 a
// common eigenspace of dimension >= 2 proves a violation and a full Hermitian
// span proves the assumption, anything else is inconclusive.
PurReport check_pur_words(const KrausMeasure& m, int max_len,
                          double tol = kPurProportionalityTolerance,
                          std::uint64_t budget = 1000000);

// Monte Carlo path: density-mode trajectories from Id/k, second eigenvalue of
// M_n at checkpoints. `tol` is the level the median must decay below.
PurReport check_pur_montecarlo(const KrausMeasure& m, int n_steps, int n_traj,
                               std::uint64_t seed, double tol = 1e-6, unsigned threads = 0);

struct ContractivityReport {
  int n_steps = 0;
  int n_traj = 0;
  std::vector<double> ratio_samples;  // a_2(W_n) / a_1(W_n), trajectory order
  double min_ratio = 0.0;
  double median_ratio = 0.0;
  double p90_ratio = 0.0;
};

ContractivityReport contractivity_diagnostic(const KrausMeasure& m, int n_steps, int n_traj,
                                             std::uint64_t seed, unsigned threads = 0);

nlohmann::json to_json(const PurReport& report);
nlohmann::json to_json(const ContractivityReport& report);

// CSV columns n, median_lambda2, p90_lambda2.
void write_decay_csv(std::ostream& out, const PurReport& report);

}  // namespace qtraj
