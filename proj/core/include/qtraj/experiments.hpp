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
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qtraj/channel.hpp"
#include "qtraj/kraus.hpp"
#include "qtraj/stats.hpp"
#include "qtraj/transport.hpp"

namespace qtraj {

// Initial law of the chain. Density initials are realized in pure mode by
// drawing an eigenvector of rho with probability equal to its eigenvalue.
struct InitialCondition {
  enum class Kind { kBasis, kPure, kDensity, kFubiniStudy };
  Kind kind = Kind::kBasis;
  int index = 0;
  ComplexVector vector;
  ComplexMatrix density;
};

struct ExperimentConfig {
  std::shared_ptr<const KrausMeasure> model;
  nlohmann::json model_spec;
  std::uint64_t seed = 1;
  int n_traj = 10000;
  int n_steps = 200;
  int burn_in = 100;
  std::vector<int> checkpoints;
  InitialCondition initial;
  std::string output_dir = ".";
  unsigned threads = 0;
  std::vector<int> offsets{0};
  int block_len = 3;
  std::size_t w1_max_points = kDefaultTransportBudget;
  int reference_points = 10000;
  int max_word_len = 4;
  double z = 2.0;
  bool compare_rate = true;
  bool force = false;
};

// Parses the JSON config; relative model file paths resolve against
// `base_dir`. Throws invalid-input / parse errors naming the field.
ExperimentConfig parse_config(const nlohmann::json& j, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

// Parses the "initial" field; null selects the default basis ray e_0.
InitialCondition parse_initial(const nlohmann::json& j);

ProjectivePoint draw_initial(const InitialCondition& initial, int dim, Rng& rng);

struct InvariantResult {
  EmpiricalMeasure nu_hat;
  ComplexMatrix rho_hat;
  ComplexMatrix rho_inv;
  double rho_check = 0.0;  // |rho_hat - rho_inv|_1
  int period_m = 1;
  double gap_lambda = 0.0;
};

struct ConvergenceRow {
  int n = 0;
  double w1 = 0.0;
  bool in_fit = false;
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  double noise_floor = 0.0;
  stats::LinearFit fit;
  bool fit_ok = false;
  int period_m = 1;
  std::size_t sample_size = 0;
};

struct UnitaryExampleResult {
  double rho_error_frobenius = 0.0;
  double w1_to_uniform = 0.0;
  std::size_t sample_size = 0;
  std::size_t reference_size = 0;
};

struct OrbitAtom {
  ProjectivePoint point;
  double frequency = 0.0;
  double expected = 0.0;
};

struct FiniteOrbitResult {
  std::vector<OrbitAtom> atoms;
  long long unmatched = 0;
  double max_abs_error = 0.0;
};

struct EstimatorDecayRow {
  int n = 0;
  int offset = 0;
  double mean_d = 0.0;
  double stderr_d = 0.0;
  double f_n = 0.0;  // NaN when not enumerable
};

struct EstimatorDecayResult {
  std::vector<EstimatorDecayRow> rows;
  std::vector<int> offsets;
  std::vector<double> median_slope;  // per offset
  std::vector<std::vector<double>> slopes;  // per offset, per trajectory (NaN if unresolved)
  double gamma1_hat = 0.0;
  double gamma2_hat = 0.0;
  bool E_is_full = false;
  bool rate_bound_holds = false;
  bool mean_bound_holds = true;  // mean_d <= f(n) + 4 stderr where f is known
};

struct BlockFrequency {
  std::vector<int> block;
  double time_average = 0.0;
  double exact = 0.0;
};

struct ErgodicityResult {
  std::vector<BlockFrequency> blocks;
  double max_gap = 0.0;
};

InvariantResult run_invariant_estimate(const ExperimentConfig& cfg);
ConvergenceResult run_convergence(const ExperimentConfig& cfg);
UnitaryExampleResult run_unitary_example(const ExperimentConfig& cfg);
FiniteOrbitResult run_finite_orbit(const ExperimentConfig& cfg);
EstimatorDecayResult run_estimator_decay(const ExperimentConfig& cfg);
ErgodicityResult run_ergodicity(const ExperimentConfig& cfg);

std::vector<std::string> experiment_kinds();

// Runs one experiment by CLI name, writes `<kind>.csv` and
// `<kind>_summary.json` into cfg.output_dir and returns the summary.
nlohmann::json run_experiment(const std::string& kind, const ExperimentConfig& cfg);

// Throws an assumption error when (Pur) is violated or (phi-Erg) fails,
// unless cfg.force is set.
void gate_assumptions(const ExperimentConfig& cfg, bool need_pur, bool need_phi_erg);

}  // namespace qtraj
