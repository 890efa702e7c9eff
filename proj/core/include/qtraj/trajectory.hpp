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
#include <memory>
#include <optional>
#include <vector>

#include "qtraj/channel.hpp"
#include "qtraj/kraus.hpp"
#include "qtraj/numerics.hpp"
#include "qtraj/projective.hpp"
#include "qtraj/random.hpp"
#include "qtraj/transport.hpp"

namespace qtraj {

inline constexpr double kDeadStateThreshold = 1e-12;

// Cumulative logs below this many nats per step are reported as -infinity.
// A singular-value floor of 1e-300 contributes log(1e-300) = -690.8 per step,
// so -690 is the largest threshold that every floored step crosses.
inline constexpr double kLyapunovSentinelPerStep = -690.0;

// Per-model data shared by every trajectory of an ensemble.
class TransitionKernel {
 public:
  explicit TransitionKernel(const KrausMeasure& m);

  const KrausMeasure& model() const { return model_; }
  int dim() const { return model_.dim(); }
  const std::vector<int>& support() const { return model_.support(); }
  const ComplexMatrix& matrix(int i) const { return model_.elements()[i].matrix; }
  double weight(int i) const { return model_.elements()[i].weight; }

  // c when v_i* v_i = c^2 Id to 1e-12 relative (a scaled unitary), else 0.
  double unitary_scale(int i) const { return unitary_scale_[i]; }

 private:
  KrausMeasure model_;
  std::vector<double> unitary_scale_;
};

enum class StateMode { kPure, kDensity };

struct TrackingOptions {
  bool product = true;    // W_n and the estimator window product
  bool lyapunov = true;   // QR frame for Lyapunov exponents
  bool history = false;   // keep outcome indices
};

// Running state of one trajectory.
class TrajectoryState {
 public:
  using KernelPtr = std::shared_ptr<const TransitionKernel>;

  static TrajectoryState pure(KernelPtr kernel, const ProjectivePoint& x0, std::uint64_t seed,
                              int window_start = 0, TrackingOptions options = {});
  static TrajectoryState density(KernelPtr kernel, const DensityMatrix& rho0,
                                 std::uint64_t seed, int window_start = 0,
                                 TrackingOptions options = {});
  // Draws x0 from nu with the trajectory's own generator, then runs in pure mode.
  static TrajectoryState sampled(KernelPtr kernel, const EmpiricalMeasure& nu,
                                 std::uint64_t seed, int window_start = 0,
                                 TrackingOptions options = {});

  // Samples an outcome, updates the state and returns the outcome index.
  int step();

  // Outcome probabilities at the current state (before normalization).
  std::vector<double> outcome_weights() const;

  int n() const { return n_; }
  StateMode mode() const { return mode_; }
  const TransitionKernel& kernel() const { return *kernel_; }
  int dim() const { return kernel_->dim(); }

  // Pure mode only.
  const ProjectivePoint& point() const;
  // Density mode only.
  const ComplexMatrix& density_matrix() const;
  // The ray of the state: x_n in pure mode, the top eigenvector of rho_n in
  // density mode.
  ProjectivePoint state_ray() const;

  const ProjectivePoint& initial_point() const { return *initial_; }
  bool has_initial_point() const { return initial_.has_value(); }

  // W_n / |W_n| and log |W_n|.
  const ComplexMatrix& normalized_product() const;
  double log_norm() const { return log_norm_; }
  // True while every applied matrix was a scaled unitary.
  bool product_is_scaled_unitary() const { return all_scaled_unitary_; }

  // Normalized product of the steps after `window_start`.
  const ComplexMatrix& window_product() const;
  int window_start() const { return window_start_; }

  const ComplexMatrix& lyapunov_frame() const { return frame_; }
  const std::vector<double>& lyapunov_logs() const { return lyap_logs_; }
  const std::vector<std::vector<double>>& lyapunov_snapshots() const { return snapshots_; }
  int snapshot_stride() const { return snapshot_stride_; }

  const std::vector<int>& history() const { return history_; }
  const TrackingOptions& options() const { return options_; }

 private:
  TrajectoryState(KernelPtr kernel, StateMode mode, std::uint64_t seed, int window_start,
                  TrackingOptions options);
  int sample_outcome(const std::vector<double>& weights);
  void update_product(int i);
  void update_lyapunov(int i);
  void record_snapshot();

  KernelPtr kernel_;
  StateMode mode_;
  Rng rng_;
  TrackingOptions options_;
  int n_ = 0;
  std::optional<ProjectivePoint> x_;
  std::optional<ProjectivePoint> initial_;
  ComplexMatrix rho_;
  ComplexMatrix w_;
  double log_norm_ = 0.0;
  bool all_scaled_unitary_ = true;
  int window_start_ = 0;
  ComplexMatrix window_;
  ComplexMatrix frame_;
  std::vector<double> lyap_logs_;
  std::vector<std::vector<double>> snapshots_;
  int snapshot_stride_ = 1;
  std::vector<int> history_;
};

// M_n = W_n* W_n / tr(W_n* W_n).
DensityMatrix martingale_M(const TrajectoryState& s);

// Second-largest eigenvalue of M_n (0 when k = 1).
double martingale_lambda2(const TrajectoryState& s);

struct Estimators {
  ProjectivePoint z_hat;  // top right singular vector of the window product
  ProjectivePoint y_hat;  // top left singular vector
};

Estimators mle_estimators(const TrajectoryState& s);

// Unitary factor of the polar decomposition of W_n (canonical completion).
ComplexMatrix polar_unitary(const TrajectoryState& s);

struct LyapunovReport {
  std::vector<double> gamma_hat;      // non-increasing; -inf marks the sentinel
  std::vector<double> partial_sums;   // (1/n) log |wedge^p W_n|, p = 1..k
  int n_used = 0;
  std::vector<double> stderr_hat;     // batch means; NaN with fewer than 2 batches
};

// Partial sums are read exactly from the singular values of the renormalized
// product while they are resolved (above 1e-12 relative); beyond that the QR
// accumulators supply the remaining exponents.
LyapunovReport lyapunov_report(const TrajectoryState& s);

inline constexpr std::uint64_t kDefaultWordBudget = 1000000;

// f(n) = sum over words of length n of (prod w) a_1(v_w) a_2(v_w).
double compute_f(const KrausMeasure& m, int n, std::uint64_t budget = kDefaultWordBudget);

// (prod w) tr(v_w rho v_w*), word listed in time order.
double exact_cylinder_probability(const KrausMeasure& m, const ComplexMatrix& rho,
                                  const std::vector<int>& word);

// Visits every word of length n over the support, in lexicographic order,
// with its weight product and matrix v_{w_n} ... v_{w_1}.
template <class Visit>
void for_each_word(const KrausMeasure& m, int n, std::uint64_t budget, Visit&& visit);

// Writes the per-step trajectory dump (header plus one row per call).
class TrajectoryDumpWriter {
 public:
  explicit TrajectoryDumpWriter(std::ostream& out, int dim);
  void write_row(const TrajectoryState& s, int outcome);

 private:
  std::ostream& out_;
  int dim_;
};

}  // namespace qtraj

#include "qtraj/detail/words.hpp"
