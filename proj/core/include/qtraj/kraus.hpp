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

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qtraj/numerics.hpp"
#include "qtraj/projective.hpp"

namespace qtraj {

inline constexpr double kDefaultStochasticTolerance = 1e-9;

struct KrausElement {
  double weight = 1.0;
  ComplexMatrix matrix;
};

// A finitely supported measure mu = sum_i w_i delta_{v_i} on k x k matrices.
// Weights need not sum to one; only sum_i w_i v_i* v_i = Id is required, and
// that is checked lazily against `tolerance()` by operations that need it.
class KrausMeasure {
 public:
  // Structural checks only: non-empty, square, equal dimension, finite entries
  // and non-negative weights. Throws invalid-model otherwise.
  KrausMeasure(std::vector<KrausElement> elements, std::string name = {},
               double tolerance = kDefaultStochasticTolerance);

  int dim() const { return dim_; }
  const std::vector<KrausElement>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  const std::string& name() const { return name_; }
  double tolerance() const { return tolerance_; }

  // Frobenius norm of sum_i w_i v_i* v_i - Id, computed once at construction.
  double defect() const { return defect_; }
  bool is_stochastic() const { return defect_ <= tolerance_; }

  // Throws invalid-model naming the defect when !is_stochastic().
  void require_stochastic() const;

  // Indices of the elements in the support (positive weight, nonzero matrix).
  const std::vector<int>& support() const { return support_; }

 private:
  int dim_ = 0;
  std::vector<KrausElement> elements_;
  std::string name_;
  double tolerance_;
  double defect_ = 0.0;
  std::vector<int> support_;
};

struct ValidationReport {
  double defect = 0.0;         // ||sum w v*v - Id||_F
  double second_moment = 0.0;  // sum w ||v||_F^2
  double tolerance = 0.0;
  bool passed = false;
};

ValidationReport validate(const KrausMeasure& m, double tol = kDefaultStochasticTolerance);

// Rescales every weight by 1 / (mean eigenvalue of sum w v*v). Only applied
// when the defect is below 1e-6; larger defects are modelling errors and
// raise invalid-model.
KrausMeasure repair_weights(const KrausMeasure& m);

struct TransitionDistribution {
  std::vector<double> probabilities;
};

// p_i = w_i |v_i x|^2 for the unit representative x.
TransitionDistribution transition_probabilities(const KrausMeasure& m,
                                                const ProjectivePoint& x);

using ModelParams = std::map<std::string, double>;

// Built-in models: appc_example1, appc_example2, flip_flop,
// amplitude_damping{p}, rotating_damping{theta, a, b}.
KrausMeasure builtin_model(const std::string& name, const ModelParams& params = {});

std::vector<std::string> builtin_model_names();

// JSON model schema:
//   { "dim": k, "name": str,
//     "elements": [ { "weight": w, "matrix": [[[re, im], ...k], ...k] } ] }
nlohmann::json to_json(const KrausMeasure& m);

// `context` prefixes error messages (usually the file name). When
// `allow_invalid` is false a measure failing the stochasticity check at `tol`
// raises invalid-model; otherwise it is returned with tolerance +inf.
KrausMeasure from_json(const nlohmann::json& j, double tol = kDefaultStochasticTolerance,
                       bool allow_invalid = false, const std::string& context = "model");

KrausMeasure load_model(const std::string& path, double tol = kDefaultStochasticTolerance,
                        bool allow_invalid = false);
void save_model(const KrausMeasure& m, const std::string& path);

// Resolves a CLI model reference: an existing JSON file path, or a builtin
// name with optional parameters, e.g. "amplitude_damping:p=0.3" or
// "rotating_damping:theta=0.5,a=0.9".
KrausMeasure resolve_model(const std::string& reference,
                           double tol = kDefaultStochasticTolerance,
                           bool allow_invalid = false);

}  // namespace qtraj
