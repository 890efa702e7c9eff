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

#include <cstddef>
#include <vector>

namespace qtraj::stats {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

// Ordinary least squares y = intercept + slope * x. Needs at least two points
// with distinct x; r_squared is 1 when y is constant along the fit.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

double mean(const std::vector<double>& v);

// Standard error of the mean, sample standard deviation / sqrt(n).
double standard_error(const std::vector<double>& v);

// Linear-interpolation quantile (q in [0, 1]); copies its input.
double quantile(std::vector<double> v, double q);
double median(std::vector<double> v);

}  // namespace qtraj::stats
