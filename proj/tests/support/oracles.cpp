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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>

namespace qtraj::oracle {
namespace {

// Solves the square system a x = b by Gaussian elimination with partial
// pivoting; false when singular.
bool solve(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& x) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    }
    if (std::abs(a[p][c]) < 1e-12) return false;
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t k = r + 1; k < n; ++k) s -= a[r][k] * x[k];
    x[r] = s / a[r][r];
  }
  return true;
}

}  // namespace

double transport_by_vertices(const std::vector<double>& a, const std::vector<double>& b,
                             const std::vector<double>& cost) {
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  const std::size_t cells = na * nb;
  const std::size_t basis = na + nb - 1;
  double best = std::numeric_limits<double>::infinity();
  // Walk all subsets of `basis` cells with a bitmask over at most 16 cells.
  for (std::uint32_t mask = 0; mask < (1u << cells); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != basis) continue;
    std::vector<std::size_t> chosen;
    for (std::size_t c = 0; c < cells; ++c) {
      if (mask & (1u << c)) chosen.push_back(c);
    }
    // Row sums for every source, column sums for all but the last sink (the
    // dropped constraint is implied by total mass).
    std::vector<std::vector<double>> m(basis, std::vector<double>(basis, 0.0));
    std::vector<double> rhs(basis, 0.0);
    for (std::size_t i = 0; i < na; ++i) rhs[i] = a[i];
    for (std::size_t j = 0; j + 1 < nb; ++j) rhs[na + j] = b[j];
    for (std::size_t v = 0; v < basis; ++v) {
      const std::size_t i = chosen[v] / nb;
      const std::size_t j = chosen[v] % nb;
      m[i][v] = 1.0;
      if (j + 1 < nb) m[na + j][v] = 1.0;
    }
    std::vector<double> x;
    if (!solve(m, rhs, x)) continue;
    if (*std::min_element(x.begin(), x.end()) < -1e-12) continue;
    double total = 0.0;
    for (std::size_t v = 0; v < basis; ++v) total += x[v] * cost[chosen[v]];
    best = std::min(best, total);
  }
  return best;
}

int real_rank(std::vector<std::vector<double>> a, double tol) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a[0].size() : 0;
  int rank = 0;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    for (std::size_t i = r + 1; i < rows; ++i) {
      if (std::abs(a[i][c]) > std::abs(a[p][c])) p = i;
    }
    if (std::abs(a[p][c]) <= tol) continue;
    std::swap(a[p], a[r]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      const double f = a[i][c] / a[r][c];
      for (std::size_t k = c; k < cols; ++k) a[i][k] -= f * a[r][k];
    }
    ++r;
    ++rank;
  }
  return rank;
}

int fixed_point_dimension(const std::vector<double>& weights,
                          const std::vector<ComplexMatrix>& elements) {
  const int k = static_cast<int>(elements.front().rows());
  const int n = 2 * k * k;
  // Column c of the real matrix is phi applied to the c-th real basis matrix
  // (E_ab for c < k^2, i E_ab after), minus that basis matrix.
  std::vector<std::vector<double>> a(static_cast<std::size_t>(n),
                                     std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int c = 0; c < n; ++c) {
    const int idx = c % (k * k);
    ComplexMatrix x = ComplexMatrix::Zero(k, k);
    x(idx / k, idx % k) = c < k * k ? Complex(1.0, 0.0) : Complex(0.0, 1.0);
    ComplexMatrix y = -x;
    for (std::size_t e = 0; e < elements.size(); ++e) {
      y += weights[e] * elements[e] * x * elements[e].adjoint();
    }
    for (int r = 0; r < k * k; ++r) {
      a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = y(r / k, r % k).real();
      a[static_cast<std::size_t>(r + k * k)][static_cast<std::size_t>(c)] =
          y(r / k, r % k).imag();
    }
  }
  // The complex fixed-point space has half the real dimension.
  return (n - real_rank(a, 1e-9)) / 2;
}

double f_closed_form_2x2(const std::vector<double>& weights,
                         const std::vector<ComplexMatrix>& elements, int n) {
  double base = 0.0;
  for (std::size_t e = 0; e < elements.size(); ++e) {
    const ComplexMatrix& v = elements[e];
    base += weights[e] * std::abs(v(0, 0) * v(1, 1) - v(0, 1) * v(1, 0));
  }
  return std::pow(base, n);
}

std::pair<double, double> singular_values_2x2(const ComplexMatrix& a) {
  const double fro2 = a.squaredNorm();
  const double det = std::abs(a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0));
  const double disc = std::sqrt(std::max(0.0, fro2 * fro2 - 4.0 * det * det));
  const double s1 = std::sqrt((fro2 + disc) / 2.0);
  const double s2 = s1 > 0.0 ? det / s1 : 0.0;
  return {s1, s2};
}

}  // namespace qtraj::oracle
