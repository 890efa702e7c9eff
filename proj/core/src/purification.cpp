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

#include "qtraj/purification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>
#include <sstream>

#include "qtraj/error.hpp"
#include "qtraj/parallel.hpp"
#include "qtraj/trajectory.hpp"

namespace qtraj {
namespace {

constexpr double kResolvedLambda2 = 1e-14;
constexpr int kDecayCheckpoints = 50;

bool proportional_to_identity(const ComplexMatrix& g, double tol) {
  const Eigen::Index k = g.rows();
  const Complex mean = g.trace() / static_cast<double>(k);
  return (g - mean * ComplexMatrix::Identity(k, k)).norm() <= tol * std::max(g.norm(), 1e-300);
}

// Real coordinates of a Hermitian matrix in an orthonormal basis.
RealVector hermitian_coordinates(const ComplexMatrix& h) {
  const Eigen::Index k = h.rows();
  RealVector c(k * k);
  Eigen::Index idx = 0;
  const double s = std::sqrt(2.0);
  for (Eigen::Index i = 0; i < k; ++i) c(idx++) = h(i, i).real();
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i + 1; j < k; ++j) {
      c(idx++) = s * h(i, j).real();
      c(idx++) = s * h(i, j).imag();
    }
  }
  return c;
}

// Incrementally grown orthonormal basis of the real span of Hermitian matrices.
class HermitianSpan {
 public:
  explicit HermitianSpan(int k) : full_(k * k) {}

  void add(const ComplexMatrix& g, double tol) {
    if (rank() == full_) return;
    RealVector c = hermitian_coordinates(numerics::hermitian_part(g));
    const double scale = c.norm();
    if (!(scale > 0.0)) return;
    c /= scale;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis_) c -= b.dot(c) * b;
    }
    const double residual = c.norm();
    if (residual > std::sqrt(tol)) basis_.push_back(c / residual);
  }

  int rank() const { return static_cast<int>(basis_.size()); }
  int full() const { return full_; }

 private:
  int full_;
  std::vector<RealVector> basis_;
};

// Candidate subspaces (orthonormal bases, dimension >= 2) contained in an
// eigenspace of every matrix seen so far.
class JointEigenspaces {
 public:
  explicit JointEigenspaces(int k) { candidates_.push_back(ComplexMatrix::Identity(k, k)); }

  void refine(const ComplexMatrix& g, double tol) {
    const double scale = std::max(g.norm(), 1e-300);
    const numerics::HermitianEigen eig = numerics::herm_eig(numerics::hermitian_part(g));
    const Eigen::Index k = g.rows();
    std::vector<double> values;
    for (Eigen::Index i = 0; i < k; ++i) {
      const double v = eig.eigenvalues(i);
      if (values.empty() || v - values.back() > tol * scale) values.push_back(v);
    }
    std::vector<ComplexMatrix> next;
    for (const auto& basis : candidates_) {
      for (double lambda : values) {
        const ComplexMatrix shifted = (g - lambda * ComplexMatrix::Identity(k, k)) * basis;
        const ComplexMatrix kernel = numerics::null_space(shifted, tol * scale);
        if (kernel.cols() >= 2) {
          ComplexMatrix sub = basis * kernel;
          Eigen::HouseholderQR<ComplexMatrix> qr(sub);
          next.push_back(qr.householderQ() * ComplexMatrix::Identity(k, sub.cols()));
        }
      }
    }
    candidates_ = std::move(next);
  }

  bool empty() const { return candidates_.empty(); }
  const std::vector<ComplexMatrix>& candidates() const { return candidates_; }

 private:
  std::vector<ComplexMatrix> candidates_;
};

std::vector<int> checkpoint_grid(int n_steps) {
  std::vector<int> grid;
  for (int i = 1; i <= kDecayCheckpoints; ++i) {
    const int n = static_cast<int>(std::lround(static_cast<double>(i) * n_steps / kDecayCheckpoints));
    if (n >= 1 && (grid.empty() || n > grid.back())) grid.push_back(n);
  }
  return grid;
}

}  // namespace

const char* to_string(PurVerdict verdict) {
  switch (verdict) {
    case PurVerdict::kViolated:
      return "violated";
    case PurVerdict::kHoldsCertified:
      return "holds_certified";
    case PurVerdict::kHoldsLikely:
      return "holds_likely";
    case PurVerdict::kInconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

PurReport check_pur_words(const KrausMeasure& m, int max_len, double tol,
                          std::uint64_t budget) {
  m.require_stochastic();
  if (max_len < 1) throw Error(ErrorKind::kInvalidInput, "max word length must be >= 1");
  const int k = m.dim();
  PurReport report;
  report.word_length_checked = max_len;
  if (k == 1) {
    report.verdict = PurVerdict::kHoldsCertified;
    report.detail = "k = 1: there is no projector of rank >= 2";
    return report;
  }

  // Count words first so that the budget applies to the whole enumeration.
  const auto letters = static_cast<std::uint64_t>(m.support().size());
  std::uint64_t total = 0;
  std::uint64_t level = 1;
  for (int len = 1; len <= max_len; ++len) {
    if (letters != 0 && level > budget / letters) {
      total = budget + 1;
      break;
    }
    level *= letters;
    total += level;
  }
  if (total > budget) {
    std::ostringstream msg;
    msg << "(Pur) word check up to length " << max_len << " exceeds the budget of " << budget
        << " words; use the Monte Carlo check instead";
    throw Error(ErrorKind::kBudget, msg.str());
  }

  HermitianSpan span(k);
  span.add(ComplexMatrix::Identity(k, k), tol);
  JointEigenspaces joint(k);
  bool found_non_scalar = false;
  for (int len = 1; len <= max_len; ++len) {
    report.word_length_checked = len;
    for_each_word(m, len, budget,
                  [&](const std::vector<int>&, double, const ComplexMatrix& product) {
                    const ComplexMatrix g = product.adjoint() * product;
                    ++report.words_checked;
                    if (k == 2) {
                      if (!proportional_to_identity(g, tol)) found_non_scalar = true;
                      return;
                    }
                    if (span.rank() < span.full()) span.add(g, tol);
                    if (!joint.empty()) joint.refine(g, tol);
                  });
    // Either certificate is final; longer words cannot undo it.
    if (found_non_scalar || span.rank() == span.full()) break;
  }

  if (k == 2) {
    if (found_non_scalar) {
      report.verdict = PurVerdict::kHoldsCertified;
      report.detail = "some product v_w* v_w is not proportional to Id";
    } else {
      report.verdict = PurVerdict::kViolated;
      report.witness = ComplexMatrix::Identity(k, k);
      report.detail = "every enumerated v_w* v_w is proportional to Id";
    }
    return report;
  }
  if (!joint.empty()) {
    const ComplexMatrix& basis = joint.candidates().front();
    report.verdict = PurVerdict::kViolated;
    report.witness = basis * basis.adjoint();
    report.detail = "all enumerated v_w* v_w share an eigenspace of dimension " +
                    std::to_string(basis.cols());
  } else if (span.rank() == span.full()) {
    report.verdict = PurVerdict::kHoldsCertified;
    report.detail = "products v_w* v_w span all Hermitian matrices";
  } else {
    report.verdict = PurVerdict::kInconclusive;
    report.detail = "Hermitian span has dimension " + std::to_string(span.rank()) + " of " +
                    std::to_string(span.full()) + " and no common eigenspace was found";
  }
  return report;
}

PurReport check_pur_montecarlo(const KrausMeasure& m, int n_steps, int n_traj,
                               std::uint64_t seed, double tol, unsigned threads) {
  if (n_steps < 1 || n_traj < 1) {
    throw Error(ErrorKind::kInvalidInput, "Monte Carlo check needs n_steps >= 1 and n_traj >= 1");
  }
  const auto kernel = std::make_shared<const TransitionKernel>(m);
  const std::vector<int> grid = checkpoint_grid(n_steps);
  const DensityMatrix start = DensityMatrix::maximally_mixed(m.dim());
  TrackingOptions options;
  options.lyapunov = false;

  const auto samples = parallel_map(
      static_cast<std::size_t>(n_traj), threads, [&](std::size_t t) {
        TrajectoryState s = TrajectoryState::density(kernel, start, mix_seed(seed, t), 0, options);
        std::vector<double> values;
        values.reserve(grid.size());
        for (int target : grid) {
          while (s.n() < target) s.step();
          values.push_back(martingale_lambda2(s));
        }
        return values;
      });

  PurReport report;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    std::vector<double> column;
    column.reserve(samples.size());
    for (const auto& row : samples) column.push_back(row[c]);
    PurDecayPoint point{grid[c], stats::median(column), stats::quantile(column, 0.9)};
    report.mc_statistics.push_back(point);
    if (point.median_lambda2 > kResolvedLambda2) {
      xs.push_back(point.n);
      ys.push_back(std::log(point.median_lambda2));
    }
  }
  const double final_median = report.mc_statistics.back().median_lambda2;
  std::ostringstream detail;
  if (xs.size() >= 3) {
    report.mc_fit = stats::fit_line(xs, ys);
    detail << "log-linear fit slope " << report.mc_fit->slope << ", R^2 "
           << report.mc_fit->r_squared << "; ";
  }
  detail << "median lambda2 at n=" << report.mc_statistics.back().n << " is " << final_median;
  const bool decays = report.mc_fit && report.mc_fit->slope < 0.0 && report.mc_fit->r_squared > 0.9;
  const bool below = final_median < tol;
  if (below && (decays || xs.size() < 3)) {
    report.verdict = PurVerdict::kHoldsLikely;
  } else {
    report.verdict = PurVerdict::kInconclusive;
    detail << (decays ? " (decaying but above tolerance)" : " (plateau: violation likely)");
  }
  report.detail = detail.str();
  return report;
}

ContractivityReport contractivity_diagnostic(const KrausMeasure& m, int n_steps, int n_traj,
                                             std::uint64_t seed, unsigned threads) {
  if (n_steps < 0 || n_traj < 1) {
    throw Error(ErrorKind::kInvalidInput, "contractivity needs n_steps >= 0 and n_traj >= 1");
  }
  if (m.dim() < 2) throw Error(ErrorKind::kInvalidInput, "contractivity needs k >= 2");
  const auto kernel = std::make_shared<const TransitionKernel>(m);
  const DensityMatrix start = DensityMatrix::maximally_mixed(m.dim());
  TrackingOptions options;
  options.lyapunov = false;
  ContractivityReport report;
  report.n_steps = n_steps;
  report.n_traj = n_traj;
  report.ratio_samples = parallel_map(
      static_cast<std::size_t>(n_traj), threads, [&](std::size_t t) {
        TrajectoryState s = TrajectoryState::density(kernel, start, mix_seed(seed, t), 0, options);
        while (s.n() < n_steps) s.step();
        const auto [a1, a2] = numerics::top_two_singular_values(s.normalized_product());
        return a2 / a1;
      });
  report.min_ratio = *std::min_element(report.ratio_samples.begin(), report.ratio_samples.end());
  report.median_ratio = stats::median(report.ratio_samples);
  report.p90_ratio = stats::quantile(report.ratio_samples, 0.9);
  return report;
}

nlohmann::json to_json(const PurReport& report) {
  nlohmann::json j;
  j["verdict"] = to_string(report.verdict);
  j["word_length_checked"] = report.word_length_checked;
  j["words_checked"] = report.words_checked;
  j["detail"] = report.detail;
  if (report.witness) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < report.witness->rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < report.witness->cols(); ++c) {
        const Complex z = (*report.witness)(r, c);
        row.push_back({z.real(), z.imag()});
      }
      rows.push_back(std::move(row));
    }
    j["witness"] = std::move(rows);
  } else {
    j["witness"] = nullptr;
  }
  if (!report.mc_statistics.empty()) {
    nlohmann::json table = nlohmann::json::array();
    for (const auto& p : report.mc_statistics) {
      table.push_back({{"n", p.n}, {"median_lambda2", p.median_lambda2},
                       {"p90_lambda2", p.p90_lambda2}});
    }
    j["mc_statistics"] = std::move(table);
  }
  if (report.mc_fit) {
    j["mc_fit"] = {{"slope", report.mc_fit->slope},
                   {"intercept", report.mc_fit->intercept},
                   {"r_squared", report.mc_fit->r_squared},
                   {"points", report.mc_fit->points}};
  }
  return j;
}

nlohmann::json to_json(const ContractivityReport& report) {
  return {{"n_steps", report.n_steps},
          {"n_traj", report.n_traj},
          {"min_ratio", report.min_ratio},
          {"median_ratio", report.median_ratio},
          {"p90_ratio", report.p90_ratio}};
}

void write_decay_csv(std::ostream& out, const PurReport& report) {
  out << "n,median_lambda2,p90_lambda2\n";
  char buf[96];
  for (const auto& p : report.mc_statistics) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", p.n, p.median_lambda2, p.p90_lambda2);
    out << buf;
  }
}

}  // namespace qtraj
