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

#include "qtraj/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

#include "qtraj/error.hpp"

namespace qtraj {
namespace {

constexpr double kUnitaryTolerance = 1e-12;
constexpr double kResolvedSingularValue = 1e-12;
constexpr std::size_t kMaxSnapshots = 64;

double safe_log(double x) { return std::log(std::max(x, numerics::kSingularValueFloor)); }

}  // namespace

TransitionKernel::TransitionKernel(const KrausMeasure& m) : model_(m) {
  model_.require_stochastic();
  const int k = model_.dim();
  for (const auto& e : model_.elements()) {
    const ComplexMatrix g = e.matrix.adjoint() * e.matrix;
    const double c2 = g.trace().real() / k;
    const bool scaled = c2 > 0.0 && (g - c2 * ComplexMatrix::Identity(k, k)).norm() <=
                                        kUnitaryTolerance * c2 * std::sqrt(double(k));
    unitary_scale_.push_back(scaled ? std::sqrt(c2) : 0.0);
  }
}

TrajectoryState::TrajectoryState(KernelPtr kernel, StateMode mode, std::uint64_t seed,
                                 int window_start, TrackingOptions options)
    : kernel_(std::move(kernel)), mode_(mode), rng_(seed), options_(options) {
  if (!kernel_) throw Error(ErrorKind::kInvalidInput, "trajectory needs a transition kernel");
  if (window_start < 0) throw Error(ErrorKind::kInvalidInput, "window start must be >= 0");
  const int k = kernel_->dim();
  window_start_ = window_start;
  if (options_.product) {
    w_ = ComplexMatrix::Identity(k, k);
    if (window_start_ > 0) window_ = ComplexMatrix::Identity(k, k);
  }
  if (options_.lyapunov) {
    frame_ = ComplexMatrix::Identity(k, k);
    lyap_logs_.assign(static_cast<std::size_t>(k), 0.0);
    snapshots_.push_back(lyap_logs_);
  }
}

TrajectoryState TrajectoryState::pure(KernelPtr kernel, const ProjectivePoint& x0,
                                      std::uint64_t seed, int window_start,
                                      TrackingOptions options) {
  TrajectoryState s(std::move(kernel), StateMode::kPure, seed, window_start, options);
  if (x0.dim() != s.dim()) {
    throw Error(ErrorKind::kInvalidInput, "initial point dimension does not match the model");
  }
  s.x_ = x0;
  s.initial_ = x0;
  return s;
}

TrajectoryState TrajectoryState::density(KernelPtr kernel, const DensityMatrix& rho0,
                                         std::uint64_t seed, int window_start,
                                         TrackingOptions options) {
  TrajectoryState s(std::move(kernel), StateMode::kDensity, seed, window_start, options);
  if (rho0.dim() != s.dim()) {
    throw Error(ErrorKind::kInvalidInput, "initial density dimension does not match the model");
  }
  s.rho_ = rho0.matrix();
  return s;
}

TrajectoryState TrajectoryState::sampled(KernelPtr kernel, const EmpiricalMeasure& nu,
                                         std::uint64_t seed, int window_start,
                                         TrackingOptions options) {
  TrajectoryState s(std::move(kernel), StateMode::kPure, seed, window_start, options);
  if (nu.dim() != s.dim()) {
    throw Error(ErrorKind::kInvalidInput, "initial measure dimension does not match the model");
  }
  s.x_ = nu.sample(s.rng_);
  s.initial_ = s.x_;
  return s;
}

std::vector<double> TrajectoryState::outcome_weights() const {
  const TransitionKernel& kr = *kernel_;
  std::vector<double> p(kr.model().size(), 0.0);
  for (int i : kr.support()) {
    if (mode_ == StateMode::kPure) {
      p[i] = kr.weight(i) * (kr.matrix(i) * x_->vector()).squaredNorm();
    } else {
      p[i] = kr.weight(i) * (kr.matrix(i) * rho_ * kr.matrix(i).adjoint()).trace().real();
    }
  }
  return p;
}

int TrajectoryState::sample_outcome(const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += std::max(w, 0.0);
  if (!(total >= kDeadStateThreshold)) {
    std::ostringstream msg;
    msg << "dead state at step " << n_ << ": total outcome probability " << total;
    throw Error(ErrorKind::kDeadState, msg.str());
  }
  const double u = uniform01(rng_) * total;
  double running = 0.0;
  int last = -1;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0)) continue;
    running += weights[i];
    last = static_cast<int>(i);
    if (u < running) return last;
  }
  return last;
}

int TrajectoryState::step() {
  const int i = sample_outcome(outcome_weights());
  const ComplexMatrix& v = kernel_->matrix(i);
  if (mode_ == StateMode::kPure) {
    x_ = qtraj::apply(v, *x_);
  } else {
    ComplexMatrix next = v * rho_ * v.adjoint();
    const double tr = next.trace().real();
    rho_ = numerics::hermitian_part(next / tr);
  }
  if (options_.product) update_product(i);
  if (options_.lyapunov) update_lyapunov(i);
  if (options_.history) history_.push_back(i);
  ++n_;
  if (options_.lyapunov && n_ % snapshot_stride_ == 0) record_snapshot();
  return i;
}

void TrajectoryState::update_product(int i) {
  const ComplexMatrix& v = kernel_->matrix(i);
  const double scale = kernel_->unitary_scale(i);
  ComplexMatrix next = v * w_;
  double norm = scale;
  if (scale == 0.0) {
    all_scaled_unitary_ = false;
    norm = numerics::operator_norm(next);
  }
  if (!(norm > numerics::kSingularValueFloor)) {
    throw Error(ErrorKind::kDeadState, "matrix product annihilated");
  }
  w_ = next / norm;
  log_norm_ += std::log(norm);

  if (window_start_ > 0 && n_ >= window_start_) {
    ComplexMatrix wnext = v * window_;
    const double wnorm = scale != 0.0 ? scale : numerics::operator_norm(wnext);
    if (!(wnorm > numerics::kSingularValueFloor)) {
      throw Error(ErrorKind::kDeadState, "window product annihilated");
    }
    window_ = wnext / wnorm;
  }
}

void TrajectoryState::update_lyapunov(int i) {
  const ComplexMatrix& v = kernel_->matrix(i);
  const double scale = kernel_->unitary_scale(i);
  const Eigen::Index k = frame_.rows();
  if (scale != 0.0) {
    // |R_jj| = scale for every column of a scaled unitary image.
    frame_ = v * frame_ / scale;
    const double l = std::log(scale);
    for (auto& x : lyap_logs_) x += l;
    return;
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(v * frame_);
  const ComplexMatrix& packed = qr.matrixQR();
  for (Eigen::Index j = 0; j < k; ++j) {
    lyap_logs_[static_cast<std::size_t>(j)] += safe_log(std::abs(packed(j, j)));
  }
  frame_ = qr.householderQ() * ComplexMatrix::Identity(k, k);
}

void TrajectoryState::record_snapshot() {
  snapshots_.push_back(lyap_logs_);
  if (snapshots_.size() > kMaxSnapshots) {
    std::vector<std::vector<double>> thinned;
    for (std::size_t j = 0; j < snapshots_.size(); j += 2) thinned.push_back(snapshots_[j]);
    snapshots_ = std::move(thinned);
    snapshot_stride_ *= 2;
  }
}

const ProjectivePoint& TrajectoryState::point() const {
  if (mode_ != StateMode::kPure) {
    throw Error(ErrorKind::kInvalidInput, "point() requires a pure-mode trajectory");
  }
  return *x_;
}

const ComplexMatrix& TrajectoryState::density_matrix() const {
  if (mode_ != StateMode::kDensity) {
    throw Error(ErrorKind::kInvalidInput, "density_matrix() requires a density-mode trajectory");
  }
  return rho_;
}

ProjectivePoint TrajectoryState::state_ray() const {
  if (mode_ == StateMode::kPure) return *x_;
  const numerics::HermitianEigen eig = numerics::herm_eig(rho_);
  return ProjectivePoint::from_vector(eig.eigenvectors.col(eig.eigenvectors.cols() - 1));
}

const ComplexMatrix& TrajectoryState::normalized_product() const {
  if (!options_.product) {
    throw Error(ErrorKind::kInvalidInput, "product tracking is disabled for this trajectory");
  }
  return w_;
}

const ComplexMatrix& TrajectoryState::window_product() const {
  if (!options_.product) {
    throw Error(ErrorKind::kInvalidInput, "product tracking is disabled for this trajectory");
  }
  return window_start_ > 0 ? window_ : w_;
}

DensityMatrix martingale_M(const TrajectoryState& s) {
  const ComplexMatrix& w = s.normalized_product();
  const ComplexMatrix g = w.adjoint() * w;
  const double tr = g.trace().real();
  if (!(tr > 1e-20)) throw Error(ErrorKind::kDeadState, "W_n* W_n has vanishing trace");
  return DensityMatrix::project(g / tr);
}

double martingale_lambda2(const TrajectoryState& s) {
  if (s.dim() < 2) return 0.0;
  const ComplexMatrix& w = s.normalized_product();
  const ComplexMatrix g = w.adjoint() * w;
  const double tr = g.trace().real();
  if (!(tr > 1e-20)) throw Error(ErrorKind::kDeadState, "W_n* W_n has vanishing trace");
  // Eigenvalues of M are the squared singular values of W over their sum.
  const RealVector a = numerics::singular_values(w);
  return a(1) * a(1) / a.squaredNorm();
}

Estimators mle_estimators(const TrajectoryState& s) {
  const numerics::SvdResult d = numerics::svd(s.window_product());
  if (!(d.singular_values(0) > numerics::kSingularValueFloor)) {
    throw Error(ErrorKind::kDeadState, "estimator window product has rank zero");
  }
  return {ProjectivePoint::from_vector(d.right_vectors.col(0)),
          ProjectivePoint::from_vector(d.left_vectors.col(0))};
}

ComplexMatrix polar_unitary(const TrajectoryState& s) {
  return numerics::polar(s.normalized_product()).unitary;
}

LyapunovReport lyapunov_report(const TrajectoryState& s) {
  const int k = s.dim();
  const int n = s.n();
  if (n < 1) throw Error(ErrorKind::kInvalidInput, "lyapunov_report needs at least one step");
  if (!s.options().lyapunov || !s.options().product) {
    throw Error(ErrorKind::kInvalidInput, "lyapunov_report needs product and frame tracking");
  }
  const double nd = static_cast<double>(n);
  const double sentinel = kLyapunovSentinelPerStep * nd;
  const double neg_inf = -std::numeric_limits<double>::infinity();

  std::vector<double> benettin = s.lyapunov_logs();
  std::sort(benettin.begin(), benettin.end(), std::greater<>());

  // Cumulative logs L_p = log |wedge^p W_n|.
  std::vector<double> cumulative(static_cast<std::size_t>(k));
  RealVector a = RealVector::Ones(k);
  if (!s.product_is_scaled_unitary()) a = numerics::singular_values(s.normalized_product());
  double running = 0.0;
  double last_increment = std::numeric_limits<double>::infinity();
  bool dead = false;
  for (int p = 0; p < k; ++p) {
    double increment;
    if (a(p) >= kResolvedSingularValue) {
      increment = s.log_norm() + std::log(a(p));
    } else {
      increment = benettin[static_cast<std::size_t>(p)];
    }
    increment = std::min(increment, last_increment);
    if (dead || increment < sentinel) {
      dead = true;
      cumulative[static_cast<std::size_t>(p)] = neg_inf;
      continue;
    }
    running += increment;
    last_increment = increment;
    cumulative[static_cast<std::size_t>(p)] = running;
  }

  LyapunovReport report;
  report.n_used = n;
  for (int p = 0; p < k; ++p) {
    const double lp = cumulative[static_cast<std::size_t>(p)];
    const double prev = p == 0 ? 0.0 : cumulative[static_cast<std::size_t>(p - 1)];
    report.partial_sums.push_back(lp == neg_inf ? neg_inf : lp / nd);
    report.gamma_hat.push_back(lp == neg_inf ? neg_inf : (lp - prev) / nd);
  }

  // Batch means over equally spaced snapshots of the QR accumulators, with
  // columns matched to exponents by their final ordering.
  const auto& snaps = s.lyapunov_snapshots();
  const std::vector<double>& logs = s.lyapunov_logs();
  std::vector<int> column(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) column[static_cast<std::size_t>(j)] = j;
  std::stable_sort(column.begin(), column.end(),
                   [&](int x, int y) { return logs[x] > logs[y]; });
  const double stride = static_cast<double>(s.snapshot_stride());
  const std::size_t batches = snaps.size() - 1;
  for (int p = 0; p < k; ++p) {
    if (batches < 2 || report.gamma_hat[static_cast<std::size_t>(p)] == neg_inf) {
      report.stderr_hat.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const int c = column[static_cast<std::size_t>(p)];
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t b = 1; b <= batches; ++b) {
      const double rate = (snaps[b][c] - snaps[b - 1][c]) / stride;
      sum += rate;
      sum_sq += rate * rate;
    }
    const double bd = static_cast<double>(batches);
    const double mean = sum / bd;
    const double var = std::max(0.0, (sum_sq - bd * mean * mean) / (bd - 1.0));
    report.stderr_hat.push_back(std::sqrt(var / bd));
  }
  return report;
}

double compute_f(const KrausMeasure& m, int n, std::uint64_t budget) {
  m.require_stochastic();
  if (m.dim() < 2) throw Error(ErrorKind::kInvalidInput, "f(n) needs dimension k >= 2");
  double total = 0.0;
  for_each_word(m, n, budget,
                [&](const std::vector<int>&, double weight, const ComplexMatrix& product) {
                  if (weight == 0.0) return;
                  const auto [a1, a2] = numerics::top_two_singular_values(product);
                  total += weight * a1 * a2;
                });
  return total;
}

double exact_cylinder_probability(const KrausMeasure& m, const ComplexMatrix& rho,
                                  const std::vector<int>& word) {
  if (rho.rows() != m.dim() || rho.cols() != m.dim()) {
    throw Error(ErrorKind::kInvalidInput, "cylinder probability: dimension mismatch");
  }
  ComplexMatrix current = rho;
  double weight = 1.0;
  for (int i : word) {
    if (i < 0 || static_cast<std::size_t>(i) >= m.size()) {
      throw Error(ErrorKind::kInvalidInput, "cylinder probability: outcome index out of range");
    }
    const auto& e = m.elements()[static_cast<std::size_t>(i)];
    current = e.matrix * current * e.matrix.adjoint();
    weight *= e.weight;
  }
  return weight * current.trace().real();
}

TrajectoryDumpWriter::TrajectoryDumpWriter(std::ostream& out, int dim) : out_(out), dim_(dim) {
  out_ << "n,outcome";
  for (int i = 0; i < dim_; ++i) out_ << ",x_re_" << i << ",x_im_" << i;
  out_ << ",log_norm,lambda2_of_M,d_xy";
  for (int p = 1; p <= dim_; ++p) out_ << ",gamma_partial_" << p;
  out_ << '\n';
}

void TrajectoryDumpWriter::write_row(const TrajectoryState& s, int outcome) {
  char buf[64];
  const auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, ",%.17g", v);
    out_ << buf;
  };
  out_ << s.n() << ',' << outcome;
  const ProjectivePoint x = s.state_ray();
  for (int i = 0; i < dim_; ++i) {
    put(x.vector()(i).real());
    put(x.vector()(i).imag());
  }
  put(s.log_norm());
  put(martingale_lambda2(s));
  put(distance(x, mle_estimators(s).y_hat));
  if (s.n() == 0) {
    for (int p = 0; p < dim_; ++p) put(0.0);
  } else {
    for (double v : lyapunov_report(s).partial_sums) put(v);
  }
  out_ << '\n';
}

}  // namespace qtraj
