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

#include "qtraj/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "qtraj/error.hpp"
#include "qtraj/parallel.hpp"
#include "qtraj/purification.hpp"
#include "qtraj/trajectory.hpp"

namespace qtraj {
namespace {

namespace fs = std::filesystem;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kResolvedDistance = 1e-13;
constexpr double kFloorMultiple = 3.0;
constexpr double kRateSlack = 0.05;
constexpr std::uint64_t kInvariantStream = 0x1A7A11A7ULL;
constexpr std::uint64_t kReferenceStream = 0x5EFE5E7CULL;
constexpr std::uint64_t kInitialStream = 0x1A1714ULL;

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
  return mix_seed(mix_seed(master, stream), index);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Complex parse_complex(const nlohmann::json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw Error(ErrorKind::kParse, where + ": expected a number or [re, im]");
}

template <class T>
T field(const nlohmann::json& j, const char* name, T fallback) {
  if (!j.contains(name) || j[name].is_null()) return fallback;
  try {
    return j[name].get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("config field '") + name + "': " + e.what());
  }
}

KrausMeasure parse_model(const nlohmann::json& j, const std::string& base_dir) {
  if (j.is_string()) {
    const auto ref = j.get<std::string>();
    const fs::path p = fs::path(base_dir) / ref;
    if (!fs::path(ref).is_absolute() && fs::exists(p)) return load_model(p.string());
    return resolve_model(ref);
  }
  if (!j.is_object()) throw Error(ErrorKind::kParse, "model: expected an object or a string");
  if (j.contains("file")) {
    fs::path p = j["file"].get<std::string>();
    if (p.is_relative()) p = fs::path(base_dir) / p;
    return load_model(p.string());
  }
  if (j.contains("builtin")) {
    ModelParams params;
    if (j.contains("params")) {
      if (!j["params"].is_object()) throw Error(ErrorKind::kParse, "model.params: expected an object");
      for (const auto& [key, value] : j["params"].items()) {
        if (!value.is_number()) {
          throw Error(ErrorKind::kParse, "model.params." + key + ": expected a number");
        }
        params[key] = value.get<double>();
      }
    }
    return builtin_model(j["builtin"].get<std::string>(), params);
  }
  if (j.contains("elements")) return from_json(j);
  throw Error(ErrorKind::kParse, "model: expected \"builtin\", \"file\" or inline \"elements\"");
}

void require_positive(int value, const char* name) {
  if (value < 1) throw Error(ErrorKind::kInvalidInput, std::string(name) + " must be >= 1");
}

std::shared_ptr<const TransitionKernel> make_kernel(const ExperimentConfig& cfg) {
  if (!cfg.model) throw Error(ErrorKind::kInvalidInput, "experiment config has no model");
  return std::make_shared<const TransitionKernel>(*cfg.model);
}

TrackingOptions points_only() {
  TrackingOptions o;
  o.product = false;
  o.lyapunov = false;
  return o;
}

// States of n trajectories at the given (sorted) steps: result[s][t].
std::vector<std::vector<ProjectivePoint>> sample_states(
    const std::shared_ptr<const TransitionKernel>& kernel, const ExperimentConfig& cfg,
    std::uint64_t stream, std::size_t count, const std::vector<int>& steps) {
  const int dim = kernel->dim();
  auto per_traj = parallel_map(count, cfg.threads, [&](std::size_t t) {
    const std::uint64_t seed = stream_seed(cfg.seed, stream, t);
    Rng init_rng(mix_seed(seed, kInitialStream));
    TrajectoryState s =
        TrajectoryState::pure(kernel, draw_initial(cfg.initial, dim, init_rng), seed, 0,
                              points_only());
    std::vector<ProjectivePoint> out;
    out.reserve(steps.size());
    for (int target : steps) {
      while (s.n() < target) s.step();
      out.push_back(s.point());
    }
    return out;
  });
  std::vector<std::vector<ProjectivePoint>> by_step(steps.size());
  for (auto& v : by_step) v.reserve(count);
  for (auto& row : per_traj) {
    for (std::size_t i = 0; i < steps.size(); ++i) by_step[i].push_back(std::move(row[i]));
  }
  return by_step;
}

EmpiricalMeasure mix_steps(const std::vector<std::vector<ProjectivePoint>>& by_step,
                           std::size_t first, std::size_t m, std::size_t begin, std::size_t end) {
  std::vector<EmpiricalMeasure> parts;
  for (std::size_t r = 0; r < m; ++r) {
    const auto& pts = by_step[first + r];
    parts.push_back(EmpiricalMeasure::uniform(
        std::vector<ProjectivePoint>(pts.begin() + static_cast<std::ptrdiff_t>(begin),
                                     pts.begin() + static_cast<std::ptrdiff_t>(end))));
  }
  return cesaro_mix(parts);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kInvalidInput, "cannot write " + path.string());
  out << text;
}

std::string complex_row(const ProjectivePoint& x) {
  std::string s;
  for (Eigen::Index i = 0; i < x.vector().size(); ++i) {
    s += "," + fmt(x.vector()(i).real()) + "," + fmt(x.vector()(i).imag());
  }
  return s;
}

std::string point_header(int dim) {
  std::string s;
  for (int i = 0; i < dim; ++i) {
    s += ",x_re_" + std::to_string(i) + ",x_im_" + std::to_string(i);
  }
  return s;
}

nlohmann::json matrix_json(const ComplexMatrix& a) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < a.cols(); ++c) row.push_back({a(r, c).real(), a(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json maybe_number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& j, const std::string& base_dir) {
  if (!j.is_object()) throw Error(ErrorKind::kParse, "config: expected a JSON object");
  ExperimentConfig cfg;
  if (!j.contains("model")) throw Error(ErrorKind::kParse, "config: missing field 'model'");
  cfg.model_spec = j["model"];
  cfg.model = std::make_shared<const KrausMeasure>(parse_model(j["model"], base_dir));
  cfg.seed = field<std::uint64_t>(j, "seed", cfg.seed);
  cfg.n_traj = field<int>(j, "n_traj", cfg.n_traj);
  cfg.n_steps = field<int>(j, "n_steps", cfg.n_steps);
  cfg.burn_in = field<int>(j, "burn_in", cfg.burn_in);
  cfg.checkpoints = field<std::vector<int>>(j, "checkpoints", {});
  cfg.initial = parse_initial(j.contains("initial") ? j["initial"] : nlohmann::json());
  cfg.output_dir = field<std::string>(j, "output_dir", cfg.output_dir);
  cfg.threads = field<unsigned>(j, "threads", cfg.threads);
  cfg.offsets = field<std::vector<int>>(j, "offsets", cfg.offsets);
  cfg.block_len = field<int>(j, "block_len", cfg.block_len);
  cfg.w1_max_points = field<std::size_t>(j, "w1_max_points", cfg.w1_max_points);
  cfg.reference_points = field<int>(j, "reference_points", cfg.reference_points);
  cfg.max_word_len = field<int>(j, "max_word_len", cfg.max_word_len);
  cfg.z = field<double>(j, "z", cfg.z);
  cfg.compare_rate = field<bool>(j, "compare_rate", cfg.compare_rate);
  cfg.force = field<bool>(j, "force", cfg.force);

  require_positive(cfg.n_traj, "n_traj");
  require_positive(cfg.n_steps, "n_steps");
  if (cfg.burn_in < 0) {
    throw Error(ErrorKind::kInvalidInput, "burn_in must be >= 0");
  }
  for (int c : cfg.checkpoints) {
    if (c < 0 || c > cfg.n_steps) {
      throw Error(ErrorKind::kInvalidInput,
                  "checkpoint " + std::to_string(c) + " is outside [0, n_steps]");
    }
  }
  for (int l : cfg.offsets) {
    if (l < 0) throw Error(ErrorKind::kInvalidInput, "offsets must be >= 0");
  }
  if (cfg.block_len < 1) throw Error(ErrorKind::kInvalidInput, "block_len must be >= 1");
  if (cfg.w1_max_points < 2) throw Error(ErrorKind::kInvalidInput, "w1_max_points must be >= 2");
  require_positive(cfg.reference_points, "reference_points");
  require_positive(cfg.max_word_len, "max_word_len");
  const int dim = cfg.model->dim();
  if (cfg.initial.kind == InitialCondition::Kind::kBasis &&
      (cfg.initial.index < 0 || cfg.initial.index >= dim)) {
    throw Error(ErrorKind::kInvalidInput, "initial.index out of range");
  }
  if (cfg.initial.kind == InitialCondition::Kind::kPure && cfg.initial.vector.size() != dim) {
    throw Error(ErrorKind::kInvalidInput, "initial.vector has the wrong dimension");
  }
  if (cfg.initial.kind == InitialCondition::Kind::kDensity && cfg.initial.density.rows() != dim) {
    throw Error(ErrorKind::kInvalidInput, "initial.matrix has the wrong dimension");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kInvalidInput, "cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kParse, path + ": " + e.what());
  }
  return parse_config(j, fs::path(path).parent_path().string());
}

InitialCondition parse_initial(const nlohmann::json& j) {
  InitialCondition initial;
  if (j.is_null()) return initial;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "fubini_study") {
      initial.kind = InitialCondition::Kind::kFubiniStudy;
      return initial;
    }
    throw Error(ErrorKind::kParse, "initial: unknown initial law '" + s + "'");
  }
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw Error(ErrorKind::kParse, "initial: expected an object with a \"type\" string");
  }
  const auto type = j["type"].get<std::string>();
  if (type == "basis") {
    initial.kind = InitialCondition::Kind::kBasis;
    initial.index = field<int>(j, "index", 0);
  } else if (type == "pure") {
    initial.kind = InitialCondition::Kind::kPure;
    if (!j.contains("vector") || !j["vector"].is_array()) {
      throw Error(ErrorKind::kParse, "initial.vector: expected an array");
    }
    const auto& v = j["vector"];
    initial.vector.resize(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      initial.vector(static_cast<Eigen::Index>(i)) =
          parse_complex(v[i], "initial.vector[" + std::to_string(i) + "]");
    }
  } else if (type == "density") {
    initial.kind = InitialCondition::Kind::kDensity;
    if (!j.contains("matrix") || !j["matrix"].is_array()) {
      throw Error(ErrorKind::kParse, "initial.matrix: expected an array of rows");
    }
    const auto& rows = j["matrix"];
    const auto k = static_cast<Eigen::Index>(rows.size());
    initial.density.resize(k, k);
    for (Eigen::Index r = 0; r < k; ++r) {
      const auto& row = rows[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != k) {
        throw Error(ErrorKind::kParse, "initial.matrix[" + std::to_string(r) + "]: expected " +
                                           std::to_string(k) + " entries");
      }
      for (Eigen::Index c = 0; c < k; ++c) {
        initial.density(r, c) = parse_complex(row[static_cast<std::size_t>(c)],
                                           "initial.matrix[" + std::to_string(r) + "][" +
                                               std::to_string(c) + "]");
      }
    }
    DensityMatrix check(initial.density);
    (void)check;
  } else if (type == "fubini_study") {
    initial.kind = InitialCondition::Kind::kFubiniStudy;
  } else {
    throw Error(ErrorKind::kParse, "initial.type: unknown value '" + type + "'");
  }
  return initial;
}

ProjectivePoint draw_initial(const InitialCondition& initial, int dim, Rng& rng) {
  switch (initial.kind) {
    case InitialCondition::Kind::kBasis:
      return ProjectivePoint::basis(dim, initial.index);
    case InitialCondition::Kind::kPure:
      return ProjectivePoint::from_vector(initial.vector);
    case InitialCondition::Kind::kFubiniStudy:
      return sample_fubini_study(dim, rng);
    case InitialCondition::Kind::kDensity: {
      const numerics::HermitianEigen eig = numerics::herm_eig(initial.density);
      const double u = uniform01(rng) * eig.eigenvalues.cwiseMax(0.0).sum();
      double running = 0.0;
      Eigen::Index chosen = eig.eigenvalues.size() - 1;
      for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
        running += std::max(eig.eigenvalues(i), 0.0);
        if (u < running) {
          chosen = i;
          break;
        }
      }
      return ProjectivePoint::from_vector(eig.eigenvectors.col(chosen));
    }
  }
  throw Error(ErrorKind::kInvalidInput, "unknown initial law");
}

void gate_assumptions(const ExperimentConfig& cfg, bool need_pur, bool need_phi_erg) {
  if (cfg.force) return;
  if (need_phi_erg) {
    const PhiErgReport erg = check_phi_erg(*cfg.model);
    if (!erg.holds) {
      throw Error(ErrorKind::kAssumption,
                  "(phi-Erg) fails: fixed-point space has dimension " +
                      std::to_string(erg.fixed_point_dimension) + " (use --force to override)");
    }
  }
  if (need_pur) {
    const PurReport pur = check_pur_words(*cfg.model, cfg.max_word_len);
    if (pur.verdict == PurVerdict::kViolated) {
      throw Error(ErrorKind::kAssumption,
                  "(Pur) is violated: " + pur.detail + " (use --force to override)");
    }
  }
}

InvariantResult run_invariant_estimate(const ExperimentConfig& cfg) {
  const SpectralReport spectral = analyze(*cfg.model);
  const auto kernel = make_kernel(cfg);
  const std::size_t m = static_cast<std::size_t>(spectral.period_m);
  std::vector<int> steps;
  for (std::size_t r = 0; r < m; ++r) steps.push_back(cfg.n_steps + static_cast<int>(r));
  const auto by_step =
      sample_states(kernel, cfg, 0, static_cast<std::size_t>(cfg.n_traj), steps);
  InvariantResult result;
  result.nu_hat = mix_steps(by_step, 0, m, 0, static_cast<std::size_t>(cfg.n_traj));
  result.rho_hat = result.nu_hat.mean_projector();
  result.rho_inv = spectral.rho_inv;
  result.rho_check = numerics::trace_norm(result.rho_hat - spectral.rho_inv);
  result.period_m = spectral.period_m;
  result.gap_lambda = spectral.gap_lambda;
  return result;
}

ConvergenceResult run_convergence(const ExperimentConfig& cfg) {
  gate_assumptions(cfg, true, true);
  const SpectralReport spectral = analyze(*cfg.model);
  const auto kernel = make_kernel(cfg);
  const std::size_t m = static_cast<std::size_t>(spectral.period_m);

  std::vector<int> checkpoints = cfg.checkpoints;
  if (checkpoints.empty()) {
    for (int n = 0; n <= std::min(16, cfg.n_steps); n += 2) checkpoints.push_back(n);
  }
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());

  // Each side of every W1 problem holds at most w1_max_points atoms.
  const std::size_t per_step = std::max<std::size_t>(
      1, std::min<std::size_t>(static_cast<std::size_t>(cfg.n_traj), cfg.w1_max_points / m));

  std::vector<int> steps;
  for (int n : checkpoints) {
    for (std::size_t r = 0; r < m; ++r) steps.push_back(static_cast<int>(m) * n + static_cast<int>(r));
  }
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
  const auto by_step = sample_states(kernel, cfg, 0, per_step, steps);

  std::vector<int> inv_steps;
  for (std::size_t r = 0; r < m; ++r) inv_steps.push_back(cfg.n_steps + static_cast<int>(r));
  const auto inv = sample_states(kernel, cfg, kInvariantStream, 2 * per_step, inv_steps);
  const EmpiricalMeasure nu_inv = mix_steps(inv, 0, m, 0, per_step);
  const EmpiricalMeasure nu_inv_b = mix_steps(inv, 0, m, per_step, 2 * per_step);
  const std::size_t budget = std::max(cfg.w1_max_points, kDefaultTransportBudget);

  ConvergenceResult result;
  result.period_m = spectral.period_m;
  result.sample_size = per_step * m;
  result.noise_floor = w1(nu_inv, nu_inv_b, budget);
  std::vector<double> xs;
  std::vector<double> ys;
  for (int n : checkpoints) {
    const auto pos = static_cast<std::size_t>(
        std::lower_bound(steps.begin(), steps.end(), static_cast<int>(m) * n) - steps.begin());
    const EmpiricalMeasure mixed = mix_steps(by_step, pos, m, 0, per_step);
    ConvergenceRow row;
    row.n = n;
    row.w1 = w1(mixed, nu_inv, budget);
    row.in_fit = row.w1 > 0.0 && row.w1 >= kFloorMultiple * result.noise_floor;
    if (row.in_fit) {
      xs.push_back(n);
      ys.push_back(std::log(row.w1));
    }
    result.rows.push_back(row);
  }
  // Only the leading run of resolved checkpoints enters the fit.
  std::size_t lead = 0;
  while (lead < result.rows.size() && result.rows[lead].in_fit) ++lead;
  for (std::size_t i = lead; i < result.rows.size(); ++i) result.rows[i].in_fit = false;
  xs.resize(lead);
  ys.resize(lead);
  if (xs.size() >= 3) {
    result.fit = stats::fit_line(xs, ys);
    result.fit_ok = true;
  }
  return result;
}

UnitaryExampleResult run_unitary_example(const ExperimentConfig& cfg) {
  const auto kernel = make_kernel(cfg);
  const int dim = kernel->dim();
  const auto by_step =
      sample_states(kernel, cfg, 0, static_cast<std::size_t>(cfg.n_traj), {cfg.n_steps});
  const EmpiricalMeasure sample = EmpiricalMeasure::uniform(by_step[0]);
  auto reference_points = parallel_map(
      static_cast<std::size_t>(cfg.reference_points), cfg.threads, [&](std::size_t t) {
        Rng rng(stream_seed(cfg.seed, kReferenceStream, t));
        return sample_fubini_study(dim, rng);
      });
  const EmpiricalMeasure reference = EmpiricalMeasure::uniform(std::move(reference_points));
  UnitaryExampleResult result;
  result.sample_size = sample.size();
  result.reference_size = reference.size();
  result.rho_error_frobenius =
      (sample.mean_projector() - ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim))
          .norm();
  result.w1_to_uniform = w1(sample, reference, std::max(sample.size(), reference.size()));
  return result;
}

FiniteOrbitResult run_finite_orbit(const ExperimentConfig& cfg) {
  const auto kernel = make_kernel(cfg);
  if (kernel->dim() != 2) throw Error(ErrorKind::kInvalidInput, "the finite orbit experiment needs k = 2");
  const double z = cfg.z;
  if (!(std::abs(z) > 0.0) || !std::isfinite(z)) {
    throw Error(ErrorKind::kInvalidInput, "z must be finite and nonzero");
  }
  const auto ray = [](double a) {
    ComplexVector v(2);
    v << 1.0, a;
    return ProjectivePoint::from_vector(v);
  };
  FiniteOrbitResult result;
  for (double a : {z, 1.0 / z, -z, -1.0 / z}) {
    const ProjectivePoint p = ray(a);
    const bool seen = std::any_of(result.atoms.begin(), result.atoms.end(), [&](const OrbitAtom& o) {
      return distance(o.point, p) <= 1e-12;
    });
    if (!seen) result.atoms.push_back({p, 0.0, 0.0});
  }
  const ProjectivePoint start = ray(z);
  const std::size_t atoms = result.atoms.size();
  struct Counts {
    std::vector<long long> hits;
    long long unmatched = 0;
  };
  const auto counts = parallel_map(
      static_cast<std::size_t>(cfg.n_traj), cfg.threads, [&](std::size_t t) {
        TrajectoryState s =
            TrajectoryState::pure(kernel, start, mix_seed(cfg.seed, t), 0, points_only());
        Counts c{std::vector<long long>(atoms, 0), 0};
        while (s.n() < cfg.n_steps) {
          s.step();
          bool matched = false;
          for (std::size_t a = 0; a < atoms; ++a) {
            if (distance(s.point(), result.atoms[a].point) <= 1e-9) {
              ++c.hits[a];
              matched = true;
              break;
            }
          }
          if (!matched) ++c.unmatched;
        }
        return c;
      });
  std::vector<long long> hits(atoms, 0);
  for (const auto& c : counts) {
    for (std::size_t a = 0; a < atoms; ++a) hits[a] += c.hits[a];
    result.unmatched += c.unmatched;
  }
  const double total = static_cast<double>(cfg.n_steps) * cfg.n_traj;
  for (std::size_t a = 0; a < atoms; ++a) {
    auto& atom = result.atoms[a];
    atom.frequency = static_cast<double>(hits[a]) / total;
    atom.expected = 1.0 / static_cast<double>(atoms);
    result.max_abs_error = std::max(result.max_abs_error, std::abs(atom.frequency - atom.expected));
  }
  return result;
}

EstimatorDecayResult run_estimator_decay(const ExperimentConfig& cfg) {
  gate_assumptions(cfg, true, false);
  const auto kernel = make_kernel(cfg);
  const KrausMeasure& model = *cfg.model;
  const int dim = kernel->dim();
  if (dim < 2) throw Error(ErrorKind::kInvalidInput, "estimator decay needs k >= 2");

  EstimatorDecayResult result;
  const PhiErgReport erg = check_phi_erg(model);
  result.E_is_full = erg.holds && erg.E_is_full;
  result.offsets = cfg.offsets;

  // Exact f(n) where the word count stays small.
  std::vector<double> f(static_cast<std::size_t>(cfg.n_steps) + 1, kNaN);
  for (int n = 0; n <= std::min(cfg.n_steps, 12); ++n) {
    try {
      f[static_cast<std::size_t>(n)] = compute_f(model, n, 1u << 16);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kBudget) throw;
      break;
    }
  }

  struct TrajectoryOutput {
    std::vector<double> d;  // d at n = 1..n_steps
    double slope = kNaN;
    double gamma1 = kNaN;
    double gamma2 = kNaN;
  };

  std::vector<double> g1_all;
  std::vector<double> g2_all;
  for (int l : cfg.offsets) {
    const auto outputs = parallel_map(
        static_cast<std::size_t>(cfg.n_traj), cfg.threads, [&](std::size_t t) {
          const std::uint64_t seed = stream_seed(cfg.seed, static_cast<std::uint64_t>(l), t);
          Rng init_rng(mix_seed(seed, kInitialStream));
          // Time zero is the end of the burn-in, so x_0 is close to stationary.
          const int origin = cfg.burn_in + l;
          TrajectoryState s = TrajectoryState::pure(
              kernel, draw_initial(cfg.initial, dim, init_rng), seed, origin);
          while (s.n() < origin) s.step();
          TrajectoryOutput out;
          out.d.reserve(static_cast<std::size_t>(cfg.n_steps));
          std::vector<double> xs;
          std::vector<double> ys;
          for (int n = 1; n <= cfg.n_steps; ++n) {
            s.step();
            const double d = distance(s.point(), mle_estimators(s).y_hat);
            out.d.push_back(d);
            if (d > kResolvedDistance) {
              xs.push_back(n);
              ys.push_back(std::log(d));
            }
          }
          if (xs.size() >= 3) out.slope = stats::fit_line(xs, ys).slope;
          const LyapunovReport lr = lyapunov_report(s);
          out.gamma1 = lr.gamma_hat[0];
          out.gamma2 = lr.gamma_hat[1];
          return out;
        });

    std::vector<double> slopes;
    std::vector<double> resolved;
    for (const auto& o : outputs) {
      slopes.push_back(o.slope);
      if (std::isfinite(o.slope)) resolved.push_back(o.slope);
      g1_all.push_back(o.gamma1);
      g2_all.push_back(o.gamma2);
    }
    result.slopes.push_back(slopes);
    result.median_slope.push_back(resolved.empty() ? kNaN : stats::median(resolved));

    for (int n = 1; n <= cfg.n_steps; ++n) {
      std::vector<double> column;
      column.reserve(outputs.size());
      for (const auto& o : outputs) column.push_back(o.d[static_cast<std::size_t>(n - 1)]);
      EstimatorDecayRow row;
      row.n = n;
      row.offset = l;
      row.mean_d = stats::mean(column);
      row.stderr_d = column.size() > 1 ? stats::standard_error(column) : 0.0;
      row.f_n = f[static_cast<std::size_t>(n)];
      if (std::isfinite(row.f_n) && row.mean_d > row.f_n + 4.0 * row.stderr_d + 1e-12) {
        result.mean_bound_holds = false;
      }
      result.rows.push_back(row);
    }
  }
  result.gamma1_hat = stats::mean(g1_all);
  result.gamma2_hat = stats::mean(g2_all);
  const double bound = -(result.gamma1_hat - result.gamma2_hat) + kRateSlack;
  result.rate_bound_holds = true;
  for (double s : result.median_slope) {
    if (std::isfinite(s) && s > bound) result.rate_bound_holds = false;
  }
  if (std::isinf(result.gamma2_hat) && result.gamma2_hat < 0) result.rate_bound_holds = true;
  return result;
}

ErgodicityResult run_ergodicity(const ExperimentConfig& cfg) {
  const SpectralReport spectral = analyze(*cfg.model);
  const auto kernel = make_kernel(cfg);
  const KrausMeasure& model = *cfg.model;
  const int max_len = std::min(cfg.block_len, 3);
  TrackingOptions options = points_only();
  options.history = true;
  TrajectoryState s = TrajectoryState::density(kernel, DensityMatrix::project(spectral.rho_inv),
                                               mix_seed(cfg.seed, 0), 0, options);
  while (s.n() < cfg.n_steps) s.step();
  const std::vector<int>& outcomes = s.history();
  const int letters = static_cast<int>(model.size());

  ErgodicityResult result;
  for (int len = 1; len <= max_len; ++len) {
    if (static_cast<int>(outcomes.size()) < len) break;
    std::size_t blocks = 1;
    for (int i = 0; i < len; ++i) blocks *= static_cast<std::size_t>(letters);
    std::vector<long long> counts(blocks, 0);
    const std::size_t windows = outcomes.size() - static_cast<std::size_t>(len) + 1;
    for (std::size_t start = 0; start < windows; ++start) {
      std::size_t code = 0;
      for (int i = 0; i < len; ++i) {
        code = code * static_cast<std::size_t>(letters) +
               static_cast<std::size_t>(outcomes[start + static_cast<std::size_t>(i)]);
      }
      ++counts[code];
    }
    for (std::size_t code = 0; code < blocks; ++code) {
      BlockFrequency bf;
      bf.block.assign(static_cast<std::size_t>(len), 0);
      std::size_t rest = code;
      for (int i = len - 1; i >= 0; --i) {
        bf.block[static_cast<std::size_t>(i)] = static_cast<int>(rest % letters);
        rest /= static_cast<std::size_t>(letters);
      }
      bf.time_average = static_cast<double>(counts[code]) / static_cast<double>(windows);
      bf.exact = exact_cylinder_probability(model, spectral.rho_inv, bf.block);
      result.max_gap = std::max(result.max_gap, std::abs(bf.time_average - bf.exact));
      result.blocks.push_back(std::move(bf));
    }
  }
  return result;
}

std::vector<std::string> experiment_kinds() {
  return {"convergence", "invariant", "appc1", "appc2", "estimator-decay", "ergodicity"};
}

nlohmann::json run_experiment(const std::string& kind, const ExperimentConfig& cfg) {
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kInvalidInput, "cannot create output directory " + dir.string());
  const int dim = cfg.model->dim();
  nlohmann::json summary;
  summary["experiment"] = kind;
  summary["model"] = cfg.model->name();
  summary["seed"] = cfg.seed;
  summary["n_traj"] = cfg.n_traj;
  summary["n_steps"] = cfg.n_steps;
  std::ostringstream csv;

  const auto finish = [&]() {
    write_text(dir / (kind + ".csv"), csv.str());
    write_text(dir / (kind + "_summary.json"), summary.dump(2) + "\n");
  };

  if (kind == "invariant") {
    const InvariantResult r = run_invariant_estimate(cfg);
    csv << "index,weight" << point_header(dim) << '\n';
    for (std::size_t i = 0; i < r.nu_hat.size(); ++i) {
      csv << i << ',' << fmt(r.nu_hat.weights()[i]) << complex_row(r.nu_hat.points()[i]) << '\n';
    }
    summary["rho_hat"] = matrix_json(r.rho_hat);
    summary["rho_inv"] = matrix_json(r.rho_inv);
    summary["rho_check"] = r.rho_check;
    summary["m"] = r.period_m;
    summary["lambda"] = r.gap_lambda;
    finish();
  } else if (kind == "convergence") {
    const ConvergenceResult r = run_convergence(cfg);
    csv << "n,w1_value,in_fit,slope,r_squared,noise_floor\n";
    for (const auto& row : r.rows) {
      csv << row.n << ',' << fmt(row.w1) << ',' << (row.in_fit ? 1 : 0) << ','
          << fmt(r.fit_ok ? r.fit.slope : kNaN) << ',' << fmt(r.fit_ok ? r.fit.r_squared : kNaN)
          << ',' << fmt(r.noise_floor) << '\n';
    }
    summary["m"] = r.period_m;
    summary["sample_size"] = r.sample_size;
    summary["noise_floor"] = r.noise_floor;
    summary["fit_ok"] = r.fit_ok;
    summary["slope"] = r.fit_ok ? nlohmann::json(r.fit.slope) : nlohmann::json(nullptr);
    summary["r_squared"] = r.fit_ok ? nlohmann::json(r.fit.r_squared) : nlohmann::json(nullptr);
    summary["fit_points"] = r.fit_ok ? r.fit.points : 0;
    finish();
    if (!r.fit_ok) {
      throw Error(ErrorKind::kInsufficientResolution,
                  "fewer than 3 checkpoints lie above 3x the W1 noise floor (" +
                      fmt(r.noise_floor) + "); increase n_traj");
    }
  } else if (kind == "appc1") {
    const UnitaryExampleResult r = run_unitary_example(cfg);
    csv << "quantity,value\n";
    csv << "rho_error_frobenius," << fmt(r.rho_error_frobenius) << '\n';
    csv << "w1_to_uniform," << fmt(r.w1_to_uniform) << '\n';
    csv << "sample_size," << r.sample_size << '\n';
    csv << "reference_size," << r.reference_size << '\n';
    summary["rho_error_frobenius"] = r.rho_error_frobenius;
    summary["w1_to_uniform"] = r.w1_to_uniform;
    summary["reference_size"] = r.reference_size;
    finish();
  } else if (kind == "appc2") {
    const FiniteOrbitResult r = run_finite_orbit(cfg);
    csv << "atom" << point_header(dim) << ",frequency,expected,abs_error\n";
    nlohmann::json atoms = nlohmann::json::array();
    for (std::size_t a = 0; a < r.atoms.size(); ++a) {
      const auto& atom = r.atoms[a];
      csv << a << complex_row(atom.point) << ',' << fmt(atom.frequency) << ','
          << fmt(atom.expected) << ',' << fmt(std::abs(atom.frequency - atom.expected)) << '\n';
      atoms.push_back({{"frequency", atom.frequency}, {"expected", atom.expected}});
    }
    summary["z"] = cfg.z;
    summary["atoms"] = std::move(atoms);
    summary["unmatched"] = r.unmatched;
    summary["max_abs_error"] = r.max_abs_error;
    finish();
  } else if (kind == "estimator-decay") {
    const EstimatorDecayResult r = run_estimator_decay(cfg);
    csv << "n,l,mean_d,stderr_d,f_n,median_slope,gamma1_hat,gamma2_hat\n";
    for (const auto& row : r.rows) {
      const auto idx = static_cast<std::size_t>(
          std::find(r.offsets.begin(), r.offsets.end(), row.offset) - r.offsets.begin());
      csv << row.n << ',' << row.offset << ',' << fmt(row.mean_d) << ',' << fmt(row.stderr_d)
          << ',' << fmt(row.f_n) << ',' << fmt(r.median_slope[idx]) << ','
          << fmt(r.gamma1_hat) << ',' << fmt(r.gamma2_hat) << '\n';
    }
    nlohmann::json slopes = nlohmann::json::array();
    for (double s : r.median_slope) slopes.push_back(maybe_number(s));
    summary["offsets"] = r.offsets;
    summary["median_slope"] = std::move(slopes);
    summary["gamma1_hat"] = maybe_number(r.gamma1_hat);
    summary["gamma2_hat"] = maybe_number(r.gamma2_hat);
    summary["rate_bound"] = maybe_number(-(r.gamma1_hat - r.gamma2_hat) + kRateSlack);
    summary["rate_bound_holds"] = r.rate_bound_holds;
    summary["mean_bound_holds"] = r.mean_bound_holds;
    summary["E_is_full"] = r.E_is_full;
    finish();
    if (cfg.compare_rate && !r.E_is_full && !cfg.force) {
      throw Error(ErrorKind::kAssumption,
                  "rate comparison needs a minimal invariant subspace E equal to C^k; "
                  "mean-decay results were written");
    }
  } else if (kind == "ergodicity") {
    const ErgodicityResult r = run_ergodicity(cfg);
    csv << "block_len,block,time_average,exact_probability,abs_gap\n";
    for (const auto& b : r.blocks) {
      std::string name;
      for (std::size_t i = 0; i < b.block.size(); ++i) {
        name += (i ? "-" : "") + std::to_string(b.block[i]);
      }
      csv << b.block.size() << ',' << name << ',' << fmt(b.time_average) << ',' << fmt(b.exact)
          << ',' << fmt(std::abs(b.time_average - b.exact)) << '\n';
    }
    summary["block_len"] = std::min(cfg.block_len, 3);
    summary["max_gap"] = r.max_gap;
    finish();
  } else {
    throw Error(ErrorKind::kInvalidInput, "unknown experiment '" + kind + "'");
  }
  return summary;
}

}  // namespace qtraj
