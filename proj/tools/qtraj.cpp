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

// Command line front end: model validation, channel analysis, assumption
// checks, raw simulation and the experiment drivers.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qtraj/channel.hpp"
#include "qtraj/error.hpp"
#include "qtraj/experiments.hpp"
#include "qtraj/kraus.hpp"
#include "qtraj/parallel.hpp"
#include "qtraj/purification.hpp"
#include "qtraj/stats.hpp"
#include "qtraj/trajectory.hpp"

namespace {

using qtraj::Error;
using qtraj::ErrorKind;

constexpr int kExitInvalid = 2;

qtraj::ProjectivePoint parse_pure(const std::string& text, int dim) {
  // Either a basis index or a JSON array of numbers / [re, im] pairs.
  if (!text.empty() && text.front() == '[') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::kParse, std::string("--pure: ") + e.what());
    }
    const qtraj::InitialCondition initial = qtraj::parse_initial({{"type", "pure"}, {"vector", j}});
    if (initial.vector.size() != dim) {
      throw Error(ErrorKind::kInvalidInput, "--pure: vector has the wrong dimension");
    }
    return qtraj::ProjectivePoint::from_vector(initial.vector);
  }
  std::size_t used = 0;
  int index = -1;
  try {
    index = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || index < 0 || index >= dim) {
    throw Error(ErrorKind::kInvalidInput,
                "--pure: expected a basis index in [0, " + std::to_string(dim) +
                    ") or a JSON vector");
  }
  return qtraj::ProjectivePoint::basis(dim, index);
}

void write_json(const nlohmann::json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kInvalidInput, "cannot write " + path);
  out << j.dump(2) << '\n';
}

int cmd_validate(const std::string& model_ref) {
  const qtraj::KrausMeasure m = qtraj::resolve_model(model_ref, qtraj::kDefaultStochasticTolerance,
                                                     /*allow_invalid=*/true);
  const qtraj::ValidationReport r = qtraj::validate(m);
  std::printf("model: %s (k = %d, %zu elements)\n", m.name().c_str(), m.dim(), m.size());
  std::printf("defect: %.3e (tolerance %.1e)\n", r.defect, r.tolerance);
  std::printf("stochastic: %s\n", r.passed ? "yes" : "no");
  return r.passed ? 0 : kExitInvalid;
}

int cmd_analyze(const std::string& model_ref, const std::string& json_out, bool json_set) {
  const qtraj::KrausMeasure m = qtraj::resolve_model(model_ref);
  const qtraj::SpectralReport r = qtraj::analyze(m);
  if (json_set) {
    write_json(qtraj::to_json(r), json_out);
    if (json_out.empty() || json_out == "-") return 0;
  }
  std::printf("period m: %d\n", r.period_m);
  std::printf("gap lambda: %.12g\n", r.gap_lambda);
  std::printf("rho_inv residual: %.3e\n", r.rho_inv_residual);
  std::printf("E is C^k: %s\n", r.E_is_full ? "yes" : "no");
  std::printf("eigenvalues:\n");
  for (const auto& z : r.eigenvalues) std::printf("  %+.12f %+.12fi\n", z.real(), z.imag());
  return 0;
}

int cmd_check(const std::string& model_ref, int max_len, int mc_steps, int mc_traj,
              std::uint64_t seed, unsigned threads) {
  const qtraj::KrausMeasure m = qtraj::resolve_model(model_ref);
  nlohmann::json out;
  const qtraj::PurReport words = qtraj::check_pur_words(m, max_len);
  out["pur_words"] = qtraj::to_json(words);
  bool pur_ok = words.verdict != qtraj::PurVerdict::kViolated;
  if (mc_steps > 0) {
    const qtraj::PurReport mc = qtraj::check_pur_montecarlo(m, mc_steps, mc_traj, seed, 1e-6,
                                                            threads);
    out["pur_montecarlo"] = qtraj::to_json(mc);
  }
  const qtraj::PhiErgReport erg = qtraj::check_phi_erg(m);
  out["phi_erg"] = {{"holds", erg.holds},
                    {"fixed_point_dimension", erg.fixed_point_dimension},
                    {"E_is_full", erg.E_is_full}};
  std::cout << out.dump(2) << '\n';
  return pur_ok && erg.holds ? 0 : 3;
}

int cmd_simulate(const std::string& model_ref, int steps, int n_traj, std::uint64_t seed,
                 bool density, const std::string& pure, const std::string& dump,
                 unsigned threads) {
  const auto kernel = std::make_shared<const qtraj::TransitionKernel>(
      qtraj::resolve_model(model_ref));
  const int k = kernel->dim();
  if (steps < 0 || n_traj < 1) {
    throw Error(ErrorKind::kInvalidInput, "--steps must be >= 0 and --traj >= 1");
  }
  const qtraj::ProjectivePoint x0 = pure.empty() ? qtraj::ProjectivePoint::basis(k, 0) : parse_pure(pure, k);
  const auto start = [&](std::uint64_t s) {
    return density ? qtraj::TrajectoryState::density(
                         kernel, qtraj::DensityMatrix::maximally_mixed(k), s)
                   : qtraj::TrajectoryState::pure(kernel, x0, s);
  };

  if (!dump.empty()) {
    std::ofstream out(dump, std::ios::binary);
    if (!out) throw Error(ErrorKind::kInvalidInput, "cannot write " + dump);
    qtraj::TrajectoryDumpWriter writer(out, k);
    auto s = start(qtraj::mix_seed(seed, 0));
    writer.write_row(s, -1);
    while (s.n() < steps) writer.write_row(s, s.step());
  }

  struct Final {
    std::vector<double> gamma;
    double lambda2 = 0.0;
  };
  const auto finals = qtraj::parallel_map(
      static_cast<std::size_t>(n_traj), threads, [&](std::size_t t) {
        auto s = start(qtraj::mix_seed(seed, t));
        while (s.n() < steps) s.step();
        return Final{qtraj::lyapunov_report(s).gamma_hat, qtraj::martingale_lambda2(s)};
      });
  std::vector<double> lambda2;
  nlohmann::json gamma = nlohmann::json::array();
  for (int j = 0; j < k; ++j) {
    std::vector<double> g;
    for (const auto& f : finals) g.push_back(f.gamma[static_cast<std::size_t>(j)]);
    const double mean = qtraj::stats::mean(g);
    gamma.push_back(std::isfinite(mean) ? nlohmann::json(mean) : nlohmann::json("-inf"));
  }
  for (const auto& f : finals) lambda2.push_back(f.lambda2);
  nlohmann::json out{{"model", kernel->model().name()},
                     {"steps", steps},
                     {"n_traj", n_traj},
                     {"seed", seed},
                     {"mode", density ? "density" : "pure"},
                     {"gamma_hat_mean", gamma},
                     {"lambda2_median", qtraj::stats::median(lambda2)}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_experiment(const std::string& kind, const std::string& config, const std::string& out,
                   std::optional<unsigned> threads, bool force) {
  qtraj::ExperimentConfig cfg = qtraj::load_config(config);
  if (!out.empty()) cfg.output_dir = out;
  if (threads) cfg.threads = *threads;
  if (force) cfg.force = true;
  const nlohmann::json summary = qtraj::run_experiment(kind, cfg);
  std::cout << summary.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum trajectory simulation and analysis"};
  app.require_subcommand(1);

  std::string model_ref;
  std::string json_out;
  auto* validate = app.add_subcommand("validate", "Check the stochasticity condition");
  validate->add_option("model", model_ref, "Model JSON file or builtin name")->required();

  auto* analyze = app.add_subcommand("analyze", "Channel spectrum, period and invariant state");
  analyze->add_option("model", model_ref)->required();
  auto* json_opt = analyze->add_option("--json", json_out, "Write the report as JSON ('-' for stdout)");

  int max_len = 4;
  int mc_steps = 0;
  int mc_traj = 200;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  auto* check = app.add_subcommand("check-assumptions", "Purification and ergodicity checks");
  check->add_option("model", model_ref)->required();
  check->add_option("--max-word-len", max_len)->check(CLI::PositiveNumber);
  check->add_option("--mc-steps", mc_steps, "Also run the Monte Carlo purification check");
  check->add_option("--mc-traj", mc_traj)->check(CLI::PositiveNumber);
  check->add_option("--seed", seed);
  check->add_option("--threads", threads);

  int steps = 100;
  int n_traj = 1;
  bool density = false;
  std::string pure;
  std::string dump;
  auto* simulate = app.add_subcommand("simulate", "Run trajectories and report Lyapunov estimates");
  simulate->add_option("model", model_ref)->required();
  simulate->add_option("--steps", steps)->required();
  simulate->add_option("--traj", n_traj)->required();
  simulate->add_option("--seed", seed)->required();
  auto* density_flag = simulate->add_flag("--density", density, "Start from Id/k in density mode");
  simulate->add_option("--pure", pure, "Initial ray: basis index or JSON vector")
      ->excludes(density_flag);
  simulate->add_option("--dump", dump, "CSV dump of the first trajectory");
  simulate->add_option("--threads", threads);

  std::string kind;
  std::string config;
  std::string out_dir;
  std::optional<unsigned> exp_threads;
  bool force = false;
  auto* experiment = app.add_subcommand("experiment", "Run an experiment driver");
  experiment->add_option("kind", kind)->required()->check(
      CLI::IsMember(qtraj::experiment_kinds()));
  experiment->add_option("--config", config)->required();
  experiment->add_option("--out", out_dir);
  experiment->add_option("--threads", exp_threads);
  experiment->add_flag("--force", force, "Run even if an assumption check fails");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*validate) return cmd_validate(model_ref);
    if (*analyze) return cmd_analyze(model_ref, json_out, json_opt->count() > 0);
    if (*check) return cmd_check(model_ref, max_len, mc_steps, mc_traj, seed, threads);
    if (*simulate) {
      return cmd_simulate(model_ref, steps, n_traj, seed, density, pure, dump, threads);
    }
    if (*experiment) return cmd_experiment(kind, config, out_dir, exp_threads, force);
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", qtraj::to_string(e.kind()), e.what());
    return qtraj::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalid;
  }
  return kExitInvalid;
}
