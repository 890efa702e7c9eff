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

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace {

namespace fs = std::filesystem;

struct Invocation {
  int code = -1;
  std::string out;
};

Invocation run(const std::string& args) {
  const std::string cmd = std::string(QTRAJ_CLI_PATH) + " " + args + " 2>/dev/null";
  Invocation r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qtraj_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

TEST(Cli, ValidateBuiltinAndBrokenFile) {
  EXPECT_EQ(run("validate rotating_damping").code, 0);
  const fs::path dir = scratch("validate");
  std::ofstream(dir / "bad.json")
      << R"({"dim": 2, "elements": [{"weight": 1, "matrix": [[[2, 0], [0, 0]], [[0, 0], [2, 0]]]}]})";
  EXPECT_EQ(run("validate " + (dir / "bad.json").string()).code, 2);
  // Bare reals are not complex entries.
  std::ofstream(dir / "reals.json")
      << R"({"dim": 2, "elements": [{"weight": 1, "matrix": [[1, 0], [0, 1]]}]})";
  EXPECT_EQ(run("validate " + (dir / "reals.json").string()).code, 2);
  std::ofstream(dir / "garbage.json") << "{ not json";
  EXPECT_EQ(run("validate " + (dir / "garbage.json").string()).code, 2);
  fs::remove_all(dir);
}

TEST(Cli, AnalyzeJson) {
  const Invocation r = run("analyze amplitude_damping:p=0.5 --json -");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["m"], 1);
  EXPECT_NEAR(j["lambda"].get<double>(), std::sqrt(0.5), 1e-9);
}

TEST(Cli, MultipleFixedPointsExitCode) {
  const fs::path dir = scratch("identity");
  std::ofstream(dir / "id.json")
      << R"({"dim": 2, "elements": [{"weight": 1, "matrix": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}]})";
  EXPECT_EQ(run("analyze " + (dir / "id.json").string()).code, 3);
  fs::remove_all(dir);
}

TEST(Cli, CheckAssumptions) {
  EXPECT_EQ(run("check-assumptions rotating_damping").code, 0);
  EXPECT_EQ(run("check-assumptions appc_example2").code, 3);
}

TEST(Cli, SimulateWithDump) {
  const fs::path dir = scratch("simulate");
  const Invocation r = run("simulate rotating_damping --steps 20 --traj 4 --seed 3 --dump " +
                    (dir / "traj.csv").string());
  ASSERT_EQ(r.code, 0);
  std::ifstream in(dir / "traj.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("n,outcome,x_re_0,x_im_0", 0), 0u);
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 21);
  EXPECT_EQ(run("simulate rotating_damping --steps 5 --traj 1 --seed 1 --pure 7").code, 2);
  EXPECT_EQ(run("simulate rotating_damping --steps 5 --traj 1 --seed 1 --density").code, 0);
  fs::remove_all(dir);
}

TEST(Cli, ExperimentGateAndForce) {
  const fs::path dir = scratch("experiment");
  std::ofstream(dir / "cfg.json")
      << R"({"model": "appc_example2", "n_traj": 20, "n_steps": 20, "burn_in": 5})";
  const std::string base = "experiment convergence --config " + (dir / "cfg.json").string() +
                           " --out " + (dir / "out").string();
  EXPECT_EQ(run(base).code, 3);
  // Forced: unitary dynamics never leave the noise floor.
  EXPECT_EQ(run(base + " --force").code, 4);
  EXPECT_TRUE(fs::exists(dir / "out" / "convergence.csv"));
  fs::remove_all(dir);
}

TEST(Cli, BadArguments) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("experiment nonsense --config x.json").code, 2);
  EXPECT_EQ(run("simulate rotating_damping --steps 5").code, 2);
}

}  // namespace
