// Copyright 2026 The SSA Authors. All Rights Reserved.
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

#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / "ssa_cli_test";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Run {
  int code;
  std::string err;
};

Run cli(const std::string& args) {
  const fs::path err = workdir() / "stderr.txt";
  const std::string cmd = "cd '" + workdir().string() + "' && '" SSA_CLI_PATH "' " + args +
                          " >stdout.txt 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err)};
}

const std::string kConfigs = SSA_CONFIG_DIR;

}  // namespace

TEST_CASE("sweep with the shipped configuration") {
  const Run r = cli("sweep --config " + kConfigs + "/paper_linear.json --output_path=linear.csv --plot=linear.svg");
  CHECK(r.code == 0);
  const std::string csv = slurp(workdir() / "linear.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 4 * 20 * 7);
  CHECK(slurp(workdir() / "linear.svg").find("<polyline") != std::string::npos);
}

TEST_CASE("config errors exit 1 and name the key") {
  Run r = cli("sweep --n2_grid=20,0");
  CHECK(r.code == 1);
  CHECK(r.err.find("n2_grid") != std::string::npos);

  r = cli("sweep --frobnicate=3");
  CHECK(r.code == 1);
  CHECK(r.err.find("frobnicate") != std::string::npos);

  r = cli("sweep --frobnicate");
  CHECK(r.code == 1);
  CHECK(r.err.find("frobnicate") != std::string::npos);

  r = cli("fit-source --k 2 --bogus x.csv");
  CHECK(r.code == 1);
  CHECK(r.err.find("bogus") != std::string::npos);

  std::ofstream(workdir() / "broken.json") << "{\"E\": ";
  r = cli("sweep --config broken.json");
  CHECK(r.code == 1);

  std::ofstream(workdir() / "typo.json") << "{\"sigmaa\": 1}";
  r = cli("audit --config typo.json");
  CHECK(r.code == 1);
  CHECK(r.err.find("sigmaa") != std::string::npos);

  CHECK(cli("").code == 1);
  CHECK(cli("--help").code == 0);
}

TEST_CASE("seed alias changes the draw") {
  const std::string base = "sweep --E=20 --seeds=1 --n2_grid=20 --test_rows=100 --methods=ols";
  REQUIRE(cli(base + " --output_path=s1.csv --seed=1").code == 0);
  REQUIRE(cli(base + " --output_path=s1b.csv --master_seed=1").code == 0);
  REQUIRE(cli(base + " --output_path=s2.csv --seed=2").code == 0);
  CHECK(slurp(workdir() / "s1.csv") == slurp(workdir() / "s1b.csv"));
  CHECK(slurp(workdir() / "s1.csv") != slurp(workdir() / "s2.csv"));
}

TEST_CASE("gen, fit-source and finetune chain") {
  REQUIRE(cli("gen --E=30 --seed-index=0 --n2 40 -o data").code == 0);
  CHECK(fs::exists(workdir() / "data" / "manifest.json"));
  REQUIRE(cli("fit-source --dir data --k 6 -o fit.json").code == 0);
  const Run ok = cli("finetune --source-fit fit.json --target data/target.csv --paper-rule --sigma 0.01 -o sol.json");
  CHECK(ok.code == 0);
  CHECK(slurp(workdir() / "sol.json").find("theta_hat") != std::string::npos);

  // A target with a different d.
  REQUIRE(cli("gen --E=3 --d=8 --k=3 --n2 20 -o small").code == 0);
  const Run bad = cli("finetune --source-fit fit.json --target small/target.csv --lambda1 1 --lambda2 1");
  CHECK(bad.code == 2);
  CHECK(bad.err.find("dimension") != std::string::npos);

  const Run missing = cli("fit-source --k 6 data/nope.csv");
  CHECK(missing.code == 2);
}

TEST_CASE("audit writes a report") {
  const Run r = cli("audit --E=40 --seeds=2 --n2_grid=20,200 --test_rows=200 --audit_E_grid=20,40 -o audit.json");
  CHECK(r.code == 0);
  CHECK(slurp(workdir() / "audit.json").find("risk_vs_n2_slope") != std::string::npos);
}
