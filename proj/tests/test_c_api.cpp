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

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ssa/ssa.h"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ssa_capi_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ssa_config* small_config() {
  ssa_config* cfg = nullptr;
  REQUIRE(ssa_config_parse(R"({"E": 40, "seeds": 2, "n2_grid": [20, 100], "test_rows": 300})",
                           &cfg) == SSA_OK);
  return cfg;
}

}  // namespace

TEST_CASE("status strings and errors") {
  CHECK(std::string(ssa_status_string(SSA_OK)) == "ok");
  CHECK(std::string(ssa_version()).size() > 0);
  ssa_config* cfg = nullptr;
  CHECK(ssa_config_parse(nullptr, &cfg) == SSA_ERR_INVALID_ARGUMENT);
  CHECK(ssa_config_parse("{\"n2_grid\": \"x\"}", &cfg) == SSA_ERR_CONFIG);
  CHECK(std::string(ssa_last_error_key()) == "n2_grid");
  CHECK(std::string(ssa_last_error()).find("n2_grid") != std::string::npos);
  CHECK(ssa_config_load("/nonexistent.json", &cfg) == SSA_ERR_IO);
}

TEST_CASE("config handle") {
  ssa_config* cfg = nullptr;
  REQUIRE(ssa_config_default(&cfg) == SSA_OK);
  CHECK(ssa_config_set(cfg, "seed", "5") == SSA_OK);
  CHECK(ssa_config_set(cfg, "n2_grid", "0") == SSA_OK);  // type-valid
  CHECK(ssa_config_validate(cfg) == SSA_ERR_CONFIG);
  CHECK(std::string(ssa_last_error_key()) == "n2_grid");
  CHECK(ssa_config_set(cfg, "n2_grid", "20,50") == SSA_OK);
  CHECK(ssa_config_validate(cfg) == SSA_OK);
  CHECK(ssa_config_set(cfg, "unknown", "1") == SSA_ERR_CONFIG);
  CHECK(std::string(ssa_last_error_key()) == "unknown");
  CHECK(ssa_config_set(cfg, "d", "\"x\"") == SSA_ERR_CONFIG);
  CHECK(ssa_config_set(cfg, "output_path", "out.csv") == SSA_OK);
  CHECK(std::string(ssa_config_output_path(cfg)) == "out.csv");
  char* json = nullptr;
  REQUIRE(ssa_config_to_json(cfg, &json) == SSA_OK);
  CHECK(std::string(json).find("\"master_seed\": 5") != std::string::npos);
  ssa_string_free(json);
  ssa_config_free(cfg);
}

TEST_CASE("dataset to fit to finetune") {
  ssa_config* cfg = small_config();
  std::vector<ssa_dataset*> envs(40, nullptr);
  for (int e = 0; e < 40; ++e) {
    REQUIRE(ssa_generate_environment(cfg, 0, e, 50, &envs[static_cast<std::size_t>(e)]) == SSA_OK);
  }
  CHECK(ssa_dataset_rows(envs[0]) == 50u);
  CHECK(ssa_dataset_cols(envs[0]) == 10u);
  ssa_source_fit* fit = nullptr;
  REQUIRE(ssa_fit_sources(envs.data(), envs.size(), 6, 2, &fit) == SSA_OK);
  CHECK(ssa_source_fit_dim(fit) == 10);
  CHECK(ssa_source_fit_k(fit) == 6);
  double ev[10];
  REQUIRE(ssa_source_fit_eigenvalues(fit, ev, 10) == SSA_OK);
  for (int i = 1; i < 10; ++i) CHECK(ev[i - 1] <= ev[i]);

  char* json = nullptr;
  REQUIRE(ssa_source_fit_to_json(fit, 1, &json) == SSA_OK);
  ssa_source_fit* back = nullptr;
  REQUIRE(ssa_source_fit_from_json(json, &back) == SSA_OK);
  ssa_string_free(json);

  ssa_dataset* target = nullptr;
  REQUIRE(ssa_generate_environment(cfg, 0, 40, 100, &target) == SSA_OK);
  CHECK(ssa_dataset_rows(target) == 100u);
  ssa_finetune_options opts{0.0, 0.0, 1, 0.01, 0.0};
  ssa_solution* sol = nullptr;
  REQUIRE(ssa_finetune(back, target, &opts, &sol) == SSA_OK);
  CHECK(ssa_solution_dim(sol) == 10u);
  CHECK(ssa_solution_lambda1(sol) > 0.0);
  CHECK(ssa_solution_gradient_norm(sol) <= 1e-8);
  double theta[10];
  CHECK(ssa_solution_theta(sol, theta, 10) == SSA_OK);
  REQUIRE(ssa_solution_to_json(sol, &json) == SSA_OK);
  CHECK(std::string(json).find("theta_hat") != std::string::npos);
  ssa_string_free(json);

  double lambda = 0.0;
  REQUIRE(ssa_paper_lambda(0.01, 2000, 1.0, &lambda) == SSA_OK);
  CHECK(lambda == doctest::Approx(0.01 / (std::sqrt(2000.0) - 0.01)));
  CHECK(ssa_paper_lambda(5.0, 4, 1.0, &lambda) == SSA_ERR_NUMERIC);

  // Dimension mismatch between fit and target.
  const std::vector<double> x(9, 1.0), y(3, 1.0);
  ssa_dataset* small = nullptr;
  REQUIRE(ssa_dataset_create(3, 3, x.data(), y.data(), 0, &small) == SSA_OK);
  CHECK(ssa_finetune(fit, small, &opts, &sol) == SSA_ERR_DIMENSION);

  ssa_dataset_free(small);
  ssa_solution_free(sol);
  ssa_dataset_free(target);
  ssa_source_fit_free(back);
  ssa_source_fit_free(fit);
  for (auto* e : envs) ssa_dataset_free(e);
  ssa_config_free(cfg);
}

TEST_CASE("singular inputs map to SSA_ERR_SINGULAR") {
  const std::vector<double> x(20, 1.0), y(10, 1.0);
  ssa_dataset* a = nullptr;
  ssa_dataset* b = nullptr;
  REQUIRE(ssa_dataset_create(10, 2, x.data(), y.data(), 0, &a) == SSA_OK);
  REQUIRE(ssa_dataset_create(10, 2, x.data(), y.data(), 1, &b) == SSA_OK);
  const ssa_dataset* envs[] = {a, b};
  ssa_source_fit* fit = nullptr;
  CHECK(ssa_fit_sources(envs, 2, 1, 1, &fit) == SSA_ERR_SINGULAR);
  ssa_dataset_free(a);
  ssa_dataset_free(b);
}

TEST_CASE("directory generation and sweep outputs") {
  ssa_config* cfg = small_config();
  const fs::path dir = scratch("gen");
  REQUIRE(ssa_generate_to_directory(cfg, 1, 20, dir.string().c_str()) == SSA_OK);
  CHECK(fs::exists(dir / "source_0000.csv"));
  CHECK(fs::exists(dir / "source_0039.csv"));
  CHECK(fs::exists(dir / "target.csv"));
  const std::string manifest = slurp(dir / "manifest.json");
  CHECK(manifest.find("\"singular_value_policy\": \"absolute\"") != std::string::npos);
  CHECK(manifest.find("\"rotation\"") != std::string::npos);

  // Generated files agree with the in-memory generator.
  ssa_dataset* from_file = nullptr;
  ssa_dataset* direct = nullptr;
  REQUIRE(ssa_dataset_read_csv((dir / "source_0007.csv").string().c_str(), 7, &from_file) == SSA_OK);
  REQUIRE(ssa_generate_environment(cfg, 1, 7, 50, &direct) == SSA_OK);
  const fs::path rewritten = dir / "again.csv";
  REQUIRE(ssa_dataset_write_csv(direct, rewritten.string().c_str()) == SSA_OK);
  CHECK(slurp(rewritten) == slurp(dir / "source_0007.csv"));
  ssa_dataset_free(from_file);
  ssa_dataset_free(direct);

  ssa_results* res = nullptr;
  REQUIRE(ssa_run_sweep(cfg, 0, &res) == SSA_OK);
  CHECK(ssa_results_count(res) == 2u * 2u * 2u);
  const fs::path csv = dir / "r.csv", svg = dir / "r.svg";
  REQUIRE(ssa_results_write_csv(res, csv.string().c_str()) == SSA_OK);
  REQUIRE(ssa_results_write_svg(res, "n2", "excess_risk", "method", 1, svg.string().c_str()) == SSA_OK);
  CHECK(slurp(svg).find("<polyline") != std::string::npos);
  CHECK(ssa_results_write_svg(res, "n2", "nope", "method", 0, svg.string().c_str()) ==
        SSA_ERR_INVALID_ARGUMENT);
  ssa_results_free(res);

  char* audit = nullptr;
  REQUIRE(ssa_config_set(cfg, "audit_E_grid", "[20, 40]") == SSA_OK);
  REQUIRE(ssa_run_audit(cfg, 1, &audit) == SSA_OK);
  CHECK(std::string(audit).find("sin_vs_E_slope") != std::string::npos);
  ssa_string_free(audit);
  ssa_config_free(cfg);
  fs::remove_all(dir);
}

TEST_CASE("warning callback") {
  struct Sink {
    int count = 0;
  } sink;
  ssa_set_warning_callback(
      [](const char*, void* user) { ++static_cast<Sink*>(user)->count; }, &sink);
  ssa_config* cfg = nullptr;
  REQUIRE(ssa_config_parse(R"({"E": 30, "seeds": 1, "n2_grid": [20], "test_rows": 100,
                               "lambda11_value": 2, "lambda22_value": 2})", &cfg) == SSA_OK);
  ssa_results* res = nullptr;
  REQUIRE(ssa_run_sweep(cfg, 1, &res) == SSA_OK);
  CHECK(sink.count > 0);
  ssa_set_warning_callback(nullptr, nullptr);
  ssa_results_free(res);
  ssa_config_free(cfg);
}
