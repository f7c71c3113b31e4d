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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ssa/finetune.hpp"
#include "ssa/metrics.hpp"
#include "ssa/model.hpp"

namespace ssa {

enum class Method { kJoint, kReg1Only, kReg2Only, kOls, kRidge };

const char* method_name(Method m);
Method parse_method(const std::string& name);

enum class LambdaMode { kPaperRule, kGrid };
enum class SigmaSource { kTrue, kPlugin };

struct ExperimentConfig {
  int d = 10;
  int k = 6;
  int E = 999;
  int n1 = 50;
  std::vector<int> n2_grid{20, 50, 100, 200, 500, 1000, 2000};
  double sigma = 0.01;
  double theta_star_value = 6.0;
  double lambda11_value = 0.1;
  double lambda22_value = 3.0;
  // Full-vector overrides of the scalar fields above.
  std::optional<std::vector<double>> theta_star;
  std::optional<std::vector<double>> lambda11;
  std::optional<std::vector<double>> lambda22;
  std::vector<Method> methods{Method::kJoint, Method::kOls};
  LambdaMode lambda_mode = LambdaMode::kPaperRule;
  // (lambda1, lambda2) points used when lambda_mode == kGrid. With
  // lambda_grid_relative each entry multiplies the rule value.
  std::vector<LambdaPair> lambda_grid;
  bool lambda_grid_relative = false;
  int seeds = 20;
  std::uint64_t master_seed = 20240521;
  bool fixed_ground_truth = false;
  std::string output_path = "results.csv";
  DesignScaling design_scaling = DesignScaling::kSqrtN;
  bool shared_design_basis = false;
  int test_rows = 10000;
  SigmaSource sigma_source = SigmaSource::kTrue;
  bool record_timing = false;
  std::vector<int> audit_E_grid{50, 200, 999};

  MetaDistribution meta() const;
  // Throws ConfigError naming the first offending key.
  void validate() const;
};

// Parses a JSON document whose keys mirror ExperimentConfig. Unknown keys
// and type errors raise ConfigError. Overrides are (key, value) pairs; a
// value is read as JSON when it parses, otherwise as a bare string.
ExperimentConfig parse_config(
    std::string_view json_text,
    const std::vector<std::pair<std::string, std::string>>& overrides = {});
ExperimentConfig load_config(
    const std::string& path,
    const std::vector<std::pair<std::string, std::string>>& overrides = {});
std::string config_to_json(const ExperimentConfig& cfg);

struct ResultRow {
  std::string method;
  int seed = 0;
  int E = 0;
  int n1 = 0;
  int n2 = 0;
  int d = 0;
  int k = 0;
  double sigma = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double target_mse = 0.0;
  double excess_risk = 0.0;
  double sin_theta = 0.0;
  double procrustes_err = 0.0;
  std::string dk_holds;  // "true", "false" or "na"
  double wall_ms = 0.0;  // 0 unless record_timing
  std::string error;     // empty on success

  // Position in the lambda grid; not serialized.
  int lambda_point = 0;
};

// CSV header, in field order.
const std::vector<std::string>& result_fields();

// Worker count from SHARED_SUBSPACE_WORKERS, else hardware concurrency.
int default_workers();

// One task per seed: draw the ground truth, E source environments and the
// target environment, fit the sources once, then solve every method at every
// (n2, lambda point). Streams are derived from (master_seed, seed, env,
// role), so the rows do not depend on `workers`. Rows come back sorted by
// (method, n2, seed, lambda point). A failing (seed, n2) cell becomes a row
// with NaN metrics and an error message.
std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg, int workers);

void write_csv(const std::vector<ResultRow>& rows, std::ostream& out);
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);

struct PlotOptions {
  bool log_x = false;
  bool log_y = false;
  std::string title;
};

// Line chart: one series per group value, median over rows sharing (group, x)
// with a shaded interquartile band. Numeric fields only for x and y.
std::string render_svg(const std::vector<ResultRow>& rows,
                       const std::string& x_field, const std::string& y_field,
                       const std::string& group_field,
                       const PlotOptions& opts = {});
void emit_plot(const std::vector<ResultRow>& rows, const std::string& x_field,
               const std::string& y_field, const std::string& group_field,
               const std::string& path, const PlotOptions& opts = {});

struct SeedAudit {
  int seed = 0;
  double sin_theta = 0.0;
  double procrustes_err = 0.0;
  DavisKahanAudit dk;
};

struct ScalingPoint {
  double x = 0.0;
  double median = 0.0;
};

struct AuditReport {
  std::vector<SeedAudit> seeds;          // at cfg.E
  std::vector<ScalingPoint> sin_vs_E;    // over audit_E_grid
  double sin_vs_E_slope = 0.0;           // log-log least squares
  std::vector<ScalingPoint> risk_vs_n2;  // joint, lambda rule
  double risk_vs_n2_slope = 0.0;
};

AuditReport run_audit(const ExperimentConfig& cfg, int workers);
std::string audit_to_json(const AuditReport& report);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<ScalingPoint>& points);
double median(std::vector<double> values);

}  // namespace ssa
