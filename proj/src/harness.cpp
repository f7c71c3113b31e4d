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

#include "ssa/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "harness_detail.hpp"
#include "parallel.hpp"
#include "ssa/error.hpp"
#include "ssa/io.hpp"
#include "ssa/spectral.hpp"

namespace ssa {

namespace detail {

GroundTruth seed_ground_truth(const ExperimentConfig& cfg,
                              const MetaDistribution& meta, int seed) {
  const auto s = static_cast<std::uint64_t>(seed);
  RngStream rng(cfg.master_seed,
                derive_stream_id(cfg.fixed_ground_truth ? 0 : s, 0,
                                 StreamRole::kGroundTruth));
  return GroundTruth::sample(meta, rng);
}

std::optional<Matrix> seed_shared_basis(const ExperimentConfig& cfg, int seed) {
  if (!cfg.shared_design_basis) return std::nullopt;
  RngStream rng(cfg.master_seed,
                derive_stream_id(static_cast<std::uint64_t>(seed), 0,
                                 StreamRole::kSharedBasis));
  return haar_orthogonal(cfg.d, rng);
}

EnvironmentDataset seed_source(const ExperimentConfig& cfg,
                               const GroundTruth& gt,
                               const std::optional<Matrix>& shared_v, int seed,
                               int env_index, int n) {
  RngStream rng(cfg.master_seed,
                derive_stream_id(static_cast<std::uint64_t>(seed),
                                 static_cast<std::uint64_t>(env_index),
                                 StreamRole::kSourceEnvironment));
  GenerateOptions opts;
  opts.scaling = cfg.design_scaling;
  opts.shared_right_vectors = shared_v;
  return generate_environment(gt, n, env_index, rng, opts);
}

// The target keeps one design basis per seed: every n2 sample and the test
// set are drawn from it, so eval_cov is the same matrix for all n2.
TargetEnvironment seed_target(const ExperimentConfig& cfg,
                              const GroundTruth& gt,
                              const std::optional<Matrix>& shared_v, int seed) {
  const auto s = static_cast<std::uint64_t>(seed);
  const auto t = static_cast<std::uint64_t>(cfg.E);
  TargetEnvironment tgt;
  RngStream param_rng(cfg.master_seed,
                      derive_stream_id(s, t, StreamRole::kTargetParameter));
  tgt.param = sample_environment_param(gt.meta(), gt.rotation(), param_rng);
  RngStream basis_rng(cfg.master_seed,
                      derive_stream_id(s, t, StreamRole::kTargetBasis));
  tgt.basis = shared_v ? draw_design_basis(*shared_v, cfg.k, basis_rng)
                       : draw_design_basis(cfg.d, cfg.k, basis_rng);
  RngStream test_rng(cfg.master_seed,
                     derive_stream_id(s, t, StreamRole::kTestSample));
  tgt.test = sample_environment(tgt.basis, tgt.param, cfg.sigma, cfg.test_rows,
                                cfg.E, test_rng, cfg.design_scaling);
  tgt.eval_cov = tgt.test.X.transpose() * tgt.test.X /
                 static_cast<double>(cfg.test_rows);
  Eigen::SelfAdjointEigenSolver<Matrix> es(tgt.eval_cov, Eigen::EigenvaluesOnly);
  tgt.eval_min_eig = es.eigenvalues()(0);
  return tgt;
}

EnvironmentDataset seed_target_sample(const ExperimentConfig& cfg,
                                      const TargetEnvironment& tgt, int seed,
                                      int n2) {
  RngStream rng(cfg.master_seed,
                derive_stream_id(static_cast<std::uint64_t>(seed),
                                 static_cast<std::uint64_t>(cfg.E),
                                 StreamRole::kTargetSample,
                                 static_cast<std::uint64_t>(n2)));
  return sample_environment(tgt.basis, tgt.param, cfg.sigma, n2, cfg.E, rng,
                            cfg.design_scaling);
}

}  // namespace detail

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Everything a seed shares across its (n2, method, lambda) cells.
struct SeedSources {
  GroundTruth gt;
  std::optional<Matrix> shared_v;
  SourceFit fit;
};

SeedSources build_sources(const ExperimentConfig& cfg,
                          const MetaDistribution& meta, int seed, int E) {
  GroundTruth gt = detail::seed_ground_truth(cfg, meta, seed);
  std::optional<Matrix> shared_v = detail::seed_shared_basis(cfg, seed);
  std::vector<EnvironmentDataset> envs;
  envs.reserve(static_cast<std::size_t>(E));
  for (int e = 0; e < E; ++e) {
    envs.push_back(detail::seed_source(cfg, gt, shared_v, seed, e, cfg.n1));
  }
  SourceFit fit = fit_sources(envs, cfg.k, 1);
  return {std::move(gt), std::move(shared_v), std::move(fit)};
}

using detail::TargetEnvironment;

std::vector<LambdaPair> lambda_points(const ExperimentConfig& cfg,
                                      const LambdaPair& rule) {
  if (cfg.lambda_mode == LambdaMode::kPaperRule) return {rule};
  std::vector<LambdaPair> out;
  for (const auto& p : cfg.lambda_grid) {
    out.push_back(cfg.lambda_grid_relative
                      ? LambdaPair{p.lambda1 * rule.lambda1,
                                   p.lambda2 * rule.lambda2}
                      : p);
  }
  return out;
}

FinetuneSolution solve_method(Method m, const EnvironmentDataset& target,
                              const SourceFit& fit, const LambdaPair& lam) {
  switch (m) {
    case Method::kJoint: {
      FinetuneConfig fc;
      fc.lambda1 = lam.lambda1;
      fc.lambda2 = lam.lambda2;
      return solve_finetune(target, fit.r1_hat, fit.mean_param, fc);
    }
    case Method::kReg1Only:
      return solve_baseline(
          target, baseline::Reg1Only{lam.lambda1, fit.r1_hat, fit.mean_param});
    case Method::kReg2Only:
      return solve_baseline(target, baseline::Reg2Only{lam.lambda2, fit.r1_hat});
    case Method::kOls:
      return solve_baseline(target, baseline::Ols{});
    case Method::kRidge:
      return solve_baseline(target, baseline::Ridge{lam.lambda2});
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown method");
}

ResultRow row_skeleton(const ExperimentConfig& cfg, Method m, int seed,
                       int n2, int point) {
  ResultRow r;
  r.method = method_name(m);
  r.seed = seed;
  r.E = cfg.E;
  r.n1 = cfg.n1;
  r.n2 = n2;
  r.d = cfg.d;
  r.k = cfg.k;
  r.sigma = cfg.sigma;
  r.lambda_point = point;
  return r;
}

ResultRow failed_row(ResultRow r, const std::string& what) {
  r.lambda1 = r.lambda2 = kNaN;
  r.target_mse = r.excess_risk = r.sin_theta = r.procrustes_err = kNaN;
  r.dk_holds = dk_status_name(DkStatus::kNotApplicable);
  r.wall_ms = 0.0;
  r.error = what.empty() ? "error" : what;
  return r;
}

// OLS ignores lambda, so it contributes one row per cell.
int points_for(Method m, std::size_t points) {
  return m == Method::kOls ? 1 : static_cast<int>(points);
}

std::vector<ResultRow> run_seed(const ExperimentConfig& cfg,
                                const MetaDistribution& meta, int seed) {
  std::vector<ResultRow> rows;
  const std::size_t grid_points =
      cfg.lambda_mode == LambdaMode::kPaperRule ? 1 : cfg.lambda_grid.size();
  const auto fail_cell = [&](int n2, const std::string& what) {
    for (Method m : cfg.methods) {
      for (int p = 0; p < points_for(m, grid_points); ++p) {
        rows.push_back(failed_row(row_skeleton(cfg, m, seed, n2, p), what));
      }
    }
  };

  std::optional<SeedSources> src;
  std::optional<TargetEnvironment> tgt;
  try {
    src.emplace(build_sources(cfg, meta, seed, cfg.E));
    tgt.emplace(detail::seed_target(cfg, src->gt, src->shared_v, seed));
  } catch (const std::exception& e) {
    for (int n2 : cfg.n2_grid) fail_cell(n2, e.what());
    return rows;
  }
  const SubspaceDistances dist = subspace_distances(src->fit.r1_hat, src->gt);
  const DavisKahanAudit dk = davis_kahan_audit(src->fit, src->gt);
  const double rule_sigma = cfg.sigma_source == SigmaSource::kTrue
                                ? cfg.sigma
                                : std::sqrt(src->fit.noise_variance_estimate);

  for (int n2 : cfg.n2_grid) {
    std::vector<ResultRow> cell;
    try {
      const EnvironmentDataset target =
          detail::seed_target_sample(cfg, *tgt, seed, n2);
      const LambdaPair rule = paper_lambda(rule_sigma, n2, tgt->eval_min_eig);
      const std::vector<LambdaPair> points = lambda_points(cfg, rule);
      for (Method m : cfg.methods) {
        for (int p = 0; p < points_for(m, points.size()); ++p) {
          const auto t0 = std::chrono::steady_clock::now();
          const FinetuneSolution sol =
              solve_method(m, target, src->fit, points[static_cast<std::size_t>(p)]);
          const auto t1 = std::chrono::steady_clock::now();
          ResultRow r = row_skeleton(cfg, m, seed, n2, p);
          r.lambda1 = sol.lambda1_used;
          r.lambda2 = sol.lambda2_used;
          const Vector resid = tgt->test.y - tgt->test.X * sol.theta_hat;
          r.target_mse = resid.squaredNorm() / static_cast<double>(resid.size());
          r.excess_risk = excess_risk(sol.theta_hat, tgt->param, tgt->eval_cov);
          r.sin_theta = dist.sin_theta;
          r.procrustes_err = dist.procrustes_err;
          r.dk_holds = dk_status_name(dk.status);
          if (cfg.record_timing) {
            r.wall_ms =
                std::chrono::duration<double, std::milli>(t1 - t0).count();
          }
          cell.push_back(std::move(r));
        }
      }
    } catch (const std::exception& e) {
      fail_cell(n2, e.what());
      continue;
    }
    rows.insert(rows.end(), std::make_move_iterator(cell.begin()),
                std::make_move_iterator(cell.end()));
  }
  return rows;
}

// Runs fn(seed) for every seed on a worker pool and rethrows the first
// failure (in seed order) once all workers are done.
template <typename T, typename Fn>
std::vector<T> per_seed(int seeds, int workers, Fn&& fn) {
  std::vector<T> out(static_cast<std::size_t>(seeds));
  std::vector<std::exception_ptr> errors(out.size());
  detail::parallel_for(out.size(), workers, [&](std::size_t i) {
    try {
      out[i] = fn(static_cast<int>(i));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

const std::vector<std::string>& result_fields() {
  static const std::vector<std::string> fields{
      "method", "seed", "E", "n1", "n2", "d", "k", "sigma", "lambda1",
      "lambda2", "target_mse", "excess_risk", "sin_theta", "procrustes_err",
      "dk_holds", "wall_ms", "error"};
  return fields;
}

int default_workers() {
  if (const char* env = std::getenv("SHARED_SUBSPACE_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v <= 4096) {
      return static_cast<int>(v);
    }
    warn(std::string("ignoring SHARED_SUBSPACE_WORKERS='") + env + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg, int workers) {
  cfg.validate();
  const MetaDistribution meta = cfg.meta();
  auto per = per_seed<std::vector<ResultRow>>(
      cfg.seeds, workers, [&](int s) { return run_seed(cfg, meta, s); });
  std::vector<ResultRow> rows;
  for (auto& v : per) {
    rows.insert(rows.end(), std::make_move_iterator(v.begin()),
                std::make_move_iterator(v.end()));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ResultRow& a, const ResultRow& b) {
                     const auto ma = parse_method(a.method);
                     const auto mb = parse_method(b.method);
                     return std::tie(ma, a.n2, a.seed, a.lambda_point) <
                            std::tie(mb, b.n2, b.seed, b.lambda_point);
                   });
  return rows;
}

void write_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  const auto& fields = result_fields();
  for (std::size_t i = 0; i < fields.size(); ++i) {
    out << (i ? "," : "") << fields[i];
  }
  out << '\n';
  for (const auto& r : rows) {
    out << csv_field(r.method) << ',' << r.seed << ',' << r.E << ',' << r.n1
        << ',' << r.n2 << ',' << r.d << ',' << r.k << ','
        << format_double(r.sigma) << ',' << format_double(r.lambda1) << ','
        << format_double(r.lambda2) << ',' << format_double(r.target_mse)
        << ',' << format_double(r.excess_risk) << ','
        << format_double(r.sin_theta) << ','
        << format_double(r.procrustes_err) << ',' << csv_field(r.dk_holds)
        << ',' << format_double(r.wall_ms) << ',' << csv_field(r.error)
        << '\n';
  }
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ostringstream ss;
  write_csv(rows, ss);
  write_text_file(path, ss.str());
}

double median(std::vector<double> values) {
  std::erase_if(values, [](double v) { return std::isnan(v); });
  if (values.empty()) return kNaN;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                   values.end());
  const double hi = values[mid];
  if (values.size() % 2 == 1) return hi;
  const double lo = *std::max_element(values.begin(),
                                      values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

double loglog_slope(const std::vector<ScalingPoint>& points) {
  std::vector<double> lx, ly;
  for (const auto& p : points) {
    if (p.x > 0.0 && p.median > 0.0 && std::isfinite(p.median)) {
      lx.push_back(std::log(p.x));
      ly.push_back(std::log(p.median));
    }
  }
  if (lx.size() < 2) return kNaN;
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : kNaN;
}

AuditReport run_audit(const ExperimentConfig& cfg, int workers) {
  cfg.validate();
  const MetaDistribution meta = cfg.meta();
  AuditReport report;

  // Per-seed Davis-Kahan audit at cfg.E plus sin_theta at each audited E.
  // Source streams depend only on (seed, env), so smaller E reuse a prefix
  // of the same environments.
  struct SeedOut {
    SeedAudit audit;
    std::vector<double> sin_at_E;
  };
  auto per = per_seed<SeedOut>(cfg.seeds, workers, [&](int s) {
    SeedOut out;
    const SeedSources src = build_sources(cfg, meta, s, cfg.E);
    const SubspaceDistances dist = subspace_distances(src.fit.r1_hat, src.gt);
    out.audit = {s, dist.sin_theta, dist.procrustes_err,
                 davis_kahan_audit(src.fit, src.gt)};
    for (int e : cfg.audit_E_grid) {
      out.sin_at_E.push_back(
          e == cfg.E ? dist.sin_theta
                     : subspace_distances(
                           build_sources(cfg, meta, s, e).fit.r1_hat, src.gt)
                           .sin_theta);
    }
    return out;
  });
  for (const auto& p : per) report.seeds.push_back(p.audit);
  for (std::size_t i = 0; i < cfg.audit_E_grid.size(); ++i) {
    std::vector<double> v;
    for (const auto& p : per) v.push_back(p.sin_at_E[i]);
    report.sin_vs_E.push_back({static_cast<double>(cfg.audit_E_grid[i]), median(v)});
  }
  report.sin_vs_E_slope = loglog_slope(report.sin_vs_E);

  ExperimentConfig risk_cfg = cfg;
  risk_cfg.methods = {Method::kJoint};
  risk_cfg.lambda_mode = LambdaMode::kPaperRule;
  const auto rows = run_sweep(risk_cfg, workers);
  std::vector<int> grid = cfg.n2_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  for (int n2 : grid) {
    std::vector<double> v;
    for (const auto& r : rows) {
      if (r.n2 == n2) v.push_back(r.excess_risk);
    }
    report.risk_vs_n2.push_back({static_cast<double>(n2), median(v)});
  }
  report.risk_vs_n2_slope = loglog_slope(report.risk_vs_n2);
  return report;
}

std::string audit_to_json(const AuditReport& report) {
  using nlohmann::json;
  const auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json seeds = json::array();
  std::size_t holds = 0, applicable = 0;
  for (const auto& s : report.seeds) {
    seeds.push_back({{"seed", s.seed},
                     {"sin_theta", num(s.sin_theta)},
                     {"procrustes_err", num(s.procrustes_err)},
                     {"dk_lhs", num(s.dk.lhs)},
                     {"dk_rhs", num(s.dk.rhs)},
                     {"perturbation", num(s.dk.perturbation)},
                     {"gap", num(s.dk.gap)},
                     {"dk_holds", dk_status_name(s.dk.status)}});
    if (s.dk.status != DkStatus::kNotApplicable) ++applicable;
    if (s.dk.holds()) ++holds;
  }
  const auto points = [&](const std::vector<ScalingPoint>& pts, const char* x) {
    json a = json::array();
    for (const auto& p : pts) a.push_back({{x, p.x}, {"median", num(p.median)}});
    return a;
  };
  std::vector<double> sins;
  for (const auto& s : report.seeds) sins.push_back(s.sin_theta);
  json j{{"seeds", seeds},
         {"median_sin_theta", num(median(sins))},
         {"dk_holds", holds},
         {"dk_applicable", applicable},
         {"dk_total", report.seeds.size()},
         {"sin_vs_E", points(report.sin_vs_E, "E")},
         {"sin_vs_E_slope", num(report.sin_vs_E_slope)},
         {"risk_vs_n2", points(report.risk_vs_n2, "n2")},
         {"risk_vs_n2_slope", num(report.risk_vs_n2_slope)}};
  return j.dump(2) + "\n";
}

}  // namespace ssa
