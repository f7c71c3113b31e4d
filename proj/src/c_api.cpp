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

#define SSA_BUILDING_LIBRARY
#include "ssa/ssa.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <new>
#include <string>

#include <json.hpp>

#include "config_detail.hpp"
#include "harness_detail.hpp"
#include "ssa/error.hpp"
#include "ssa/finetune.hpp"
#include "ssa/harness.hpp"
#include "ssa/io.hpp"
#include "ssa/spectral.hpp"

struct ssa_config {
  nlohmann::json doc;
  std::string output_path;
};
struct ssa_dataset {
  ssa::EnvironmentDataset env;
};
struct ssa_source_fit {
  ssa::SourceFit fit;
};
struct ssa_solution {
  ssa::FinetuneSolution sol;
};
struct ssa_results {
  std::vector<ssa::ResultRow> rows;
};

namespace {

thread_local std::string g_last_error;
thread_local std::string g_last_key;

ssa_status fail(ssa_status s, const std::string& msg, std::string key = {}) {
  g_last_error = msg;
  g_last_key = std::move(key);
  return s;
}

ssa_status map_error(const ssa::Error& e) {
  using ssa::ErrorCode;
  switch (e.code()) {
    case ErrorCode::kConfig: {
      const auto* ce = dynamic_cast<const ssa::ConfigError*>(&e);
      return fail(SSA_ERR_CONFIG, e.what(), ce ? ce->key() : "");
    }
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kUnderdeterminedDesign:
      return fail(SSA_ERR_DIMENSION, e.what());
    case ErrorCode::kSingularDesign:
    case ErrorCode::kSingularSystem:
      return fail(SSA_ERR_SINGULAR, e.what());
    case ErrorCode::kInsufficientEnvironments:
    case ErrorCode::kNotOrthonormal:
    case ErrorCode::kNotSymmetric:
    case ErrorCode::kRuleUndefined:
      return fail(SSA_ERR_NUMERIC, e.what());
    case ErrorCode::kIo:
      return fail(SSA_ERR_IO, e.what());
    case ErrorCode::kParse:
      return fail(SSA_ERR_PARSE, e.what());
    case ErrorCode::kInvalidArgument:
      return fail(SSA_ERR_INVALID_ARGUMENT, e.what());
  }
  return fail(SSA_ERR_INTERNAL, e.what());
}

// Runs body with the exception-to-status translation every entry point needs.
template <typename Body>
ssa_status guarded(Body&& body) {
  try {
    body();
    g_last_error.clear();
    g_last_key.clear();
    return SSA_OK;
  } catch (const ssa::Error& e) {
    return map_error(e);
  } catch (const std::bad_alloc&) {
    return fail(SSA_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SSA_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SSA_ERR_INTERNAL, "unknown exception");
  }
}

#define SSA_REQUIRE(cond, msg) \
  if (!(cond)) return fail(SSA_ERR_INVALID_ARGUMENT, msg)

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ssa::ExperimentConfig checked(const ssa_config* cfg) {
  ssa::ExperimentConfig c = ssa::detail::config_from_document(cfg->doc);
  c.validate();
  return c;
}

int resolve_workers(int workers) {
  return workers > 0 ? workers : ssa::default_workers();
}

nlohmann::json matrix_json(const ssa::Matrix& m) {
  nlohmann::json data = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

nlohmann::json vector_json(const ssa::Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}


}  // namespace

extern "C" {

const char* ssa_version(void) { return "1.0.0"; }

const char* ssa_status_string(ssa_status status) {
  switch (status) {
    case SSA_OK: return "ok";
    case SSA_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SSA_ERR_CONFIG: return "config error";
    case SSA_ERR_DIMENSION: return "dimension mismatch";
    case SSA_ERR_SINGULAR: return "singular system";
    case SSA_ERR_NUMERIC: return "numerical precondition violated";
    case SSA_ERR_IO: return "i/o error";
    case SSA_ERR_PARSE: return "parse error";
    case SSA_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* ssa_last_error(void) { return g_last_error.c_str(); }
const char* ssa_last_error_key(void) { return g_last_key.c_str(); }
void ssa_string_free(char* s) { std::free(s); }

void ssa_set_warning_callback(ssa_warning_callback cb, void* user) {
  if (!cb) {
    ssa::set_warning_handler(nullptr);
    return;
  }
  ssa::set_warning_handler(
      [cb, user](const std::string& msg) { cb(msg.c_str(), user); });
}

/* ---- config ---- */

ssa_status ssa_config_default(ssa_config** out) {
  SSA_REQUIRE(out, "out is NULL");
  return guarded([&] {
    auto* c = new ssa_config;
    c->doc = nlohmann::json::parse(ssa::config_to_json(ssa::ExperimentConfig{}));
    *out = c;
  });
}

ssa_status ssa_config_parse(const char* json, ssa_config** out) {
  SSA_REQUIRE(json && out, "NULL argument");
  return guarded([&] {
    nlohmann::json doc = ssa::detail::config_document(json);
    (void)ssa::detail::config_from_document(doc);
    *out = new ssa_config{std::move(doc), {}};
  });
}

ssa_status ssa_config_load(const char* path, ssa_config** out) {
  SSA_REQUIRE(path && out, "NULL argument");
  return guarded([&] {
    const std::string text = ssa::read_text_file(path);
    nlohmann::json doc = ssa::detail::config_document(text);
    (void)ssa::detail::config_from_document(doc);
    *out = new ssa_config{std::move(doc), {}};
  });
}

ssa_status ssa_config_set(ssa_config* cfg, const char* key, const char* value) {
  SSA_REQUIRE(cfg && key && value, "NULL argument");
  return guarded([&] {
    nlohmann::json next = cfg->doc;
    ssa::detail::apply_override(next, key, value);
    (void)ssa::detail::config_from_document(next);
    cfg->doc = std::move(next);
  });
}

ssa_status ssa_config_validate(const ssa_config* cfg) {
  SSA_REQUIRE(cfg, "cfg is NULL");
  return guarded([&] { (void)checked(cfg); });
}

ssa_status ssa_config_to_json(const ssa_config* cfg, char** out_json) {
  SSA_REQUIRE(cfg && out_json, "NULL argument");
  return guarded([&] {
    *out_json = dup_string(
        ssa::config_to_json(ssa::detail::config_from_document(cfg->doc)));
  });
}

const char* ssa_config_output_path(const ssa_config* cfg) {
  if (!cfg) return "";
  auto* mut = const_cast<ssa_config*>(cfg);
  try {
    mut->output_path = ssa::detail::config_from_document(cfg->doc).output_path;
  } catch (...) {
    mut->output_path.clear();
  }
  return mut->output_path.c_str();
}

void ssa_config_free(ssa_config* cfg) { delete cfg; }

/* ---- datasets ---- */

ssa_status ssa_dataset_create(size_t n, size_t d, const double* x_row_major,
                              const double* y, int env_index,
                              ssa_dataset** out) {
  SSA_REQUIRE(out && x_row_major && y, "NULL argument");
  SSA_REQUIRE(n > 0 && d > 0, "dataset must be nonempty");
  return guarded([&] {
    auto* ds = new ssa_dataset;
    ds->env.env_index = env_index;
    ds->env.X = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                               Eigen::Dynamic, Eigen::RowMajor>>(
        x_row_major, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    ds->env.y = Eigen::Map<const ssa::Vector>(y, static_cast<Eigen::Index>(n));
    *out = ds;
  });
}

ssa_status ssa_dataset_read_csv(const char* path, int env_index,
                                ssa_dataset** out) {
  SSA_REQUIRE(path && out, "NULL argument");
  return guarded([&] {
    *out = new ssa_dataset{ssa::read_dataset(path, env_index)};
  });
}

ssa_status ssa_dataset_write_csv(const ssa_dataset* ds, const char* path) {
  SSA_REQUIRE(ds && path, "NULL argument");
  return guarded([&] { ssa::write_dataset(ds->env, path); });
}

size_t ssa_dataset_rows(const ssa_dataset* ds) {
  return ds ? static_cast<size_t>(ds->env.n()) : 0;
}
size_t ssa_dataset_cols(const ssa_dataset* ds) {
  return ds ? static_cast<size_t>(ds->env.d()) : 0;
}
void ssa_dataset_free(ssa_dataset* ds) { delete ds; }

ssa_status ssa_generate_environment(const ssa_config* cfg, int seed_index,
                                    int env_index, int n, ssa_dataset** out) {
  SSA_REQUIRE(cfg && out, "NULL argument");
  SSA_REQUIRE(seed_index >= 0, "seed_index must be >= 0");
  SSA_REQUIRE(env_index >= 0, "env_index must be >= 0");
  return guarded([&] {
    const ssa::ExperimentConfig c = checked(cfg);
    if (env_index > c.E) {
      throw ssa::Error(ssa::ErrorCode::kInvalidArgument,
                       "env_index exceeds E (E selects the target)");
    }
    const auto gt = ssa::detail::seed_ground_truth(c, c.meta(), seed_index);
    const auto v = ssa::detail::seed_shared_basis(c, seed_index);
    if (env_index < c.E) {
      *out = new ssa_dataset{
          ssa::detail::seed_source(c, gt, v, seed_index, env_index, n)};
    } else {
      const auto tgt = ssa::detail::seed_target(c, gt, v, seed_index);
      *out = new ssa_dataset{
          ssa::detail::seed_target_sample(c, tgt, seed_index, n)};
    }
  });
}

ssa_status ssa_generate_to_directory(const ssa_config* cfg, int seed_index,
                                     int n2, const char* dir) {
  SSA_REQUIRE(cfg && dir, "NULL argument");
  SSA_REQUIRE(seed_index >= 0, "seed_index must be >= 0");
  return guarded([&] {
    namespace fs = std::filesystem;
    const ssa::ExperimentConfig c = checked(cfg);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
      throw ssa::Error(ssa::ErrorCode::kIo, std::string("cannot create directory ") +
                                                dir + ": " + ec.message());
    }
    const fs::path root(dir);
    const auto gt = ssa::detail::seed_ground_truth(c, c.meta(), seed_index);
    const auto v = ssa::detail::seed_shared_basis(c, seed_index);
    nlohmann::json sources = nlohmann::json::array();
    for (int e = 0; e < c.E; ++e) {
      const auto env = ssa::detail::seed_source(c, gt, v, seed_index, e, c.n1);
      char name[32];
      std::snprintf(name, sizeof name, "source_%04d.csv", e);
      ssa::write_dataset(env, (root / name).string());
      sources.push_back({{"file", name}, {"env_index", e}, {"rows", c.n1},
                         {"true_param", vector_json(*env.true_param)}});
    }
    const auto tgt = ssa::detail::seed_target(c, gt, v, seed_index);
    const auto target = ssa::detail::seed_target_sample(c, tgt, seed_index, n2);
    ssa::write_dataset(target, (root / "target.csv").string());
    nlohmann::json manifest{
        {"seed_index", seed_index},
        {"master_seed", c.master_seed},
        {"d", c.d},
        {"k", c.k},
        {"E", c.E},
        {"n1", c.n1},
        {"n2", n2},
        {"sigma", c.sigma},
        {"design_scaling", ssa::design_scaling_name(c.design_scaling)},
        {"shared_design_basis", c.shared_design_basis},
        // Singular values are |N(5,1)| for the first k and |N(0,1)| after.
        {"singular_value_policy", "absolute"},
        {"rotation", matrix_json(gt.rotation())},
        {"theta_star", vector_json(gt.meta().theta_star())},
        {"lambda11", vector_json(gt.meta().lambda11())},
        {"lambda22", vector_json(gt.meta().lambda22())},
        {"sources", sources},
        {"target", {{"file", "target.csv"},
                    {"env_index", c.E},
                    {"rows", n2},
                    {"true_param", vector_json(tgt.param)},
                    {"singular_values", vector_json(tgt.basis.singular_values)},
                    {"eval_min_eig", tgt.eval_min_eig}}}};
    ssa::write_text_file((root / "manifest.json").string(), manifest.dump(2) + "\n");
  });
}

/* ---- source phase ---- */

ssa_status ssa_fit_sources(const ssa_dataset* const* envs, size_t count, int k,
                           int workers, ssa_source_fit** out) {
  SSA_REQUIRE(envs && out, "NULL argument");
  for (size_t i = 0; i < count; ++i) SSA_REQUIRE(envs[i], "NULL dataset");
  return guarded([&] {
    std::vector<ssa::EnvironmentDataset> v;
    v.reserve(count);
    for (size_t i = 0; i < count; ++i) v.push_back(envs[i]->env);
    *out = new ssa_source_fit{ssa::fit_sources(v, k, resolve_workers(workers))};
  });
}

ssa_status ssa_source_fit_to_json(const ssa_source_fit* fit,
                                  int include_per_env_params, char** out_json) {
  SSA_REQUIRE(fit && out_json, "NULL argument");
  return guarded([&] {
    *out_json = dup_string(
        ssa::source_fit_to_json(fit->fit, include_per_env_params != 0));
  });
}

ssa_status ssa_source_fit_from_json(const char* json, ssa_source_fit** out) {
  SSA_REQUIRE(json && out, "NULL argument");
  return guarded([&] {
    *out = new ssa_source_fit{ssa::source_fit_from_json(json)};
  });
}

int ssa_source_fit_dim(const ssa_source_fit* fit) { return fit ? fit->fit.d() : 0; }
int ssa_source_fit_k(const ssa_source_fit* fit) { return fit ? fit->fit.k() : 0; }

ssa_status ssa_source_fit_eigenvalues(const ssa_source_fit* fit, double* out,
                                      size_t len) {
  SSA_REQUIRE(fit && out, "NULL argument");
  const auto& ev = fit->fit.eigenvalues;
  for (size_t i = 0; i < len && i < static_cast<size_t>(ev.size()); ++i) {
    out[i] = ev(static_cast<Eigen::Index>(i));
  }
  return SSA_OK;
}

size_t ssa_source_fit_warning_count(const ssa_source_fit* fit) {
  return fit ? fit->fit.warnings.size() : 0;
}
const char* ssa_source_fit_warning(const ssa_source_fit* fit, size_t i) {
  if (!fit || i >= fit->fit.warnings.size()) return "";
  return fit->fit.warnings[i].c_str();
}
void ssa_source_fit_free(ssa_source_fit* fit) { delete fit; }

/* ---- fine-tuning ---- */

ssa_status ssa_paper_lambda(double sigma, int n2, double min_eig,
                            double* out_lambda) {
  SSA_REQUIRE(out_lambda, "NULL argument");
  return guarded([&] {
    *out_lambda = ssa::paper_lambda(sigma, n2, min_eig).lambda1;
  });
}

ssa_status ssa_finetune(const ssa_source_fit* fit, const ssa_dataset* target,
                        const ssa_finetune_options* opts, ssa_solution** out) {
  SSA_REQUIRE(fit && target && opts && out, "NULL argument");
  return guarded([&] {
    if (target->env.d() != fit->fit.d()) {
      throw ssa::Error(ssa::ErrorCode::kDimensionMismatch,
                       "dimension mismatch: target has d = " + std::to_string(target->env.d()) +
                           ", source fit has d = " + std::to_string(fit->fit.d()));
    }
    ssa::FinetuneConfig fc;
    fc.lambda1 = opts->lambda1;
    fc.lambda2 = opts->lambda2;
    if (opts->use_paper_rule) {
      fc.lambda_rule = ssa::LambdaRule::kPaperRule;
      fc.sigma_for_rule = opts->sigma;
      if (opts->sigma_x_min_eig > 0.0) {
        fc.sigma_x_min_eig = opts->sigma_x_min_eig;
      } else {
        const auto& X = target->env.X;
        const ssa::Matrix gram = X.transpose() * X / static_cast<double>(X.rows());
        Eigen::SelfAdjointEigenSolver<ssa::Matrix> es(gram, Eigen::EigenvaluesOnly);
        fc.sigma_x_min_eig = es.eigenvalues()(0);
      }
    }
    *out = new ssa_solution{
        ssa::solve_finetune(target->env, fit->fit.r1_hat, fit->fit.mean_param, fc)};
  });
}

ssa_status ssa_solution_theta(const ssa_solution* sol, double* out, size_t len) {
  SSA_REQUIRE(sol && out, "NULL argument");
  const auto& t = sol->sol.theta_hat;
  for (size_t i = 0; i < len && i < static_cast<size_t>(t.size()); ++i) {
    out[i] = t(static_cast<Eigen::Index>(i));
  }
  return SSA_OK;
}

size_t ssa_solution_dim(const ssa_solution* sol) {
  return sol ? static_cast<size_t>(sol->sol.theta_hat.size()) : 0;
}
double ssa_solution_objective(const ssa_solution* sol) {
  return sol ? sol->sol.objective_value : NAN;
}
double ssa_solution_gradient_norm(const ssa_solution* sol) {
  return sol ? sol->sol.gradient_norm : NAN;
}
double ssa_solution_lambda1(const ssa_solution* sol) {
  return sol ? sol->sol.lambda1_used : NAN;
}
double ssa_solution_lambda2(const ssa_solution* sol) {
  return sol ? sol->sol.lambda2_used : NAN;
}

ssa_status ssa_solution_to_json(const ssa_solution* sol, char** out_json) {
  SSA_REQUIRE(sol && out_json, "NULL argument");
  return guarded([&] {
    *out_json = dup_string(ssa::finetune_solution_to_json(sol->sol));
  });
}
void ssa_solution_free(ssa_solution* sol) { delete sol; }

/* ---- experiments ---- */

ssa_status ssa_run_sweep(const ssa_config* cfg, int workers, ssa_results** out) {
  SSA_REQUIRE(cfg && out, "NULL argument");
  return guarded([&] {
    const ssa::ExperimentConfig c = checked(cfg);
    *out = new ssa_results{ssa::run_sweep(c, resolve_workers(workers))};
  });
}

size_t ssa_results_count(const ssa_results* res) {
  return res ? res->rows.size() : 0;
}

ssa_status ssa_results_write_csv(const ssa_results* res, const char* path) {
  SSA_REQUIRE(res && path, "NULL argument");
  return guarded([&] { ssa::emit_csv(res->rows, path); });
}

ssa_status ssa_results_write_svg(const ssa_results* res, const char* x_field,
                                 const char* y_field, const char* group_field,
                                 int log_scale, const char* path) {
  SSA_REQUIRE(res && x_field && y_field && group_field && path, "NULL argument");
  return guarded([&] {
    ssa::PlotOptions opts;
    opts.log_x = opts.log_y = log_scale != 0;
    opts.title = std::string(y_field) + " vs " + x_field;
    ssa::emit_plot(res->rows, x_field, y_field, group_field, path, opts);
  });
}

void ssa_results_free(ssa_results* res) { delete res; }

ssa_status ssa_run_audit(const ssa_config* cfg, int workers, char** out_json) {
  SSA_REQUIRE(cfg && out_json, "NULL argument");
  return guarded([&] {
    const ssa::ExperimentConfig c = checked(cfg);
    *out_json = dup_string(
        ssa::audit_to_json(ssa::run_audit(c, resolve_workers(workers))));
  });
}

}  // extern "C"
