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

/*
 * C interface to the shared-subspace adaptation library.
 *
 * Every object is an opaque handle released with its matching *_free call.
 * Fallible calls return ssa_status; on failure ssa_last_error() describes
 * the problem for the calling thread. Strings returned through char** are
 * owned by the caller and released with ssa_string_free().
 */
#ifndef SSA_SSA_H_
#define SSA_SSA_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SSA_BUILDING_LIBRARY)
#    define SSA_API __declspec(dllexport)
#  else
#    define SSA_API __declspec(dllimport)
#  endif
#else
#  define SSA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ssa_status {
  SSA_OK = 0,
  SSA_ERR_INVALID_ARGUMENT = 1,
  SSA_ERR_CONFIG = 2,
  SSA_ERR_DIMENSION = 3,
  SSA_ERR_SINGULAR = 4,
  SSA_ERR_NUMERIC = 5,
  SSA_ERR_IO = 6,
  SSA_ERR_PARSE = 7,
  SSA_ERR_INTERNAL = 8
} ssa_status;

typedef struct ssa_config ssa_config;
typedef struct ssa_dataset ssa_dataset;
typedef struct ssa_source_fit ssa_source_fit;
typedef struct ssa_solution ssa_solution;
typedef struct ssa_results ssa_results;

SSA_API const char* ssa_version(void);
SSA_API const char* ssa_status_string(ssa_status status);
/* Message of the last failed call on this thread ("" if none). */
SSA_API const char* ssa_last_error(void);
/* Config key named by the last SSA_ERR_CONFIG failure ("" if none). */
SSA_API const char* ssa_last_error_key(void);
SSA_API void ssa_string_free(char* s);

/* Receives non-fatal warnings. NULL restores the stderr default. */
typedef void (*ssa_warning_callback)(const char* message, void* user);
SSA_API void ssa_set_warning_callback(ssa_warning_callback cb, void* user);

/* ---- experiment configuration ---------------------------------------- */

SSA_API ssa_status ssa_config_default(ssa_config** out);
SSA_API ssa_status ssa_config_parse(const char* json, ssa_config** out);
SSA_API ssa_status ssa_config_load(const char* path, ssa_config** out);
/* Sets one key; value is JSON text or a bare string. Type-checked now,
 * cross-field validation happens in ssa_config_validate and the runners. */
SSA_API ssa_status ssa_config_set(ssa_config* cfg, const char* key,
                                  const char* value);
SSA_API ssa_status ssa_config_validate(const ssa_config* cfg);
SSA_API ssa_status ssa_config_to_json(const ssa_config* cfg, char** out_json);
SSA_API const char* ssa_config_output_path(const ssa_config* cfg);
SSA_API void ssa_config_free(ssa_config* cfg);

/* ---- datasets --------------------------------------------------------- */

SSA_API ssa_status ssa_dataset_create(size_t n, size_t d,
                                      const double* x_row_major,
                                      const double* y, int env_index,
                                      ssa_dataset** out);
SSA_API ssa_status ssa_dataset_read_csv(const char* path, int env_index,
                                        ssa_dataset** out);
SSA_API ssa_status ssa_dataset_write_csv(const ssa_dataset* ds,
                                         const char* path);
SSA_API size_t ssa_dataset_rows(const ssa_dataset* ds);
SSA_API size_t ssa_dataset_cols(const ssa_dataset* ds);
SSA_API void ssa_dataset_free(ssa_dataset* ds);

/* Synthesizes one environment of seed `seed_index` exactly as the sweep
 * does. env_index in [0, E) selects a source; env_index == E the target,
 * observed with n rows. */
SSA_API ssa_status ssa_generate_environment(const ssa_config* cfg,
                                            int seed_index, int env_index,
                                            int n, ssa_dataset** out);
/* Writes source_0000.csv ... source_{E-1}.csv, target.csv (n2 rows) and
 * manifest.json (ground truth and generator settings) into dir. */
SSA_API ssa_status ssa_generate_to_directory(const ssa_config* cfg,
                                             int seed_index, int n2,
                                             const char* dir);

/* ---- source phase ----------------------------------------------------- */

SSA_API ssa_status ssa_fit_sources(const ssa_dataset* const* envs,
                                   size_t count, int k, int workers,
                                   ssa_source_fit** out);
SSA_API ssa_status ssa_source_fit_to_json(const ssa_source_fit* fit,
                                          int include_per_env_params,
                                          char** out_json);
SSA_API ssa_status ssa_source_fit_from_json(const char* json,
                                            ssa_source_fit** out);
SSA_API int ssa_source_fit_dim(const ssa_source_fit* fit);
SSA_API int ssa_source_fit_k(const ssa_source_fit* fit);
/* Copies min(len, d) ascending eigenvalues. */
SSA_API ssa_status ssa_source_fit_eigenvalues(const ssa_source_fit* fit,
                                              double* out, size_t len);
SSA_API size_t ssa_source_fit_warning_count(const ssa_source_fit* fit);
SSA_API const char* ssa_source_fit_warning(const ssa_source_fit* fit,
                                           size_t i);
SSA_API void ssa_source_fit_free(ssa_source_fit* fit);

/* ---- target fine-tuning ----------------------------------------------- */

typedef struct ssa_finetune_options {
  double lambda1;
  double lambda2;
  /* Nonzero: ignore lambda1/lambda2 and use lambda = min_eig * sigma / (sqrt(n2) - sigma). */
  int use_paper_rule;
  double sigma;
  /* Smallest eigenvalue of the input covariance for the rule; <= 0 means
   * use the smallest eigenvalue of X^T X / n of the target itself. */
  double sigma_x_min_eig;
} ssa_finetune_options;

SSA_API ssa_status ssa_paper_lambda(double sigma, int n2, double min_eig,
                                    double* out_lambda);
SSA_API ssa_status ssa_finetune(const ssa_source_fit* fit,
                                const ssa_dataset* target,
                                const ssa_finetune_options* opts,
                                ssa_solution** out);
SSA_API ssa_status ssa_solution_theta(const ssa_solution* sol, double* out,
                                      size_t len);
SSA_API size_t ssa_solution_dim(const ssa_solution* sol);
SSA_API double ssa_solution_objective(const ssa_solution* sol);
SSA_API double ssa_solution_gradient_norm(const ssa_solution* sol);
SSA_API double ssa_solution_lambda1(const ssa_solution* sol);
SSA_API double ssa_solution_lambda2(const ssa_solution* sol);
SSA_API ssa_status ssa_solution_to_json(const ssa_solution* sol,
                                        char** out_json);
SSA_API void ssa_solution_free(ssa_solution* sol);

/* ---- experiments ------------------------------------------------------ */

/* workers <= 0 selects SHARED_SUBSPACE_WORKERS or hardware concurrency. */
SSA_API ssa_status ssa_run_sweep(const ssa_config* cfg, int workers,
                                 ssa_results** out);
SSA_API size_t ssa_results_count(const ssa_results* res);
SSA_API ssa_status ssa_results_write_csv(const ssa_results* res,
                                         const char* path);
SSA_API ssa_status ssa_results_write_svg(const ssa_results* res,
                                         const char* x_field,
                                         const char* y_field,
                                         const char* group_field,
                                         int log_scale, const char* path);
SSA_API void ssa_results_free(ssa_results* res);

/* Davis-Kahan and rate-scaling report as JSON. */
SSA_API ssa_status ssa_run_audit(const ssa_config* cfg, int workers,
                                 char** out_json);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* SSA_SSA_H_ */
