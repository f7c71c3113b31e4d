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

#include <span>
#include <string>
#include <vector>

#include "ssa/linalg.hpp"
#include "ssa/model.hpp"

namespace ssa {

// Designs with condition number above this are rejected by fit_ols.
inline constexpr double kMaxDesignCondition = 1e12;

struct OlsResult {
  Vector param;
  double residual_sum_squares = 0.0;
  double condition_number = 0.0;
};

// argmin ||y - X theta||^2 via column-pivoted QR.
OlsResult ols(const EnvironmentDataset& env);
inline Vector fit_ols(const EnvironmentDataset& env) { return ols(env).param; }

struct ParameterMoments {
  Vector mean;
  Matrix covariance;  // divisor E
};

// Arithmetic mean and (1/E) sum (p - mean)(p - mean)^T. Requires E >= 2.
ParameterMoments aggregate(std::span<const Vector> params);

struct Subspace {
  Matrix r1_hat;      // d x k, eigenvectors of the k smallest eigenvalues
  Matrix r2_hat;      // d x (d - k)
  Vector eigenvalues; // ascending
  std::vector<std::string> warnings;
};

// Symmetric eigendecomposition with ascending eigenvalues. Each eigenvector
// is oriented so its largest-magnitude entry is positive; ties keep the
// solver's index order. A tie across the k / k+1 boundary produces a
// "degenerate eigengap" warning.
Subspace extract_subspace(const Matrix& sample_cov, int k);

struct SourceFit {
  std::vector<int> env_indices;        // canonical (ascending) order
  std::vector<Vector> per_env_params;  // aligned with env_indices
  Vector mean_param;
  Matrix sample_cov;
  Matrix r1_hat;
  Matrix r2_hat;
  Vector eigenvalues;
  // Pooled residual variance sum(RSS_e) / sum(n_e - d); a plug-in sigma^2.
  double noise_variance_estimate = 0.0;
  std::vector<std::string> warnings;

  int d() const noexcept { return static_cast<int>(mean_param.size()); }
  int k() const noexcept { return static_cast<int>(r1_hat.cols()); }
  int num_environments() const noexcept {
    return static_cast<int>(env_indices.size());
  }
};

// Per-environment OLS, aggregation, and least-k eigenvector extraction.
// Environments are processed in ascending env_index order regardless of the
// input order; the OLS fits may run on `workers` threads without changing
// the result. Any failing environment aborts with its env_index in the
// message.
SourceFit fit_sources(std::span<const EnvironmentDataset> envs, int k,
                      int workers = 1);

}  // namespace ssa
