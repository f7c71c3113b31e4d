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

#include <optional>
#include <string>

#include "ssa/linalg.hpp"
#include "ssa/rng.hpp"

namespace ssa {

// Gaussian law of the per-environment parameter in the latent basis:
//   theta_e ~ N([theta_star; 0], diag(lambda11, lambda22)),
// plus the observation noise level sigma.
//
// Hard invariants (k < d, nonnegative ascending diagonals, sigma >= 0) throw.
// A missing eigengap, max(lambda11) >= min(lambda22), only warns: the
// generator is still well defined, the spectral step just loses its
// identifiability guarantee.
class MetaDistribution {
 public:
  MetaDistribution(Vector theta_star, Vector lambda11, Vector lambda22,
                   double sigma);

  // theta_star = value * 1_k, lambda11 = l11 * I_k, lambda22 = l22 * I_{d-k}.
  static MetaDistribution isotropic(int d, int k, double theta_value,
                                    double lambda11_value,
                                    double lambda22_value, double sigma);

  int d() const noexcept { return d_; }
  int k() const noexcept { return k_; }
  const Vector& theta_star() const noexcept { return theta_star_; }
  const Vector& lambda11() const noexcept { return lambda11_; }
  const Vector& lambda22() const noexcept { return lambda22_; }
  double sigma() const noexcept { return sigma_; }

  // min(lambda22) - max(lambda11)
  double eigengap() const noexcept;
  bool well_separated() const noexcept { return eigengap() > 0.0; }

  // diag(lambda11, lambda22)
  Vector latent_variances() const;

 private:
  int d_;
  int k_;
  Vector theta_star_;
  Vector lambda11_;
  Vector lambda22_;
  double sigma_;
};

// Ground-truth orthogonal representation R* = [R*_1, R*_2] together with the
// meta-distribution it rotates.
class GroundTruth {
 public:
  GroundTruth(Matrix rotation, MetaDistribution meta);

  // Draws R* from the Haar measure on O(d).
  static GroundTruth sample(const MetaDistribution& meta, RngStream& rng);

  const Matrix& rotation() const noexcept { return rotation_; }
  const MetaDistribution& meta() const noexcept { return meta_; }
  int d() const noexcept { return meta_.d(); }
  int k() const noexcept { return meta_.k(); }

  Matrix content_basis() const { return rotation_.leftCols(k()); }
  Matrix environment_basis() const { return rotation_.rightCols(d() - k()); }

  // R* diag(lambda11, lambda22) R*^T, the covariance of R* theta_e.
  Matrix rotated_covariance() const;
  // R*_1 theta_star, the mean of R* theta_e.
  Vector rotated_mean() const;

 private:
  Matrix rotation_;
  MetaDistribution meta_;
};

// Row scaling applied by the SVD design generator.
//   kUnit:  X = U S V^T, singular values exactly |s_i|.
//   kSqrtN: X = sqrt(n) U S V^T, so X^T X / n = V S^2 V^T for every n.
enum class DesignScaling { kUnit, kSqrtN };

const char* design_scaling_name(DesignScaling s);
DesignScaling parse_design_scaling(const std::string& name);

// The distribution-level part of one environment's design: V and |s|.
struct DesignBasis {
  Matrix right_vectors;   // d x d orthogonal
  Vector singular_values; // length d, nonnegative

  // V diag(s^2) V^T: the exact Gram matrix per row under kSqrtN scaling.
  Matrix population_covariance() const;
};

// V ~ Haar(O(d)); s_i ~ N(5,1) for i <= k and N(0,1) otherwise, magnitudes
// taken. V is drawn before s.
DesignBasis draw_design_basis(int d, int k, RngStream& rng);
// Same, but reusing a given V (draws only s).
DesignBasis draw_design_basis(const Matrix& shared_right_vectors, int k,
                              RngStream& rng);

// X = U diag(s) V^T with U an n x d Haar orthonormal-column matrix.
// Requires n >= d.
Matrix sample_design(const DesignBasis& basis, int n, RngStream& rng,
                     DesignScaling scaling = DesignScaling::kUnit);

// Fresh basis then fresh U.
Matrix generate_design(int n, int d, int k, RngStream& rng,
                       DesignScaling scaling = DesignScaling::kUnit);

struct EnvironmentDataset {
  Matrix X;
  Vector y;
  std::optional<Vector> true_param;
  int env_index = 0;

  Eigen::Index n() const noexcept { return X.rows(); }
  Eigen::Index d() const noexcept { return X.cols(); }

  // Throws kDimensionMismatch when rows(X) != len(y) or the true parameter
  // length differs from cols(X).
  void validate() const;
};

// R* theta_e with theta_e drawn from the meta-distribution.
Vector sample_environment_param(const MetaDistribution& meta,
                                const Matrix& rotation, RngStream& rng);

struct GenerateOptions {
  DesignScaling scaling = DesignScaling::kUnit;
  // Reuse this V for the design instead of drawing a fresh one.
  std::optional<Matrix> shared_right_vectors;
};

// Draw order: design basis, U, parameter, noise.
EnvironmentDataset generate_environment(const GroundTruth& gt, int n,
                                        int env_index, RngStream& rng,
                                        const GenerateOptions& opts = {});

// y = X * param + N(0, sigma^2 I), X sampled from a fixed basis. Used for
// target environments observed at several sample sizes.
EnvironmentDataset sample_environment(const DesignBasis& basis,
                                      const Vector& param, double sigma, int n,
                                      int env_index, RngStream& rng,
                                      DesignScaling scaling);

}  // namespace ssa
