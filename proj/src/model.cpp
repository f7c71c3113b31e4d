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

#include "ssa/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ssa/error.hpp"

namespace ssa {

namespace {

bool ascending(const Vector& v) {
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v(i) < v(i - 1)) return false;
  }
  return true;
}

}  // namespace

MetaDistribution::MetaDistribution(Vector theta_star, Vector lambda11,
                                   Vector lambda22, double sigma)
    : d_(static_cast<int>(lambda11.size() + lambda22.size())),
      k_(static_cast<int>(lambda11.size())),
      theta_star_(std::move(theta_star)),
      lambda11_(std::move(lambda11)),
      lambda22_(std::move(lambda22)),
      sigma_(sigma) {
  if (k_ < 1 || lambda22_.size() < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "meta-distribution needs 1 <= k < d");
  }
  if (theta_star_.size() != k_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "theta_star must have length k = " + std::to_string(k_));
  }
  if ((lambda11_.array() < 0.0).any() || (lambda22_.array() < 0.0).any()) {
    throw Error(ErrorCode::kInvalidArgument,
                "lambda11/lambda22 must be nonnegative");
  }
  if (!ascending(lambda11_) || !ascending(lambda22_)) {
    throw Error(ErrorCode::kInvalidArgument,
                "lambda11/lambda22 must be sorted ascending");
  }
  if (!(sigma_ >= 0.0) || !std::isfinite(sigma_)) {
    throw Error(ErrorCode::kInvalidArgument, "sigma must be finite and >= 0");
  }
  if (!well_separated()) {
    std::ostringstream msg;
    msg << "well-separation violated: max(lambda11) = " << lambda11_.maxCoeff()
        << " >= min(lambda22) = " << lambda22_.minCoeff()
        << "; the content subspace is not identifiable from the spectrum";
    warn(msg.str());
  }
}

MetaDistribution MetaDistribution::isotropic(int d, int k, double theta_value,
                                             double lambda11_value,
                                             double lambda22_value,
                                             double sigma) {
  if (k < 1 || k >= d) {
    throw Error(ErrorCode::kInvalidArgument,
                "meta-distribution needs 1 <= k < d");
  }
  return MetaDistribution(Vector::Constant(k, theta_value),
                          Vector::Constant(k, lambda11_value),
                          Vector::Constant(d - k, lambda22_value), sigma);
}

double MetaDistribution::eigengap() const noexcept {
  return lambda22_.minCoeff() - lambda11_.maxCoeff();
}

Vector MetaDistribution::latent_variances() const {
  Vector v(d_);
  v << lambda11_, lambda22_;
  return v;
}

GroundTruth::GroundTruth(Matrix rotation, MetaDistribution meta)
    : rotation_(std::move(rotation)), meta_(std::move(meta)) {
  if (rotation_.rows() != meta_.d() || rotation_.cols() != meta_.d()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "rotation must be d x d with d = " + std::to_string(meta_.d()));
  }
  if (orthonormality_defect(rotation_) > 1e-10) {
    throw Error(ErrorCode::kNotOrthonormal, "rotation is not orthogonal");
  }
}

GroundTruth GroundTruth::sample(const MetaDistribution& meta, RngStream& rng) {
  return GroundTruth(haar_orthogonal(meta.d(), rng), meta);
}

Matrix GroundTruth::rotated_covariance() const {
  return rotation_ * meta_.latent_variances().asDiagonal() *
         rotation_.transpose();
}

Vector GroundTruth::rotated_mean() const {
  return content_basis() * meta_.theta_star();
}

const char* design_scaling_name(DesignScaling s) {
  return s == DesignScaling::kUnit ? "none" : "sqrt_n";
}

DesignScaling parse_design_scaling(const std::string& name) {
  if (name == "none" || name == "unit") return DesignScaling::kUnit;
  if (name == "sqrt_n") return DesignScaling::kSqrtN;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown design scaling '" + name + "' (expected none|sqrt_n)");
}

Matrix DesignBasis::population_covariance() const {
  return right_vectors * singular_values.array().square().matrix().asDiagonal() *
         right_vectors.transpose();
}

DesignBasis draw_design_basis(const Matrix& shared_right_vectors, int k,
                              RngStream& rng) {
  const auto d = shared_right_vectors.cols();
  if (shared_right_vectors.rows() != d || k < 1 || k >= d) {
    throw Error(ErrorCode::kInvalidArgument,
                "design basis needs a square V and 1 <= k < d");
  }
  DesignBasis basis{shared_right_vectors, Vector(d)};
  // Gaussian draws can be negative; singular values are their magnitudes.
  for (Eigen::Index i = 0; i < d; ++i) {
    basis.singular_values(i) = std::abs(i < k ? rng.normal(5.0, 1.0) : rng.normal());
  }
  return basis;
}

DesignBasis draw_design_basis(int d, int k, RngStream& rng) {
  if (k < 1 || k >= d) {
    throw Error(ErrorCode::kInvalidArgument, "design basis needs 1 <= k < d");
  }
  Matrix v = haar_orthogonal(d, rng);
  return draw_design_basis(v, k, rng);
}

Matrix sample_design(const DesignBasis& basis, int n, RngStream& rng,
                     DesignScaling scaling) {
  const auto d = basis.right_vectors.cols();
  if (n < d) {
    throw Error(ErrorCode::kUnderdeterminedDesign,
                "underdetermined design unsupported by default generator (n = " +
                    std::to_string(n) + " < d = " + std::to_string(d) + ")");
  }
  Matrix u = haar_orthonormal(n, d, rng);
  Matrix x = u * basis.singular_values.asDiagonal() *
             basis.right_vectors.transpose();
  if (scaling == DesignScaling::kSqrtN) x *= std::sqrt(static_cast<double>(n));
  return x;
}

Matrix generate_design(int n, int d, int k, RngStream& rng,
                       DesignScaling scaling) {
  if (n < d) {
    throw Error(ErrorCode::kUnderdeterminedDesign,
                "underdetermined design unsupported by default generator (n = " +
                    std::to_string(n) + " < d = " + std::to_string(d) + ")");
  }
  return sample_design(draw_design_basis(d, k, rng), n, rng, scaling);
}

void EnvironmentDataset::validate() const {
  if (X.rows() != y.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "environment " + std::to_string(env_index) + ": X has " +
                    std::to_string(X.rows()) + " rows but y has " +
                    std::to_string(y.size()) + " entries");
  }
  if (true_param && true_param->size() != X.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "environment " + std::to_string(env_index) +
                    ": true parameter length differs from cols(X)");
  }
}

Vector sample_environment_param(const MetaDistribution& meta,
                                const Matrix& rotation, RngStream& rng) {
  const int d = meta.d();
  if (rotation.rows() != d || rotation.cols() != d) {
    throw Error(ErrorCode::kDimensionMismatch,
                "rotation is " + std::to_string(rotation.rows()) + "x" +
                    std::to_string(rotation.cols()) +
                    " but the meta-distribution has d = " + std::to_string(d));
  }
  Vector latent(d);
  for (int i = 0; i < d; ++i) {
    const double mean = i < meta.k() ? meta.theta_star()(i) : 0.0;
    const double var =
        i < meta.k() ? meta.lambda11()(i) : meta.lambda22()(i - meta.k());
    latent(i) = mean + std::sqrt(var) * rng.normal();
  }
  return rotation * latent;
}

namespace {

Vector add_noise(const Matrix& x, const Vector& param, double sigma,
                 RngStream& rng) {
  Vector y = x * param;
  if (sigma > 0.0) {
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += sigma * rng.normal();
  }
  return y;
}

}  // namespace

EnvironmentDataset generate_environment(const GroundTruth& gt, int n,
                                        int env_index, RngStream& rng,
                                        const GenerateOptions& opts) {
  const DesignBasis basis =
      opts.shared_right_vectors
          ? draw_design_basis(*opts.shared_right_vectors, gt.k(), rng)
          : draw_design_basis(gt.d(), gt.k(), rng);
  EnvironmentDataset env;
  env.env_index = env_index;
  env.X = sample_design(basis, n, rng, opts.scaling);
  env.true_param = sample_environment_param(gt.meta(), gt.rotation(), rng);
  env.y = add_noise(env.X, *env.true_param, gt.meta().sigma(), rng);
  return env;
}

EnvironmentDataset sample_environment(const DesignBasis& basis,
                                      const Vector& param, double sigma, int n,
                                      int env_index, RngStream& rng,
                                      DesignScaling scaling) {
  if (param.size() != basis.right_vectors.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "parameter length differs from design dimension");
  }
  EnvironmentDataset env;
  env.env_index = env_index;
  env.X = sample_design(basis, n, rng, scaling);
  env.true_param = param;
  env.y = add_noise(env.X, param, sigma, rng);
  return env;
}

}  // namespace ssa
