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

#include "ssa/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <sstream>

#include "ssa/error.hpp"
#include "parallel.hpp"

namespace ssa {

OlsResult ols(const EnvironmentDataset& env) {
  env.validate();
  const auto n = env.X.rows();
  const auto d = env.X.cols();
  if (d < 1) throw Error(ErrorCode::kInvalidArgument, "design has no columns");
  if (n < d) {
    throw SingularDesignError(
        std::numeric_limits<double>::infinity(),
        "singular design in environment " + std::to_string(env.env_index) +
            ": " + std::to_string(n) + " rows for " + std::to_string(d) +
            " columns (condition number inf)");
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(env.X);
  const Matrix r = qr.matrixR().topLeftCorner(d, d).triangularView<Eigen::Upper>();
  Eigen::JacobiSVD<Matrix> svd(r);
  const Vector& s = svd.singularValues();
  const double cond = s(d - 1) > 0.0 ? s(0) / s(d - 1)
                                     : std::numeric_limits<double>::infinity();
  if (!(cond <= kMaxDesignCondition)) {
    std::ostringstream msg;
    msg << "singular design in environment " << env.env_index
        << ": condition number " << cond << " exceeds " << kMaxDesignCondition;
    throw SingularDesignError(cond, msg.str());
  }
  OlsResult out;
  out.param = qr.solve(env.y);
  out.residual_sum_squares = (env.y - env.X * out.param).squaredNorm();
  out.condition_number = cond;
  return out;
}

ParameterMoments aggregate(std::span<const Vector> params) {
  if (params.size() < 2) {
    throw Error(ErrorCode::kInsufficientEnvironments,
                "insufficient environments: need at least 2, got " +
                    std::to_string(params.size()));
  }
  const auto d = params.front().size();
  Vector mean = Vector::Zero(d);
  for (const auto& p : params) {
    if (p.size() != d) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "parameter vectors differ in length");
    }
    mean += p;
  }
  const double count = static_cast<double>(params.size());
  mean /= count;
  Matrix cov = Matrix::Zero(d, d);
  for (const auto& p : params) {
    const Vector c = p - mean;
    cov.selfadjointView<Eigen::Lower>().rankUpdate(c);
  }
  cov = cov.selfadjointView<Eigen::Lower>();
  cov /= count;
  return {std::move(mean), std::move(cov)};
}

Subspace extract_subspace(const Matrix& sample_cov, int k) {
  if (sample_cov.rows() != sample_cov.cols()) {
    throw Error(ErrorCode::kNotSymmetric, "sample covariance is not square");
  }
  const int d = static_cast<int>(sample_cov.rows());
  if (k < 1 || k >= d) {
    throw Error(ErrorCode::kInvalidArgument,
                "k = " + std::to_string(k) + " out of range [1, " +
                    std::to_string(d - 1) + "]");
  }
  if (asymmetry(sample_cov) > 1e-9) {
    throw Error(ErrorCode::kNotSymmetric,
                "sample covariance is not symmetric within 1e-9");
  }
  const Matrix sym = 0.5 * (sample_cov + sample_cov.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::kInvalidArgument, "eigendecomposition failed");
  }

  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return eig.eigenvalues()(a) < eig.eigenvalues()(b);
  });

  Matrix vectors(d, d);
  Vector values(d);
  for (int j = 0; j < d; ++j) {
    values(j) = eig.eigenvalues()(order[j]);
    Vector v = eig.eigenvectors().col(order[j]);
    Eigen::Index at = 0;
    v.cwiseAbs().maxCoeff(&at);
    if (v(at) < 0.0) v = -v;
    vectors.col(j) = v;
  }

  Subspace out;
  out.r1_hat = vectors.leftCols(k);
  out.r2_hat = vectors.rightCols(d - k);
  out.eigenvalues = values;
  const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
  if (values(k) - values(k - 1) <= 1e-12 * scale) {
    std::ostringstream msg;
    msg << "degenerate eigengap between eigenvalues " << k << " and " << k + 1
        << " (" << values(k - 1) << " vs " << values(k)
        << "); the least-k eigenspace is not unique";
    out.warnings.push_back(msg.str());
  }
  return out;
}

SourceFit fit_sources(std::span<const EnvironmentDataset> envs, int k,
                      int workers) {
  if (envs.empty()) {
    throw Error(ErrorCode::kInsufficientEnvironments,
                "insufficient environments: none given");
  }
  const auto d = envs.front().X.cols();
  for (const auto& env : envs) {
    if (env.X.cols() != d) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "environment " + std::to_string(env.env_index) + " has d = " +
                      std::to_string(env.X.cols()) + ", expected " +
                      std::to_string(d));
    }
  }

  std::vector<std::size_t> order(envs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return envs[a].env_index < envs[b].env_index;
  });

  std::vector<OlsResult> fits(envs.size());
  std::vector<std::exception_ptr> failures(envs.size());
  detail::parallel_for(envs.size(), workers, [&](std::size_t slot) {
    try {
      fits[slot] = ols(envs[order[slot]]);
    } catch (...) {
      failures[slot] = std::current_exception();
    }
  });
  for (std::size_t slot = 0; slot < envs.size(); ++slot) {
    if (!failures[slot]) continue;
    const int idx = envs[order[slot]].env_index;
    try {
      std::rethrow_exception(failures[slot]);
    } catch (const SingularDesignError& e) {
      throw SingularDesignError(e.condition_number(),
                                std::string("source fit aborted at env_index ") +
                                    std::to_string(idx) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), std::string("source fit aborted at env_index ") +
                                std::to_string(idx) + ": " + e.what());
    }
  }

  SourceFit fit;
  fit.env_indices.reserve(envs.size());
  fit.per_env_params.reserve(envs.size());
  double rss = 0.0;
  double dof = 0.0;
  for (std::size_t slot = 0; slot < envs.size(); ++slot) {
    fit.env_indices.push_back(envs[order[slot]].env_index);
    fit.per_env_params.push_back(fits[slot].param);
    rss += fits[slot].residual_sum_squares;
    dof += static_cast<double>(envs[order[slot]].X.rows() - d);
  }
  fit.noise_variance_estimate = dof > 0.0 ? rss / dof : 0.0;

  auto moments = aggregate(fit.per_env_params);
  fit.mean_param = std::move(moments.mean);
  fit.sample_cov = std::move(moments.covariance);

  auto sub = extract_subspace(fit.sample_cov, k);
  fit.r1_hat = std::move(sub.r1_hat);
  fit.r2_hat = std::move(sub.r2_hat);
  fit.eigenvalues = std::move(sub.eigenvalues);
  fit.warnings = std::move(sub.warnings);

  // Sample-covariance fluctuations are of order sqrt(d/E) * ||Sigma||; a gap
  // below that cannot be told apart from sampling noise.
  const Vector& ev = fit.eigenvalues;
  const double gap = ev(k) - ev(k - 1);
  const double noise_floor =
      std::sqrt(static_cast<double>(d) / static_cast<double>(envs.size())) *
      ev(d - 1);
  if (gap <= noise_floor) {
    std::ostringstream msg;
    msg << "well-separation not supported by the data: eigengap " << gap
        << " at k = " << k << " is within the sampling fluctuation "
        << noise_floor;
    fit.warnings.push_back(msg.str());
  }
  for (const auto& w : fit.warnings) warn(w);
  return fit;
}

}  // namespace ssa
