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

#include "ssa/finetune.hpp"

#include <cmath>
#include <sstream>

#include "ssa/error.hpp"
#include "ssa/spectral.hpp"

namespace ssa {

Matrix projector(const Matrix& basis) {
  const double defect = orthonormality_defect(basis);
  if (!(defect <= 1e-8)) {
    std::ostringstream msg;
    msg << "non-orthonormal basis: ||B^T B - I||_F = " << defect;
    throw Error(ErrorCode::kNotOrthonormal, msg.str());
  }
  return basis * basis.transpose();
}

LambdaPair paper_lambda(double sigma, int n2, double sigma_x_min_eig) {
  const double root = std::sqrt(static_cast<double>(n2));
  if (n2 < 1 || !(root > sigma)) {
    std::ostringstream msg;
    msg << "rule undefined: sqrt(n2) = " << root << " must exceed sigma = "
        << sigma;
    throw Error(ErrorCode::kRuleUndefined, msg.str());
  }
  if (!(sigma_x_min_eig > 0.0) || sigma < 0.0) {
    throw Error(ErrorCode::kRuleUndefined,
                "rule undefined: needs sigma >= 0 and a positive smallest "
                "input-covariance eigenvalue");
  }
  const double lambda = sigma_x_min_eig * sigma / (root - sigma);
  return {lambda, lambda};
}

namespace {

void check_shapes(const EnvironmentDataset& target, const Matrix& p,
                  const Vector& mean_param) {
  target.validate();
  const auto d = target.X.cols();
  if (p.rows() != d || p.cols() != d || mean_param.size() != d) {
    std::ostringstream msg;
    msg << "dimension mismatch: target has d = " << d << ", projector is "
        << p.rows() << "x" << p.cols() << ", mean has length "
        << mean_param.size();
    throw Error(ErrorCode::kDimensionMismatch, msg.str());
  }
  if (target.X.rows() < 1) {
    throw Error(ErrorCode::kInvalidArgument, "target has no rows");
  }
}

void check_lambdas(double lambda1, double lambda2) {
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0) || !std::isfinite(lambda1) ||
      !std::isfinite(lambda2)) {
    throw Error(ErrorCode::kInvalidArgument,
                "lambda1 and lambda2 must be finite and nonnegative");
  }
}

}  // namespace

FinetuneSystem finetune_system(const EnvironmentDataset& target,
                               const Matrix& content_projector,
                               const Vector& mean_param, double lambda1,
                               double lambda2) {
  check_shapes(target, content_projector, mean_param);
  const auto d = target.X.cols();
  const double n = static_cast<double>(target.X.rows());
  const Matrix complement = Matrix::Identity(d, d) - content_projector;
  FinetuneSystem sys;
  sys.C = target.X.transpose() * target.X / n + lambda1 * content_projector +
          lambda2 * complement;
  sys.rhs = target.X.transpose() * target.y / n +
            lambda1 * (content_projector * mean_param);
  return sys;
}

double finetune_objective(const EnvironmentDataset& target,
                          const Matrix& content_projector,
                          const Vector& mean_param, double lambda1,
                          double lambda2, const Vector& theta) {
  check_shapes(target, content_projector, mean_param);
  const auto d = target.X.cols();
  const double n = static_cast<double>(target.X.rows());
  const Matrix complement = Matrix::Identity(d, d) - content_projector;
  return (target.y - target.X * theta).squaredNorm() / (2.0 * n) +
         0.5 * lambda1 * (content_projector * (theta - mean_param)).squaredNorm() +
         0.5 * lambda2 * (complement * theta).squaredNorm();
}

Vector finetune_gradient(const EnvironmentDataset& target,
                         const Matrix& content_projector,
                         const Vector& mean_param, double lambda1,
                         double lambda2, const Vector& theta) {
  const auto sys =
      finetune_system(target, content_projector, mean_param, lambda1, lambda2);
  return sys.C * theta - sys.rhs;
}

namespace {

// Minimizes 1/(2n)||y - X t||^2 + (l1/2)||P(t - m)||^2 + (l2/2)||(I-P) t||^2
// as a stacked least-squares problem.
FinetuneSolution solve_penalized(const EnvironmentDataset& target,
                                 const Matrix& p, const Vector& mean_param,
                                 double lambda1, double lambda2) {
  check_shapes(target, p, mean_param);
  check_lambdas(lambda1, lambda2);
  const auto n = target.X.rows();
  const auto d = target.X.cols();
  const double root_n = std::sqrt(static_cast<double>(n));
  const double a1 = std::sqrt(lambda1);
  const double a2 = std::sqrt(lambda2);
  const Matrix complement = Matrix::Identity(d, d) - p;

  Matrix a(n + 2 * d, d);
  Vector b(n + 2 * d);
  a.topRows(n) = target.X / root_n;
  a.middleRows(n, d) = a1 * p;
  a.bottomRows(d) = a2 * complement;
  b.head(n) = target.y / root_n;
  b.segment(n, d) = a1 * (p * mean_param);
  b.tail(d).setZero();

  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  qr.setThreshold(1e-13);
  if (qr.rank() < d) {
    throw Error(ErrorCode::kSingularSystem,
                "singular system: the fine-tuning matrix C is not invertible "
                "(rank " + std::to_string(qr.rank()) + " < d = " +
                    std::to_string(d) + ")");
  }
  FinetuneSolution sol;
  sol.theta_hat = qr.solve(b);
  sol.lambda1_used = lambda1;
  sol.lambda2_used = lambda2;
  sol.objective_value =
      finetune_objective(target, p, mean_param, lambda1, lambda2, sol.theta_hat);
  sol.gradient_norm =
      finetune_gradient(target, p, mean_param, lambda1, lambda2, sol.theta_hat)
          .norm();
  return sol;
}

}  // namespace

FinetuneSolution solve_finetune(const EnvironmentDataset& target,
                                const Matrix& r1_hat, const Vector& mean_param,
                                const FinetuneConfig& cfg) {
  double lambda1 = cfg.lambda1;
  double lambda2 = cfg.lambda2;
  if (cfg.lambda_rule == LambdaRule::kPaperRule) {
    const auto rule = paper_lambda(cfg.sigma_for_rule,
                                   static_cast<int>(target.X.rows()),
                                   cfg.sigma_x_min_eig);
    lambda1 = rule.lambda1;
    lambda2 = rule.lambda2;
  }
  if (r1_hat.rows() != target.X.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "dimension mismatch: r1_hat has " + std::to_string(r1_hat.rows()) +
                    " rows, target has d = " + std::to_string(target.X.cols()));
  }
  return solve_penalized(target, projector(r1_hat), mean_param, lambda1, lambda2);
}

FinetuneSolution solve_baseline(const EnvironmentDataset& target,
                                const BaselineMethod& method) {
  const auto d = target.X.cols();
  const Matrix zero_p = Matrix::Zero(d, d);
  const Vector zero_mean = Vector::Zero(d);
  return std::visit(
      [&](const auto& m) -> FinetuneSolution {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, baseline::Ols>) {
          FinetuneSolution sol;
          sol.theta_hat = fit_ols(target);
          sol.objective_value = finetune_objective(target, zero_p, zero_mean,
                                                   0.0, 0.0, sol.theta_hat);
          sol.gradient_norm = finetune_gradient(target, zero_p, zero_mean, 0.0,
                                                0.0, sol.theta_hat)
                                  .norm();
          return sol;
        } else if constexpr (std::is_same_v<T, baseline::Ridge>) {
          return solve_penalized(target, zero_p, zero_mean, 0.0, m.lambda);
        } else if constexpr (std::is_same_v<T, baseline::Reg1Only>) {
          FinetuneConfig cfg;
          cfg.lambda1 = m.lambda1;
          return solve_finetune(target, m.r1_hat, m.mean_param, cfg);
        } else {
          FinetuneConfig cfg;
          cfg.lambda2 = m.lambda2;
          return solve_finetune(target, m.r1_hat, zero_mean, cfg);
        }
      },
      method);
}

}  // namespace ssa
