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

#include <string>
#include <variant>

#include "ssa/linalg.hpp"
#include "ssa/model.hpp"

namespace ssa {

enum class LambdaRule { kManual, kPaperRule };

struct FinetuneConfig {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  LambdaRule lambda_rule = LambdaRule::kManual;
  // Only read under kPaperRule.
  double sigma_for_rule = 0.0;
  double sigma_x_min_eig = 1.0;
};

struct FinetuneSolution {
  Vector theta_hat;
  double lambda1_used = 0.0;
  double lambda2_used = 0.0;
  double objective_value = 0.0;
  double gradient_norm = 0.0;
};

// basis * basis^T for an orthonormal-column basis (checked to 1e-8).
Matrix projector(const Matrix& basis);

struct LambdaPair {
  double lambda1;
  double lambda2;
};

// lambda1 = lambda2 = min_eig * sigma / (sqrt(n2) - sigma).
// Throws kRuleUndefined when sqrt(n2) <= sigma.
LambdaPair paper_lambda(double sigma, int n2, double sigma_x_min_eig);

// Normal equations of the fine-tuning objective
//   (1/2n) ||y - X theta||^2 + (l1/2) ||P (theta - mean)||^2
//                            + (l2/2) ||(I - P) theta||^2 :
//   C = X^T X / n + l1 P + l2 (I - P),  rhs = X^T y / n + l1 P mean.
struct FinetuneSystem {
  Matrix C;
  Vector rhs;
};

FinetuneSystem finetune_system(const EnvironmentDataset& target,
                               const Matrix& content_projector,
                               const Vector& mean_param, double lambda1,
                               double lambda2);

double finetune_objective(const EnvironmentDataset& target,
                          const Matrix& content_projector,
                          const Vector& mean_param, double lambda1,
                          double lambda2, const Vector& theta);

// C theta - rhs
Vector finetune_gradient(const EnvironmentDataset& target,
                         const Matrix& content_projector,
                         const Vector& mean_param, double lambda1,
                         double lambda2, const Vector& theta);

// Closed-form minimizer of the objective above with P = P_{r1_hat}. The
// system is solved as the equivalent stacked least-squares problem
//   [X/sqrt(n); sqrt(l1) P; sqrt(l2) (I-P)] theta ~ [y/sqrt(n); sqrt(l1) P mean; 0]
// by rank-revealing QR; a rank-deficient stack raises kSingularSystem.
FinetuneSolution solve_finetune(const EnvironmentDataset& target,
                                const Matrix& r1_hat, const Vector& mean_param,
                                const FinetuneConfig& cfg);

namespace baseline {
struct Ols {};
struct Ridge {
  double lambda = 0.0;
};
struct Reg1Only {
  double lambda1 = 0.0;
  Matrix r1_hat;
  Vector mean_param;
};
struct Reg2Only {
  double lambda2 = 0.0;
  Matrix r1_hat;
};
}  // namespace baseline

using BaselineMethod = std::variant<baseline::Ols, baseline::Ridge,
                                    baseline::Reg1Only, baseline::Reg2Only>;

FinetuneSolution solve_baseline(const EnvironmentDataset& target,
                                const BaselineMethod& method);

}  // namespace ssa
