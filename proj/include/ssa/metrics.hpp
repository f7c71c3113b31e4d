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

#include "ssa/linalg.hpp"
#include "ssa/model.hpp"
#include "ssa/spectral.hpp"

namespace ssa {

// (1/2) (theta_hat - truth)^T eval_cov (theta_hat - truth)
double excess_risk(const Vector& theta_hat, const Vector& true_param,
                   const Matrix& eval_cov);

struct SubspaceDistances {
  double sin_theta = 0.0;       // ||R*_2^T r1_hat||
  double procrustes_err = 0.0;  // ||r1_hat - R*_1 O||
  Matrix aligned_O;             // U V^T from the SVD of R*_1^T r1_hat
};

SubspaceDistances subspace_distances(const Matrix& r1_hat,
                                     const GroundTruth& gt);

enum class DkStatus { kHolds, kViolated, kNotApplicable };

const char* dk_status_name(DkStatus s);

// Checks ||R_hat_1 - R*_1 O|| <= 2 E / (gap - E) with
// E = ||sample_cov - Sigma_RM|| and gap = min(lambda22) - max(lambda11).
// Not applicable when gap <= E.
struct DavisKahanAudit {
  double lhs = 0.0;
  double rhs = 0.0;
  double perturbation = 0.0;
  double gap = 0.0;
  DkStatus status = DkStatus::kNotApplicable;

  bool holds() const noexcept { return status == DkStatus::kHolds; }
};

DavisKahanAudit davis_kahan_audit(const SourceFit& fit, const GroundTruth& gt);
// Same audit from raw pieces.
DavisKahanAudit davis_kahan_audit(const Matrix& sample_cov,
                                  const Matrix& r1_hat, const GroundTruth& gt);

// R^T cov_x Rp: cross-covariance of the linear features x -> R^T x and
// x -> Rp^T x.
Matrix rep_covariance(const Matrix& R, const Matrix& Rp, const Matrix& cov_x);

// Block matrix [[S(R,R), S(R,Rp)], [S(Rp,R), S(Rp,Rp)]].
Matrix rep_joint_covariance(const Matrix& R, const Matrix& Rp,
                            const Matrix& cov_x);

// S(Rp,Rp) - S(Rp,R) S(R,R)^+ S(R,Rp): the part of Rp's features that R's
// features cannot linearly explain. The pseudo-inverse drops singular values
// below 1e-10 relative.
Matrix rep_divergence(const Matrix& R, const Matrix& Rp, const Matrix& cov_x);

}  // namespace ssa
