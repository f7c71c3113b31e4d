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

#include "ssa/metrics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ssa/error.hpp"

namespace ssa {

double excess_risk(const Vector& theta_hat, const Vector& true_param,
                   const Matrix& eval_cov) {
  const auto d = theta_hat.size();
  if (true_param.size() != d || eval_cov.rows() != d || eval_cov.cols() != d) {
    throw Error(ErrorCode::kDimensionMismatch,
                "excess_risk: theta_hat, true_param and eval_cov disagree on d");
  }
  const Vector diff = theta_hat - true_param;
  return 0.5 * diff.dot(eval_cov * diff);
}

SubspaceDistances subspace_distances(const Matrix& r1_hat,
                                     const GroundTruth& gt) {
  if (r1_hat.rows() != gt.d() || r1_hat.cols() != gt.k()) {
    std::ostringstream msg;
    msg << "dimension mismatch: r1_hat is " << r1_hat.rows() << "x"
        << r1_hat.cols() << ", ground truth has d = " << gt.d()
        << ", k = " << gt.k();
    throw Error(ErrorCode::kDimensionMismatch, msg.str());
  }
  if (!(orthonormality_defect(r1_hat) <= 1e-8)) {
    throw Error(ErrorCode::kNotOrthonormal,
                "r1_hat does not have orthonormal columns");
  }
  const Matrix r1 = gt.content_basis();
  const Matrix r2 = gt.environment_basis();
  SubspaceDistances out;
  out.sin_theta = operator_norm(r2.transpose() * r1_hat);
  Eigen::JacobiSVD<Matrix> svd(r1.transpose() * r1_hat,
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.aligned_O = svd.matrixU() * svd.matrixV().transpose();
  out.procrustes_err = operator_norm(r1_hat - r1 * out.aligned_O);
  return out;
}

const char* dk_status_name(DkStatus s) {
  switch (s) {
    case DkStatus::kHolds: return "true";
    case DkStatus::kViolated: return "false";
    case DkStatus::kNotApplicable: return "na";
  }
  return "na";
}

DavisKahanAudit davis_kahan_audit(const Matrix& sample_cov,
                                  const Matrix& r1_hat, const GroundTruth& gt) {
  if (sample_cov.rows() != gt.d() || sample_cov.cols() != gt.d()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "davis_kahan_audit: sample covariance is not d x d");
  }
  DavisKahanAudit audit;
  audit.lhs = subspace_distances(r1_hat, gt).procrustes_err;
  audit.perturbation = operator_norm(sample_cov - gt.rotated_covariance());
  audit.gap = gt.meta().eigengap();
  if (!(audit.gap > audit.perturbation)) {
    audit.rhs = std::numeric_limits<double>::infinity();
    audit.status = DkStatus::kNotApplicable;
    return audit;
  }
  audit.rhs = 2.0 * audit.perturbation / (audit.gap - audit.perturbation);
  audit.status =
      audit.lhs <= audit.rhs + 1e-9 ? DkStatus::kHolds : DkStatus::kViolated;
  return audit;
}

DavisKahanAudit davis_kahan_audit(const SourceFit& fit, const GroundTruth& gt) {
  return davis_kahan_audit(fit.sample_cov, fit.r1_hat, gt);
}

namespace {

void check_rep_shapes(const Matrix& R, const Matrix& Rp, const Matrix& cov_x) {
  if (R.rows() != Rp.rows() || cov_x.rows() != R.rows() ||
      cov_x.cols() != R.rows()) {
    std::ostringstream msg;
    msg << "dimension mismatch: R is " << R.rows() << "x" << R.cols()
        << ", Rp is " << Rp.rows() << "x" << Rp.cols() << ", cov_x is "
        << cov_x.rows() << "x" << cov_x.cols();
    throw Error(ErrorCode::kDimensionMismatch, msg.str());
  }
}

}  // namespace

Matrix rep_covariance(const Matrix& R, const Matrix& Rp, const Matrix& cov_x) {
  check_rep_shapes(R, Rp, cov_x);
  return R.transpose() * cov_x * Rp;
}

Matrix rep_joint_covariance(const Matrix& R, const Matrix& Rp,
                            const Matrix& cov_x) {
  check_rep_shapes(R, Rp, cov_x);
  Matrix both(R.rows(), R.cols() + Rp.cols());
  both << R, Rp;
  const Matrix s = both.transpose() * cov_x * both;
  return 0.5 * (s + s.transpose());
}

Matrix rep_divergence(const Matrix& R, const Matrix& Rp, const Matrix& cov_x) {
  check_rep_shapes(R, Rp, cov_x);
  const Matrix s_rr = R.transpose() * cov_x * R;
  const Matrix s_rp = R.transpose() * cov_x * Rp;
  const Matrix s_pp = Rp.transpose() * cov_x * Rp;
  const Matrix d = s_pp - s_rp.transpose() * pseudo_inverse(s_rr, 1e-10) * s_rp;
  return 0.5 * (d + d.transpose());
}

}  // namespace ssa
