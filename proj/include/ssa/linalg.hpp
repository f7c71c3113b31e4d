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

#include <Eigen/Dense>

#include "ssa/rng.hpp"

namespace ssa {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Spectral (largest singular value) norm.
double operator_norm(const Matrix& a);

// ||A^T A - I||_F
double orthonormality_defect(const Matrix& a);

// max |A - A^T| entry, relative to max(1, max|A|).
double asymmetry(const Matrix& a);

// n x d matrix with Haar-distributed orthonormal columns (n >= d). Built from
// the QR factorization of a standard Gaussian matrix with the signs of R's
// diagonal folded back into Q.
Matrix haar_orthonormal(Eigen::Index n, Eigen::Index d, RngStream& rng);

// Haar-distributed element of O(d).
inline Matrix haar_orthogonal(Eigen::Index d, RngStream& rng) {
  return haar_orthonormal(d, d, rng);
}

// Moore-Penrose pseudo-inverse with singular values below
// rel_tol * sigma_max treated as zero.
Matrix pseudo_inverse(const Matrix& a, double rel_tol = 1e-10);

}  // namespace ssa
