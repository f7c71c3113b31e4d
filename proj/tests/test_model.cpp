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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "oracles.hpp"
#include "ssa/error.hpp"
#include "ssa/model.hpp"
#include "support.hpp"

using namespace ssa;

namespace {

MetaDistribution reference_meta(double sigma = 0.01) {
  return MetaDistribution::isotropic(10, 6, 6.0, 0.1, 3.0, sigma);
}

}  // namespace

TEST_CASE("haar factors are orthogonal") {
  for (int d : {1, 2, 5, 10, 40}) {
    RngStream rng(7, static_cast<std::uint64_t>(d));
    for (int rep = 0; rep < 20; ++rep) {
      CHECK(orthonormality_defect(haar_orthogonal(d, rng)) <= 1e-10);
    }
  }
  RngStream rng(7, 99);
  CHECK(orthonormality_defect(haar_orthonormal(50, 10, rng)) <= 1e-10);
}

TEST_CASE("haar entries have the uniform-sphere second moment") {
  // For Q Haar on O(d), E[Q_ij^2] = 1/d and E[Q_11] = 0. Without the sign
  // fix the first column is biased toward positive entries.
  const int d = 3, m = 40000;
  RngStream rng(11, 1);
  double sq = 0.0, first = 0.0;
  for (int i = 0; i < m; ++i) {
    const Matrix q = haar_orthogonal(d, rng);
    sq += q(0, 0) * q(0, 0);
    first += q(0, 0);
  }
  // Var(Q11^2) = 2/(d(d+2)) - 1/d^2 for the sphere.
  const double se_sq = std::sqrt((3.0 / (d * (d + 2.0)) - 1.0 / (d * d)) / m);
  CHECK(std::abs(sq / m - 1.0 / d) <= 5 * se_sq);
  CHECK(std::abs(first / m) <= 5 * std::sqrt(1.0 / (d * m)));
}

TEST_CASE("meta-distribution validation") {
  CHECK_THROWS_AS(MetaDistribution::isotropic(4, 4, 1, 0.1, 3, 0.1), Error);
  CHECK_THROWS_AS(MetaDistribution::isotropic(4, 0, 1, 0.1, 3, 0.1), Error);
  CHECK_THROWS_AS(MetaDistribution::isotropic(4, 2, 1, -0.1, 3, 0.1), Error);
  CHECK_THROWS_AS(MetaDistribution::isotropic(4, 2, 1, 0.1, 3, -1), Error);
  CHECK_THROWS_AS(MetaDistribution(Vector::Ones(2), Vector::Ones(1), Vector::Ones(2), 0.1),
                  Error);
  Vector unsorted(2);
  unsorted << 2.0, 1.0;
  CHECK_THROWS_AS(MetaDistribution(Vector::Ones(2), unsorted, Vector::Constant(2, 3.0), 0.1),
                  Error);

  testing::WarningCapture warnings;
  const auto ok = reference_meta();
  CHECK(warnings.messages.empty());
  CHECK(ok.eigengap() == doctest::Approx(2.9));
  const auto flat = MetaDistribution::isotropic(10, 6, 6.0, 1.0, 1.0, 0.01);
  CHECK_FALSE(flat.well_separated());
  CHECK(warnings.contains("well-separation"));
}

TEST_CASE("ground truth rejects a non-orthogonal rotation") {
  Matrix r = Matrix::Identity(10, 10);
  r(0, 1) = 1e-6;
  CHECK_THROWS_AS(GroundTruth(r, reference_meta()), Error);
  CHECK_THROWS_AS(GroundTruth(Matrix::Identity(9, 9), reference_meta()), Error);
  const GroundTruth gt(Matrix::Identity(10, 10), reference_meta());
  CHECK(gt.content_basis().cols() == 6);
  CHECK(gt.environment_basis().cols() == 4);
}

TEST_CASE("zero-variance environment parameters are the rotated mean") {
  const auto meta = MetaDistribution::isotropic(10, 6, 6.0, 0.0, 0.0, 0.01);
  RngStream g(3, 1);
  const GroundTruth gt = GroundTruth::sample(meta, g);
  Vector mean(10);
  mean << Vector::Constant(6, 6.0), Vector::Zero(4);
  const Vector expected = gt.rotation() * mean;
  RngStream rng(3, 2);
  for (int i = 0; i < 10; ++i) {
    CHECK(sample_environment_param(meta, gt.rotation(), rng) == expected);
  }
  CHECK_THROWS_AS(sample_environment_param(meta, Matrix::Identity(9, 9), rng), Error);
}

TEST_CASE("environment parameters follow the meta-distribution") {
  const auto meta = reference_meta();
  RngStream g(5, 1);
  const GroundTruth gt = GroundTruth::sample(meta, g);
  const int m = 100000;

  SUBCASE("identity rotation: content coordinates have mean 6 and variance 0.1") {
    RngStream rng(5, 2);
    Vector sum = Vector::Zero(10), sumsq = Vector::Zero(10);
    for (int i = 0; i < m; ++i) {
      const Vector p = sample_environment_param(meta, Matrix::Identity(10, 10), rng);
      sum += p;
      sumsq += p.cwiseAbs2();
    }
    for (int j = 0; j < 6; ++j) {
      const double mean = sum(j) / m;
      const double var = sumsq(j) / m - mean * mean;
      CHECK(std::abs(mean - 6.0) <= 3 * std::sqrt(0.1 / m));
      CHECK(std::abs(var - 0.1) <= 3 * 0.1 * std::sqrt(2.0 / m));
    }
  }

  SUBCASE("empirical covariance matches R* diag(L11, L22) R*^T") {
    RngStream rng(5, 3);
    Matrix draws(10, m);
    for (int i = 0; i < m; ++i) draws.col(i) = sample_environment_param(meta, gt.rotation(), rng);
    const Vector mean = draws.rowwise().mean();
    const Matrix centered = draws.colwise() - mean;
    const Matrix emp = centered * centered.transpose() / m;
    const Matrix pop = gt.rotated_covariance();
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 10; ++j) {
        const double se = std::sqrt((pop(i, i) * pop(j, j) + pop(i, j) * pop(i, j)) / m);
        CHECK(std::abs(emp(i, j) - pop(i, j)) <= 5 * se);
      }
    }
    CHECK((mean - gt.rotated_mean()).norm() <= 5 * std::sqrt(pop.trace() / m));
    // Latent covariance converges in operator norm.
    const Matrix latent = gt.rotation().transpose() * emp * gt.rotation();
    const Matrix diag = meta.latent_variances().asDiagonal();
    CHECK(oracle::operator_norm(latent - diag) <= 0.1 * 3.0);
  }
}

TEST_CASE("design singular values are the drawn magnitudes") {
  RngStream rng(9, 1);
  for (int rep = 0; rep < 10; ++rep) {
    const DesignBasis basis = draw_design_basis(10, 6, rng);
    CHECK((basis.singular_values.array() >= 0.0).all());
    CHECK(orthonormality_defect(basis.right_vectors) <= 1e-10);
    const Matrix x = sample_design(basis, 50, rng);
    CHECK(x.rows() == 50);
    CHECK(x.cols() == 10);

    Vector drawn = basis.singular_values;
    std::sort(drawn.data(), drawn.data() + drawn.size());
    // Gram spectrum from the Jacobi oracle.
    const Vector gram = oracle::jacobi_eigenvalues(x.transpose() * x);
    for (int i = 0; i < 10; ++i) {
      CHECK(std::sqrt(std::max(0.0, gram(i))) == doctest::Approx(drawn(i)).epsilon(1e-8).scale(1.0));
    }
  }
}

TEST_CASE("content singular values are centered at 5 and the rest at 0") {
  RngStream rng(9, 2);
  const int m = 20000;
  double top = 0.0, rest = 0.0;
  for (int i = 0; i < m; ++i) {
    const DesignBasis b = draw_design_basis(10, 6, rng);
    top += b.singular_values.head(6).mean();
    rest += b.singular_values.tail(4).mean();
  }
  CHECK(std::abs(top / m - 5.0) <= 5 * std::sqrt(1.0 / (6.0 * m)));
  // E|N(0,1)| = sqrt(2/pi)
  CHECK(std::abs(rest / m - std::sqrt(2.0 / M_PI)) <= 5 * std::sqrt((1 - 2 / M_PI) / (4.0 * m)));
}

TEST_CASE("unit singular values give an identity Gram matrix") {
  RngStream rng(9, 3);
  DesignBasis basis = draw_design_basis(8, 3, rng);
  basis.singular_values.setOnes();
  const Matrix x = sample_design(basis, 30, rng);
  const Vector ev = oracle::jacobi_eigenvalues(x.transpose() * x);
  for (int i = 0; i < 8; ++i) CHECK(ev(i) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("sqrt_n scaling makes X^T X / n the population covariance") {
  RngStream rng(9, 4);
  const DesignBasis basis = draw_design_basis(10, 6, rng);
  for (int n : {10, 20, 2000}) {
    const Matrix x = sample_design(basis, n, rng, DesignScaling::kSqrtN);
    const Matrix gram = x.transpose() * x / n;
    CHECK((gram - basis.population_covariance()).norm() <=
          1e-10 * basis.population_covariance().norm());
  }
}

TEST_CASE("underdetermined designs are rejected") {
  RngStream rng(9, 5);
  try {
    (void)generate_design(5, 10, 6, rng);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnderdeterminedDesign);
  }
}

TEST_CASE("noiseless environments are exact") {
  const auto meta = reference_meta(0.0);
  RngStream g(13, 0);
  const GroundTruth gt = GroundTruth::sample(meta, g);
  RngStream rng(13, 1);
  const auto env = generate_environment(gt, 50, 4, rng);
  CHECK(env.env_index == 4);
  REQUIRE(env.true_param.has_value());
  CHECK((env.y - env.X * *env.true_param).norm() <= 1e-12);
}

TEST_CASE("pooled residual variance is sigma squared") {
  const double sigma = 0.01;
  const auto meta = reference_meta(sigma);
  RngStream g(17, 0);
  const GroundTruth gt = GroundTruth::sample(meta, g);
  double ss = 0.0;
  int count = 0;
  for (int e = 0; count < 100000; ++e) {
    RngStream rng(17, derive_stream_id(0, static_cast<std::uint64_t>(e),
                                       StreamRole::kSourceEnvironment));
    const auto env = generate_environment(gt, 50, e, rng);
    ss += (env.y - env.X * *env.true_param).squaredNorm();
    count += 50;
  }
  const double var = ss / count;
  CHECK(std::abs(var - sigma * sigma) <= 5 * sigma * sigma * std::sqrt(2.0 / count));
}

TEST_CASE("reference configuration shapes") {
  const auto meta = reference_meta();
  RngStream g(19, 0);
  const GroundTruth gt = GroundTruth::sample(meta, g);
  for (int e = 0; e < 999; ++e) {
    RngStream rng(19, static_cast<std::uint64_t>(e + 1));
    const auto env = generate_environment(gt, 50, e, rng);
    REQUIRE(env.X.rows() == 50);
    REQUIRE(env.X.cols() == 10);
    REQUIRE(env.y.size() == 50);
  }
  RngStream rng(19, 5000);
  const auto target = generate_environment(gt, 2000, 999, rng);
  CHECK(target.X.rows() == 2000);
  CHECK(target.X.cols() == 10);
}

TEST_CASE("generation is deterministic per stream") {
  const auto meta = reference_meta();
  RngStream g(23, 0);
  const GroundTruth gt = GroundTruth::sample(meta, g);
  RngStream a(23, 42), b(23, 42), c(23, 43);
  const auto ea = generate_environment(gt, 50, 0, a);
  const auto eb = generate_environment(gt, 50, 0, b);
  const auto ec = generate_environment(gt, 50, 0, c);
  CHECK(ea.X == eb.X);
  CHECK(ea.y == eb.y);
  CHECK(*ea.true_param == *eb.true_param);
  CHECK(ea.X != ec.X);
}

TEST_CASE("stream ids separate roles, environments and seeds") {
  std::set<std::uint64_t> ids;
  for (std::uint64_t s = 0; s < 20; ++s) {
    for (std::uint64_t e = 0; e < 50; ++e) {
      for (auto role : {StreamRole::kGroundTruth, StreamRole::kSourceEnvironment,
                        StreamRole::kTargetSample, StreamRole::kTestSample}) {
        ids.insert(derive_stream_id(s, e, role));
      }
    }
  }
  CHECK(ids.size() == 20u * 50u * 4u);
  CHECK(derive_stream_id(1, 2, StreamRole::kTargetSample, 20) !=
        derive_stream_id(1, 2, StreamRole::kTargetSample, 50));
}

TEST_CASE("dataset validation") {
  EnvironmentDataset env;
  env.X = Matrix::Ones(4, 2);
  env.y = Vector::Ones(3);
  CHECK_THROWS_AS(env.validate(), Error);
  env.y = Vector::Ones(4);
  env.true_param = Vector::Ones(3);
  CHECK_THROWS_AS(env.validate(), Error);
  env.true_param = Vector::Ones(2);
  CHECK_NOTHROW(env.validate());
}
